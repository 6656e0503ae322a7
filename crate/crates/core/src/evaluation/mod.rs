//! Benchmark evaluation over judged documents only.
//!
//! Every generated query of a topic is executed and scored; the queries with
//! the highest precision, recall and F1 form the best sets. The strategy
//! selections are then checked against those sets, exactly and allowing one
//! term/concept swap or one predicate change.

mod edits;
mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use edits::{one_predicate_edit, one_term_concept_edit, TermConceptEdit};
pub use report::{
    evaluate, run_benchmark, BenchmarkPaths, EvalOptions, EvalReport, HitRow, ReportSettings, Table1, Table2, REPORT_SCHEMA,
};

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::model::{canonical_serialize, NarrativeQuery, Term};
use crate::retrieval::answers;
use crate::strategies::{Ranked, Strategy, StrategyOptions};
use crate::translation::{tokenize, TranslationOptions};

/// Precision, recall and F1 of one retrieved set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Precision,
    Recall,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Precision, Metric::Recall, Metric::F1];
}

/// Scores `retrieved` against the judgments of `topic_id`, ignoring every
/// unjudged document. A grade of 1 or more is relevant.
///
pub fn judged_metrics<S: AsRef<str>>(
    topic_id: &str,
    retrieved: &[S],
    judgments: &BTreeMap<String, i32>,
) -> Result<Metrics> {
    if judgments.is_empty() {
        return Err(Error::NoJudgments(topic_id.to_string()));
    }
    let relevant = judgments.values().filter(|g| **g >= 1).count();
    let mut judged_retrieved = 0usize;
    let mut hits = 0usize;
    for doc in retrieved {
        if let Some(grade) = judgments.get(doc.as_ref()) {
            judged_retrieved += 1;
            if *grade >= 1 {
                hits += 1;
            }
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(hits, judged_retrieved);
    let recall = ratio(hits, relevant);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Ok(Metrics { precision, recall, f1 })
}

/// Conjunctive term search over the unfiltered topic tokens.
pub fn term_baseline(
    topic_id: &str,
    topic_query: &str,
    engine: &Engine,
    judgments: &BTreeMap<String, i32>,
) -> Result<Metrics> {
    let terms: Vec<Term> = tokenize(topic_query, engine.tokenizer())
        .into_iter()
        .filter_map(|t| Term::new(t).ok())
        .collect();
    let q = NarrativeQuery::new([], [], terms)?;
    judged_metrics(topic_id, &answers(&q, engine.collection()), judgments)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredQuery {
    pub query: String,
    pub result_count: usize,
    pub metrics: Metrics,
}

/// All queries reaching the maximum of one metric, in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BestSet {
    pub value: f64,
    pub queries: Vec<String>,
    /// Metrics of the first query of the set.
    pub representative: Metrics,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl MetricFlags {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }

    fn set(&mut self, metric: Metric, value: bool) {
        match metric {
            Metric::Precision => self.precision = value,
            Metric::Recall => self.recall = value,
            Metric::F1 => self.f1 = value,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitFlags {
    pub exact: MetricFlags,
    pub term_concept_edit: MetricFlags,
    pub predicate_edit: MetricFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicResult {
    pub topic_id: String,
    pub query: String,
    pub tokens: Vec<String>,
    pub baseline: Metrics,
    pub generated: usize,
    pub truncated: bool,
    pub best_precision: BestSet,
    pub best_recall: BestSet,
    pub best_f1: BestSet,
    pub selections: BTreeMap<Strategy, ScoredQuery>,
    pub hits: HitFlags,
}

impl TopicResult {
    pub fn best(&self, metric: Metric) -> &BestSet {
        match metric {
            Metric::Precision => &self.best_precision,
            Metric::Recall => &self.best_recall,
            Metric::F1 => &self.best_f1,
        }
    }
}

/// Argmax sets over `scored`, which must be in canonical order.
pub fn best_sets(scored: &[(NarrativeQuery, Metrics)]) -> [Vec<usize>; 3] {
    Metric::ALL.map(|metric| {
        let Some(max) = scored.iter().map(|(_, m)| m.get(metric)).reduce(f64::max) else {
            return Vec::new();
        };
        (0..scored.len())
            .filter(|&i| scored[i].1.get(metric) == max)
            .collect()
    })
}

/// Strategy hit flags for one topic.
pub fn strategy_hits(
    selections: &[&NarrativeQuery],
    best: &[Vec<&NarrativeQuery>; 3],
    engine: &Engine,
    edit_mode: TermConceptEdit,
) -> HitFlags {
    let mut flags = HitFlags::default();
    for (m, metric) in Metric::ALL.into_iter().enumerate() {
        let set = &best[m];
        let any = |f: &dyn Fn(&NarrativeQuery, &NarrativeQuery) -> bool| {
            selections.iter().any(|s| set.iter().any(|b| f(s, b)))
        };
        flags.exact.set(metric, any(&|s, b| s == b));
        flags
            .term_concept_edit
            .set(metric, any(&|s, b| one_term_concept_edit(s, b, engine.ontology(), edit_mode)));
        flags.predicate_edit.set(metric, any(&|s, b| one_predicate_edit(s, b)));
    }
    flags
}

/// Translates, scores every query and checks the strategy selections for one topic.
pub fn evaluate_topic(
    topic_id: &str,
    topic_query: &str,
    engine: &Engine,
    judgments: &BTreeMap<String, i32>,
    translation: &TranslationOptions,
    strategy: &StrategyOptions,
    edit_mode: TermConceptEdit,
) -> Result<TopicResult> {
    let baseline = term_baseline(topic_id, topic_query, engine, judgments)?;
    let translated = engine.translate(topic_query, translation)?;
    let queries: Vec<&NarrativeQuery> = translated.queries.iter().map(|g| &g.query).collect();

    let ranked = Ranked::new(&queries, engine.collection());
    let mut scored = Vec::with_capacity(queries.len());
    for q in &queries {
        let retrieved = answers(q, engine.collection());
        scored.push(((*q).clone(), judged_metrics(topic_id, &retrieved, judgments)?));
    }
    let best_idx = best_sets(&scored);
    let best_set = |m: usize| {
        let idx = &best_idx[m];
        BestSet {
            value: idx.first().map_or(0.0, |&i| scored[i].1.get(Metric::ALL[m])),
            queries: idx.iter().map(|&i| canonical_serialize(&scored[i].0)).collect(),
            representative: idx.first().map_or_else(Metrics::default, |&i| scored[i].1),
        }
    };

    let mut selections = BTreeMap::new();
    let mut selected = Vec::new();
    for strategy_kind in Strategy::ALL {
        if let Some(i) = ranked.select(strategy_kind, engine.hierarchy(), strategy) {
            selections.insert(
                strategy_kind,
                ScoredQuery {
                    query: canonical_serialize(queries[i]),
                    result_count: ranked.count(i),
                    metrics: scored[i].1,
                },
            );
            selected.push(queries[i]);
        }
    }
    let best_queries = [0, 1, 2].map(|m| best_idx[m].iter().map(|&i| &scored[i].0).collect::<Vec<_>>());
    let hits = strategy_hits(&selected, &best_queries, engine, edit_mode);

    Ok(TopicResult {
        topic_id: topic_id.to_string(),
        query: topic_query.to_string(),
        tokens: translated.tokens().to_vec(),
        baseline,
        generated: queries.len(),
        truncated: translated.truncated,
        best_precision: best_set(0),
        best_recall: best_set(1),
        best_f1: best_set(2),
        selections,
        hits,
    })
}
