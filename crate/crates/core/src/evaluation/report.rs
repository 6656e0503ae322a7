use std::fmt::{self, Write as _};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{evaluate_topic, HitFlags, Metric, MetricFlags, Metrics, TermConceptEdit, TopicResult};
use crate::engine::{CorpusPaths, Engine};
use crate::error::Result;
use crate::indexing::IndexOptions;
use crate::ingestion::{load_qrels, load_topics, Qrels, Topic};
use crate::strategies::{RankOrder, StrategyOptions};
use crate::translation::TranslationOptions;

pub const REPORT_SCHEMA: &str = "narrative-eval-report/v1";

#[derive(Clone, Debug)]
pub struct BenchmarkPaths {
    pub corpus: CorpusPaths,
    pub topics: PathBuf,
    pub qrels: PathBuf,
}

#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    /// Name printed in the report header.
    pub benchmark: String,
    pub index: IndexOptions,
    pub translation: TranslationOptions,
    pub strategy: StrategyOptions,
    pub edit_mode: TermConceptEdit,
}

/// The options that influence the numbers, echoed into the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub tau: usize,
    pub consider_permutations: bool,
    pub replace_punctuation: bool,
    pub remove_stopwords: bool,
    pub statement_rank: RankOrder,
    pub edit_mode: TermConceptEdit,
}

/// Mean precision, recall and F1 of the term baseline and of the best
/// query for each metric. Rows are metrics, columns are query sources.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub term_baseline: Metrics,
    pub best_precision: Metrics,
    pub best_recall: Metrics,
    pub best_f1: Metrics,
}

/// Number of topics where a strategy selected a best query.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRow {
    pub topics: usize,
    pub best_precision: usize,
    pub best_recall: usize,
    pub best_f1: usize,
    pub any: usize,
}

impl HitRow {
    fn add(&mut self, flags: &MetricFlags) {
        self.topics += 1;
        self.best_precision += usize::from(flags.precision);
        self.best_recall += usize::from(flags.recall);
        self.best_f1 += usize::from(flags.f1);
        self.any += usize::from(flags.any());
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2 {
    pub exact: HitRow,
    pub term_concept_edit: HitRow,
    pub predicate_edit: HitRow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: String,
    pub benchmark: String,
    pub settings: ReportSettings,
    pub topic_count: usize,
    /// Topics skipped because the qrels hold no judgment for them.
    pub unjudged_topics: Vec<String>,
    pub table1: Table1,
    pub table2: Table2,
    pub topics: Vec<TopicResult>,
}

/// Loads a benchmark from disk and evaluates every topic.
pub fn run_benchmark(paths: &BenchmarkPaths, opts: &EvalOptions) -> Result<EvalReport> {
    let topics = load_topics(&paths.topics)?;
    let qrels = load_qrels(&paths.qrels)?;
    let engine = Engine::load(&paths.corpus, opts.index.clone())?;
    evaluate(&engine, &topics, &qrels, opts)
}

/// Evaluates `topics` in input order against an already loaded engine.
pub fn evaluate(engine: &Engine, topics: &[Topic], qrels: &Qrels, opts: &EvalOptions) -> Result<EvalReport> {
    opts.translation.validate()?;
    let mut results = Vec::new();
    let mut unjudged = Vec::new();
    for topic in topics {
        match qrels.topic(&topic.topic_id).filter(|j| !j.is_empty()) {
            Some(judgments) => results.push(evaluate_topic(
                &topic.topic_id,
                &topic.query,
                engine,
                judgments,
                &opts.translation,
                &opts.strategy,
                opts.edit_mode,
            )?),
            None => unjudged.push(topic.topic_id.clone()),
        }
    }
    Ok(EvalReport {
        schema: REPORT_SCHEMA.to_string(),
        benchmark: opts.benchmark.clone(),
        settings: ReportSettings {
            tau: opts.translation.tau,
            consider_permutations: opts.translation.consider_permutations,
            replace_punctuation: engine.tokenizer().replace_punctuation,
            remove_stopwords: engine.tokenizer().remove_stopwords,
            statement_rank: opts.strategy.statement_rank,
            edit_mode: opts.edit_mode,
        },
        topic_count: results.len(),
        unjudged_topics: unjudged,
        table1: table1(&results),
        table2: table2(&results),
        topics: results,
    })
}

fn mean(results: &[TopicResult], pick: impl Fn(&TopicResult) -> Metrics) -> Metrics {
    if results.is_empty() {
        return Metrics::default();
    }
    let n = results.len() as f64;
    let mut sum = Metrics::default();
    for r in results {
        let m = pick(r);
        sum.precision += m.precision;
        sum.recall += m.recall;
        sum.f1 += m.f1;
    }
    Metrics { precision: sum.precision / n, recall: sum.recall / n, f1: sum.f1 / n }
}

fn table1(results: &[TopicResult]) -> Table1 {
    Table1 {
        term_baseline: mean(results, |r| r.baseline),
        best_precision: mean(results, |r| r.best(Metric::Precision).representative),
        best_recall: mean(results, |r| r.best(Metric::Recall).representative),
        best_f1: mean(results, |r| r.best(Metric::F1).representative),
    }
}

fn table2(results: &[TopicResult]) -> Table2 {
    let mut t = Table2::default();
    for r in results {
        let HitFlags { exact, term_concept_edit, predicate_edit } = &r.hits;
        t.exact.add(exact);
        t.term_concept_edit.add(term_concept_edit);
        t.predicate_edit.add(predicate_edit);
    }
    t
}

impl EvalReport {
    /// Pretty JSON with a trailing newline. Identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Aligned plain-text tables.
    pub fn render_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.benchmark.is_empty() { "benchmark" } else { &self.benchmark };
        writeln!(f, "{name}: {} judged topics", self.topic_count)?;
        if !self.unjudged_topics.is_empty() {
            writeln!(f, "skipped without judgments: {}", self.unjudged_topics.join(", "))?;
        }
        writeln!(f)?;
        writeln!(f, "Highest-achievable retrieval quality")?;
        writeln!(f, "{:<8}{:>8}{:>8}{:>8}{:>8}", "Metric", "TermB", "BestP", "BestR", "BestF1")?;
        let t = &self.table1;
        for (label, metric) in [("Prec.", Metric::Precision), ("Rec.", Metric::Recall), ("F1", Metric::F1)] {
            writeln!(
                f,
                "{label:<8}{:>8.2}{:>8.2}{:>8.2}{:>8.2}",
                t.term_baseline.get(metric),
                t.best_precision.get(metric),
                t.best_recall.get(metric),
                t.best_f1.get(metric)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "Topics where a strategy selected a best query")?;
        writeln!(f, "{:<24}{:>6}{:>8}{:>8}{:>8}{:>6}", "Selection", "|Q|", "BestP", "BestR", "BestF1", "Any")?;
        for (label, row) in [
            ("Exact", &self.table2.exact),
            ("One term/concept edit", &self.table2.term_concept_edit),
            ("One predicate edit", &self.table2.predicate_edit),
        ] {
            writeln!(
                f,
                "{label:<24}{:>6}{:>8}{:>8}{:>8}{:>6}",
                row.topics, row.best_precision, row.best_recall, row.best_f1, row.any
            )?;
        }
        if !self.topics.is_empty() {
            writeln!(f)?;
            writeln!(f, "Per topic")?;
            let mut line = String::new();
            for r in &self.topics {
                line.clear();
                let _ = write!(
                    line,
                    "{:<10}{:>6} queries  P {:.2}  R {:.2}  F1 {:.2}  exact {}",
                    r.topic_id,
                    r.generated,
                    r.best_precision.value,
                    r.best_recall.value,
                    r.best_f1.value,
                    flags(&r.hits.exact)
                );
                if r.truncated {
                    line.push_str("  (truncated)");
                }
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

fn flags(m: &MetricFlags) -> String {
    [(m.precision, 'P'), (m.recall, 'R'), (m.f1, 'F')]
        .iter()
        .map(|&(on, c)| if on { c } else { '-' })
        .collect()
}
