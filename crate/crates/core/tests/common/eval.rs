//! Reference evaluation: every number recomputed from document scans.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use narrative_core::ingestion::{load_concepts, load_documents, load_predicates, load_qrels, load_topics};
use narrative_core::evaluation::{EvalReport, Metric, MetricFlags, Metrics};
use narrative_core::{canonical_serialize, NarrativeQuery, Strategy, Term};

use super::{Oracle, Triple};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Prf {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

impl Prf {
    pub fn get(&self, m: usize) -> f64 {
        [self.p, self.r, self.f1][m]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TopicOracle {
    pub topic_id: String,
    pub baseline: Prf,
    /// Best sets for precision, recall and F1, as sorted canonical keys.
    pub best: [Vec<String>; 3],
    pub best_value: [f64; 3],
    pub representative: [Prf; 3],
    /// (strategy name, key, result count, metrics)
    pub selections: Vec<(&'static str, String, usize, Prf)>,
    /// exact, term/concept edit, predicate edit; each over P, R, F1.
    pub hits: [[bool; 3]; 3],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportOracle {
    pub topics: Vec<TopicOracle>,
    /// Rows: precision, recall, F1. Columns: baseline, best P, best R, best F1.
    pub table1: [[f64; 4]; 3],
    /// Rows: exact, term/concept edit, predicate edit. Columns: |Q|, P, R, F1, Any.
    pub table2: [[usize; 5]; 3],
}

pub fn score(retrieved: &[String], judgments: &BTreeMap<String, i32>) -> Prf {
    let relevant: BTreeSet<&String> = judgments.iter().filter(|(_, g)| **g >= 1).map(|(d, _)| d).collect();
    let judged: BTreeSet<&String> = judgments.keys().collect();
    let retrieved: BTreeSet<&String> = retrieved.iter().collect();
    let hits = retrieved.intersection(&relevant).count();
    let judged_retrieved = retrieved.intersection(&judged).count();
    let p = if judged_retrieved == 0 { 0.0 } else { hits as f64 / judged_retrieved as f64 };
    let r = if relevant.is_empty() { 0.0 } else { hits as f64 / relevant.len() as f64 };
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    Prf { p, r, f1 }
}

fn statements(q: &NarrativeQuery) -> BTreeSet<Triple> {
    q.statements()
        .iter()
        .map(|s| (s.subject().to_string(), s.predicate().to_string(), s.object().to_string()))
        .collect()
}

fn concepts(q: &NarrativeQuery) -> BTreeSet<String> {
    q.concepts().iter().map(|c| c.to_string()).collect()
}

fn terms(q: &NarrativeQuery) -> BTreeSet<String> {
    q.terms().iter().map(|t| t.to_string()).collect()
}

fn without<T: Ord + Clone>(set: &BTreeSet<T>, x: &T) -> BTreeSet<T> {
    let mut s = set.clone();
    s.remove(x);
    s
}

fn with<T: Ord + Clone>(set: &BTreeSet<T>, x: &T) -> BTreeSet<T> {
    let mut s = set.clone();
    s.insert(x.clone());
    s
}

impl Oracle {
    /// `a` has concept `c` where `b` has term `t`, with `t` a label of `c`.
    fn concept_became_term(&self, a: &NarrativeQuery, b: &NarrativeQuery) -> bool {
        let (ca, cb, ta, tb) = (concepts(a), concepts(b), terms(a), terms(b));
        for c in &ca {
            for t in &tb {
                let labelled = self.concept_labels[c].iter().any(|l| l == t);
                if labelled && !cb.contains(c) && !ta.contains(t) && without(&ca, c) == cb && with(&ta, t) == tb {
                    return true;
                }
            }
        }
        false
    }

    pub fn term_concept_edit(&self, a: &NarrativeQuery, b: &NarrativeQuery) -> bool {
        statements(a) == statements(b)
            && (a == b || self.concept_became_term(a, b) || self.concept_became_term(b, a))
    }

    pub fn predicate_edit(&self, a: &NarrativeQuery, b: &NarrativeQuery) -> bool {
        if concepts(a) != concepts(b) {
            return false;
        }
        if a == b {
            return true;
        }
        let (sa, sb) = (statements(a), statements(b));
        sa.iter().any(|x| {
            sb.iter()
                .any(|y| x.0 == y.0 && x.2 == y.2 && x.1 != y.1 && without(&sa, x) == without(&sb, y))
        })
    }

    fn is_root(&self, p: &str) -> bool {
        self.predicate_parents[p].is_empty()
    }

    fn has_hierarchy(&self) -> bool {
        self.predicate_parents.values().any(|ps| !ps.is_empty())
    }

    /// Maximal result count, smallest key among ties.
    fn pick<'q>(&self, queries: &'q [NarrativeQuery], admit: impl Fn(&NarrativeQuery) -> bool) -> Option<&'q NarrativeQuery> {
        let counts: Vec<usize> = queries.iter().map(|q| self.answers(q).len()).collect();
        let admitted: Vec<usize> = (0..queries.len()).filter(|&i| admit(&queries[i])).collect();
        let max = admitted.iter().map(|&i| counts[i]).max()?;
        admitted
            .into_iter()
            .filter(|&i| counts[i] == max)
            .map(|i| &queries[i])
            .min_by_key(|q| canonical_serialize(q))
    }

    pub fn evaluate_topic(
        &self,
        topic_id: &str,
        tokens: &[String],
        judgments: &BTreeMap<String, i32>,
    ) -> TopicOracle {
        let baseline_query =
            NarrativeQuery::new([], [], tokens.iter().map(|t| Term::new(t).unwrap())).unwrap();
        let baseline = score(&self.answers(&baseline_query), judgments);

        let mut queries: Vec<NarrativeQuery> = self
            .translate(tokens, 0, false)
            .into_iter()
            .map(|key| self.parse_key(&key))
            .collect();
        queries.sort_by_key(canonical_serialize);
        let scores: Vec<Prf> = queries.iter().map(|q| score(&self.answers(q), judgments)).collect();

        let mut best: [Vec<String>; 3] = Default::default();
        let mut best_value = [0.0; 3];
        let mut representative = [Prf::default(); 3];
        let mut best_queries: [Vec<&NarrativeQuery>; 3] = Default::default();
        for m in 0..3 {
            let max = scores.iter().map(|s| s.get(m)).fold(f64::NEG_INFINITY, f64::max);
            for (i, q) in queries.iter().enumerate() {
                if scores[i].get(m) == max {
                    if best[m].is_empty() {
                        representative[m] = scores[i];
                        best_value[m] = max;
                    }
                    best[m].push(canonical_serialize(q));
                    best_queries[m].push(q);
                }
            }
        }

        let with_statements = |q: &NarrativeQuery| !q.statements().is_empty() && !self.answers(q).is_empty();
        let specific = |q: &NarrativeQuery| {
            with_statements(q) && (!self.has_hierarchy() || statements(q).iter().all(|s| !self.is_root(&s.1)))
        };
        let picks = [
            ("most-supported", self.pick(&queries, |_| true)),
            ("mixed", self.pick(&queries, with_statements)),
            ("specific", self.pick(&queries, specific)),
        ];
        let mut selections = Vec::new();
        let mut selected = Vec::new();
        for (name, q) in picks {
            if let Some(q) = q {
                let i = queries.iter().position(|x| x == q).unwrap();
                selections.push((name, canonical_serialize(q), self.answers(q).len(), scores[i]));
                selected.push(q);
            }
        }

        let mut hits = [[false; 3]; 3];
        for m in 0..3 {
            for s in &selected {
                for b in &best_queries[m] {
                    hits[0][m] |= s == b;
                    hits[1][m] |= self.term_concept_edit(s, b);
                    hits[2][m] |= self.predicate_edit(s, b);
                }
            }
        }
        TopicOracle {
            topic_id: topic_id.to_string(),
            baseline,
            best,
            best_value,
            representative,
            selections,
            hits,
        }
    }

    fn parse_key(&self, key: &str) -> NarrativeQuery {
        // Keys built by the oracle never need escaping.
        let (s, rest) = key.strip_prefix("S:").unwrap().split_once("|C:").unwrap();
        let (c, t) = rest.split_once("|T:").unwrap();
        let items = |x: &str| -> Vec<String> {
            x.split(';').filter(|i| !i.is_empty()).map(str::to_string).collect()
        };
        let statements: Vec<Triple> = items(s)
            .into_iter()
            .map(|st| {
                let parts: Vec<&str> = st.split(',').collect();
                (parts[0].to_string(), parts[1].to_string(), parts[2].to_string())
            })
            .collect();
        super::build_query(&statements, &items(c).into_iter().collect(), &items(t).into_iter().collect())
    }
}

/// Evaluates a benchmark directory holding the corpus, `topics.jsonl` and `qrels.txt`.
pub fn evaluate_dir(dir: &Path, tokenize: impl Fn(&str) -> Vec<String>) -> ReportOracle {
    let concepts: Vec<_> = load_concepts(dir.join("concepts.jsonl")).unwrap().iter().cloned().collect();
    let predicates: Vec<_> = load_predicates(dir.join("predicates.jsonl")).unwrap().iter().cloned().collect();
    let docs = load_documents(dir.join("documents.jsonl")).unwrap();
    let topics = load_topics(dir.join("topics.jsonl")).unwrap();
    let qrels = load_qrels(dir.join("qrels.txt")).unwrap();
    let oracle = Oracle::new(&concepts, &predicates, &docs, &BTreeSet::new());

    let mut out = ReportOracle::default();
    for topic in &topics {
        let Some(judgments) = qrels.topic(&topic.topic_id) else { continue };
        out.topics.push(oracle.evaluate_topic(&topic.topic_id, &tokenize(&topic.query), judgments));
    }
    let n = out.topics.len();
    if n > 0 {
        for m in 0..3 {
            let mean = |f: &dyn Fn(&TopicOracle) -> f64| out.topics.iter().map(f).sum::<f64>() / n as f64;
            out.table1[m] = [
                mean(&|t| t.baseline.get(m)),
                mean(&|t| t.representative[0].get(m)),
                mean(&|t| t.representative[1].get(m)),
                mean(&|t| t.representative[2].get(m)),
            ];
        }
    }
    for kind in 0..3 {
        let row = &mut out.table2[kind];
        row[0] = n;
        for t in &out.topics {
            for m in 0..3 {
                row[m + 1] += usize::from(t.hits[kind][m]);
            }
            row[4] += usize::from(t.hits[kind].iter().any(|h| *h));
        }
    }
    out
}

/// Every difference between a report and the reference numbers.
pub fn discrepancies(report: &EvalReport, oracle: &ReportOracle) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |what: String, same: bool| {
        if !same {
            out.push(what);
        }
    };
    let prf = |m: &Metrics| Prf { p: m.precision, r: m.recall, f1: m.f1 };

    check("topic count".into(), report.topics.len() == oracle.topics.len());
    for (r, o) in report.topics.iter().zip(&oracle.topics) {
        let id = &o.topic_id;
        check(format!("{id}: topic id"), r.topic_id == o.topic_id);
        check(format!("{id}: baseline"), prf(&r.baseline) == o.baseline);
        for (m, metric) in Metric::ALL.into_iter().enumerate() {
            let best = r.best(metric);
            check(format!("{id}: best set {metric:?}"), best.queries == o.best[m]);
            check(format!("{id}: best value {metric:?}"), best.value == o.best_value[m]);
            check(format!("{id}: representative {metric:?}"), prf(&best.representative) == o.representative[m]);
        }
        let selections: Vec<(&'static str, String, usize, Prf)> = Strategy::ALL
            .iter()
            .rev()
            .filter_map(|s| r.selections.get(s).map(|q| (s.as_str(), q.query.clone(), q.result_count, prf(&q.metrics))))
            .collect();
        check(format!("{id}: selections {selections:?} vs {:?}", o.selections), selections == o.selections);
        let flags = |f: &MetricFlags| [f.precision, f.recall, f.f1];
        let hits = [flags(&r.hits.exact), flags(&r.hits.term_concept_edit), flags(&r.hits.predicate_edit)];
        check(format!("{id}: hits {hits:?} vs {:?}", o.hits), hits == o.hits);
    }
    let t = &report.table1;
    for (m, metric) in Metric::ALL.into_iter().enumerate() {
        let row = [
            t.term_baseline.get(metric),
            t.best_precision.get(metric),
            t.best_recall.get(metric),
            t.best_f1.get(metric),
        ];
        check(format!("table 1 row {metric:?}: {row:?} vs {:?}", oracle.table1[m]), row == oracle.table1[m]);
    }
    let t = &report.table2;
    for (k, row) in [&t.exact, &t.term_concept_edit, &t.predicate_edit].into_iter().enumerate() {
        let row = [row.topics, row.best_precision, row.best_recall, row.best_f1, row.any];
        check(format!("table 2 row {k}: {row:?} vs {:?}", oracle.table2[k]), row == oracle.table2[k]);
    }
    out
}
