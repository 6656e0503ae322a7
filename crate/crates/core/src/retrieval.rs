//! Boolean match semantics: a document answers a query when it contains every
//! statement, concept and term of it.

use crate::indexing::{CollectionIndex, DocumentView};
use crate::model::NarrativeQuery;

pub fn matches(doc: &DocumentView, q: &NarrativeQuery) -> bool {
    q.statements().is_subset(&doc.statements)
        && q.concepts().is_subset(&doc.concepts)
        && q.terms().is_subset(&doc.terms)
}

/// Document numbers answering `q`, ascending. The empty query answers every document.
pub fn answer_numbers(q: &NarrativeQuery, index: &CollectionIndex) -> Vec<u32> {
    let mut lists: Vec<&[u32]> = q
        .statements()
        .iter()
        .map(|s| index.statement_postings(s))
        .chain(q.concepts().iter().map(|c| index.concept_postings(c)))
        .chain(q.terms().iter().map(|t| index.term_postings(t.as_str())))
        .collect();
    if lists.is_empty() {
        return (0..index.doc_count() as u32).collect();
    }
    lists.sort_by_key(|l| l.len());
    let mut acc = lists[0].to_vec();
    for list in &lists[1..] {
        if acc.is_empty() {
            break;
        }
        acc = intersect(&acc, list);
    }
    acc
}

/// Document ids answering `q` in ascending order.
pub fn answers(q: &NarrativeQuery, index: &CollectionIndex) -> Vec<String> {
    answer_numbers(q, index)
        .into_iter()
        .map(|n| index.doc_id(n).to_string())
        .collect()
}

pub fn result_count(q: &NarrativeQuery, index: &CollectionIndex) -> usize {
    answer_numbers(q, index).len()
}

/// Intersection of two strictly increasing lists; gallops through the longer one.
fn intersect(short: &[u32], long: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(short.len().min(long.len()));
    let mut rest = long;
    for &x in short {
        match rest.binary_search(&x) {
            Ok(pos) => {
                out.push(x);
                rest = &rest[pos + 1..];
            }
            Err(pos) => rest = &rest[pos..],
        }
        if rest.is_empty() {
            break;
        }
    }
    out
}
