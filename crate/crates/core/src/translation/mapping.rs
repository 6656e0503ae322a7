use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Indexes, TranslationOptions};
use crate::error::{Error, Result};
use crate::indexing::normalize_label;
use crate::model::{ConceptId, PredicateId, Statement};

/// A group of tokens looked up as one label, in arrangement order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TokenSpan {
    pub indices: Vec<usize>,
    pub surface: String,
}

impl TokenSpan {
    fn new(indices: Vec<usize>, tokens: &[String]) -> Self {
        let surface = indices
            .iter()
            .map(|&i| tokens[i].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        TokenSpan { indices, surface }
    }

    pub(crate) fn mask(&self) -> u64 {
        self.indices.iter().fold(0, |m, &i| m | (1 << i))
    }
}

#[derive(Clone, Debug, Default)]
pub struct MappingResult {
    pub tokens: Vec<String>,
    pub concept_mappings: BTreeMap<TokenSpan, BTreeSet<ConceptId>>,
    pub predicate_mappings: BTreeMap<TokenSpan, BTreeSet<PredicateId>>,
    pub possible_statements: Vec<Statement>,
    /// Every span looked up, in lookup order.
    pub checked_spans: Vec<TokenSpan>,
}

impl MappingResult {
    pub fn mapped_concepts(&self) -> BTreeSet<&ConceptId> {
        self.concept_mappings.values().flatten().collect()
    }
}

/// Mapping phase: span lookup against both label indexes, then the list of
/// supported statements between every ordered pair of mapped concepts.
pub fn map_tokens(tokens: &[String], indexes: Indexes<'_>, opts: &TranslationOptions) -> Result<MappingResult> {
    opts.validate()?;
    if tokens.len() > opts.max_tokens {
        return Err(Error::TokenLimit {
            found: tokens.len(),
            limit: opts.max_tokens,
        });
    }

    let spans = if opts.consider_permutations {
        let bound = indexes
            .concepts
            .max_label_tokens()
            .max(indexes.predicates.max_label_tokens())
            .min(tokens.len());
        arrangements(tokens.len(), bound)
    } else {
        windows(tokens.len())
    };

    let collection = indexes.collection;
    let mut result = MappingResult {
        tokens: tokens.to_vec(),
        ..MappingResult::default()
    };
    for indices in spans {
        let span = TokenSpan::new(indices, tokens);
        let key = normalize_label(&span.surface);
        if let Some(ids) = indexes.concepts.get(&key) {
            let supported: BTreeSet<ConceptId> = ids
                .iter()
                .filter(|c| collection.support_concept(c) > opts.tau)
                .cloned()
                .collect();
            if !supported.is_empty() {
                result.concept_mappings.insert(span.clone(), supported);
            }
        }
        if let Some(ids) = indexes.predicates.get(&key) {
            result.predicate_mappings.insert(span.clone(), ids.clone());
        }
        result.checked_spans.push(span);
    }

    let concepts = result.mapped_concepts();
    let mut possible = Vec::new();
    for &subject in &concepts {
        for &object in &concepts {
            if subject == object {
                continue;
            }
            for predicate in indexes.hierarchy.ids() {
                let st = Statement::new(subject.clone(), predicate.clone(), object.clone())?;
                if collection.support_statement(&st) > opts.tau {
                    possible.push(st);
                }
            }
        }
    }
    result.possible_statements = possible;
    Ok(result)
}

/// Contiguous windows of every length, grouped by end position and growing
/// leftwards: for `a b c` that is `a`, `b`, `a b`, `c`, `b c`, `a b c`.
fn windows(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for end in 0..n {
        for start in (0..=end).rev() {
            out.push((start..=end).collect());
        }
    }
    out
}

/// Ordered arrangements of distinct token positions with length `1..=max_len`.
fn arrangements(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, max_len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == max_len {
            return;
        }
        for i in 0..n {
            if !current.contains(&i) {
                current.push(i);
                extend(n, max_len, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, max_len, &mut Vec::new(), &mut out);
    out
}
