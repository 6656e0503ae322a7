use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{MappingResult, TokenSpan, TranslationOptions};
use crate::error::Result;
use crate::indexing::CollectionIndex;
use crate::model::{canonical_serialize, ConceptId, NarrativeQuery, PredicateId, Statement, Term};

/// One generated query together with how each token was used.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratedQuery {
    pub query: NarrativeQuery,
    pub concept_spans: Vec<(TokenSpan, ConceptId)>,
    pub predicate_spans: Vec<(TokenSpan, PredicateId)>,
    /// Token positions kept as terms.
    pub term_tokens: Vec<usize>,
    /// Token positions dropped because their term support is at most tau.
    pub excluded: Vec<usize>,
    pub excluded_tokens: Vec<String>,
}

impl AsRef<NarrativeQuery> for GeneratedQuery {
    fn as_ref(&self) -> &NarrativeQuery {
        &self.query
    }
}

#[derive(Clone, Debug, Default)]
pub struct Generation {
    /// Ascending canonical order, deduplicated.
    pub queries: Vec<GeneratedQuery>,
    pub truncated: bool,
}

#[derive(Clone, Debug)]
enum Target {
    Concept(ConceptId),
    Predicate(PredicateId),
}

struct Generator<'a> {
    mapping: &'a MappingResult,
    opts: &'a TranslationOptions,
    spans: Vec<(&'a TokenSpan, u64, Vec<Target>)>,
    term_supported: Vec<bool>,
    by_pair: &'a BTreeMap<(&'a ConceptId, &'a ConceptId), Vec<&'a Statement>>,
    out: BTreeMap<String, GeneratedQuery>,
    all_terms_key: Option<String>,
    combinations: usize,
    exhausted: bool,
    truncated: bool,
}

/// Generation phase.
///
/// 1. Every set of non-overlapping spans, each mapped to one of its concepts
///    or predicates; leaving a span unmapped is always an option.
/// 2. Unmapped tokens become terms when their support exceeds tau and are
///    recorded as excluded otherwise.
/// 3. Every selection of supported statements between query concepts with at
///    most one predicate per ordered concept pair.
/// 4. Queries whose predicate keywords are not used by an included statement
///    are dropped.
///
/// Output is deduplicated by canonical form. When more than `max_queries`
/// distinct queries exist, the canonically smallest are kept, plus the
/// all-terms query.
pub fn generate_queries(
    mapping: &MappingResult,
    collection: &CollectionIndex,
    opts: &TranslationOptions,
) -> Result<Generation> {
    opts.validate()?;

    let mut grouped: BTreeMap<&TokenSpan, Vec<Target>> = BTreeMap::new();
    for (span, concepts) in &mapping.concept_mappings {
        grouped
            .entry(span)
            .or_default()
            .extend(concepts.iter().cloned().map(Target::Concept));
    }
    for (span, predicates) in &mapping.predicate_mappings {
        grouped
            .entry(span)
            .or_default()
            .extend(predicates.iter().cloned().map(Target::Predicate));
    }

    let mut by_pair: BTreeMap<(&ConceptId, &ConceptId), Vec<&Statement>> = BTreeMap::new();
    for st in &mapping.possible_statements {
        by_pair.entry((st.subject(), st.object())).or_default().push(st);
    }

    let mut generator = Generator {
        mapping,
        opts,
        spans: grouped
            .into_iter()
            .map(|(span, targets)| (span, span.mask(), targets))
            .collect(),
        term_supported: mapping
            .tokens
            .iter()
            .map(|t| collection.support_term(t) > opts.tau)
            .collect(),
        by_pair: &by_pair,
        out: BTreeMap::new(),
        all_terms_key: None,
        combinations: 0,
        exhausted: false,
        truncated: false,
    };
    generator.assign(0, 0, &mut Vec::new());

    Ok(Generation {
        queries: generator.out.into_values().collect(),
        truncated: generator.truncated || generator.exhausted,
    })
}

impl<'a> Generator<'a> {
    fn assign(&mut self, next: usize, used: u64, chosen: &mut Vec<(usize, Target)>) {
        if self.exhausted {
            return;
        }
        if next == self.spans.len() {
            self.integrate(used, chosen);
            return;
        }
        self.assign(next + 1, used, chosen);
        let mask = self.spans[next].1;
        if used & mask != 0 {
            return;
        }
        for t in 0..self.spans[next].2.len() {
            chosen.push((next, self.spans[next].2[t].clone()));
            self.assign(next + 1, used | mask, chosen);
            chosen.pop();
        }
    }

    fn integrate(&mut self, used: u64, chosen: &[(usize, Target)]) {
        let mut concepts = BTreeSet::new();
        let mut predicates = BTreeSet::new();
        for (_, target) in chosen {
            match target {
                Target::Concept(c) => {
                    concepts.insert(c.clone());
                }
                Target::Predicate(p) => {
                    predicates.insert(p.clone());
                }
            }
        }
        if concepts.len() < 2 && !predicates.is_empty() {
            return;
        }

        let mut terms = BTreeSet::new();
        let mut term_tokens = Vec::new();
        let mut excluded = Vec::new();
        for (i, token) in self.mapping.tokens.iter().enumerate() {
            if used & (1 << i) != 0 {
                continue;
            }
            if self.term_supported[i] {
                if let Ok(term) = Term::new(token) {
                    terms.insert(term);
                    term_tokens.push(i);
                    continue;
                }
            }
            excluded.push(i);
        }

        let by_pair = self.by_pair;
        let pairs: Vec<&Vec<&Statement>> = by_pair
            .iter()
            .filter(|((s, o), _)| concepts.contains(*s) && concepts.contains(*o))
            .map(|(_, sts)| sts)
            .collect();

        let shape = Shape {
            chosen,
            concepts: &concepts,
            predicates: &predicates,
            terms: &terms,
            term_tokens: &term_tokens,
            excluded: &excluded,
        };
        self.statements(&shape, &pairs, 0, &mut Vec::new());
    }

    fn statements(&mut self, shape: &Shape<'_>, pairs: &[&Vec<&Statement>], next: usize, picked: &mut Vec<Statement>) {
        if self.exhausted {
            return;
        }
        if next == pairs.len() {
            self.combinations += 1;
            if self.combinations > self.opts.max_combinations {
                self.exhausted = true;
                return;
            }
            let covered = shape
                .predicates
                .iter()
                .all(|p| picked.iter().any(|st| st.predicate() == p));
            if covered {
                self.emit(shape, picked);
            }
            return;
        }
        self.statements(shape, pairs, next + 1, picked);
        for st in pairs[next] {
            picked.push((*st).clone());
            self.statements(shape, pairs, next + 1, picked);
            picked.pop();
        }
    }

    fn emit(&mut self, shape: &Shape<'_>, picked: &[Statement]) {
        let query = NarrativeQuery::from_parts(
            picked.iter().cloned().collect(),
            shape.concepts.clone(),
            shape.terms.clone(),
        );
        if query.is_empty() {
            return;
        }
        let key = canonical_serialize(&query);
        if shape.chosen.is_empty() && picked.is_empty() {
            self.all_terms_key = Some(key.clone());
        }
        if let Some(existing) = self.out.get(&key) {
            if existing.excluded.len() <= shape.excluded.len() {
                return;
            }
        }

        let mut concept_spans = Vec::new();
        let mut predicate_spans = Vec::new();
        for (span_idx, target) in shape.chosen {
            let span = self.spans[*span_idx].0.clone();
            match target {
                Target::Concept(c) => concept_spans.push((span, c.clone())),
                Target::Predicate(p) => predicate_spans.push((span, p.clone())),
            }
        }
        let generated = GeneratedQuery {
            query,
            concept_spans,
            predicate_spans,
            term_tokens: shape.term_tokens.to_vec(),
            excluded: shape.excluded.to_vec(),
            excluded_tokens: shape
                .excluded
                .iter()
                .map(|&i| self.mapping.tokens[i].clone())
                .collect(),
        };
        self.out.insert(key, generated);

        if self.out.len() > self.opts.max_queries {
            self.truncated = true;
            let mut drop = self.out.keys().next_back().cloned();
            if drop.is_some() && drop == self.all_terms_key {
                drop = self.out.keys().rev().nth(1).cloned();
            }
            if let Some(k) = drop {
                self.out.remove(&k);
            }
        }
    }
}

struct Shape<'s> {
    chosen: &'s [(usize, Target)],
    concepts: &'s BTreeSet<ConceptId>,
    predicates: &'s BTreeSet<PredicateId>,
    terms: &'s BTreeSet<Term>,
    term_tokens: &'s [usize],
    excluded: &'s [usize],
}
