//! Label indexes for concepts and predicates, and the document collection
//! index with materialized ontology closures.

mod collection;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet};

pub use collection::{build_collection_index, close_document, CollectionIndex, DocumentView, IndexOptions};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_VERSION};

use crate::model::{ConceptId, PredicateId};
use crate::ontology::{ConceptOntology, PredicateHierarchy};

/// Lowercases, trims and collapses internal whitespace runs to one space.
/// Punctuation is kept.
pub fn normalize_label(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Maps normalized labels to the identifiers carrying them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelIndex<Id> {
    entries: BTreeMap<String, BTreeSet<Id>>,
    max_label_tokens: usize,
}

impl<Id> Default for LabelIndex<Id> {
    fn default() -> Self {
        LabelIndex {
            entries: BTreeMap::new(),
            max_label_tokens: 0,
        }
    }
}

impl<Id: Ord + Clone> LabelIndex<Id> {
    pub fn insert(&mut self, label: &str, id: Id) {
        let key = normalize_label(label);
        if key.is_empty() {
            return;
        }
        self.max_label_tokens = self.max_label_tokens.max(key.split(' ').count());
        self.entries.entry(key).or_default().insert(id);
    }

    /// Identifiers for an already normalized label.
    pub fn get(&self, normalized: &str) -> Option<&BTreeSet<Id>> {
        self.entries.get(normalized)
    }

    /// Normalizes `raw` before the lookup.
    pub fn lookup(&self, raw: &str) -> Option<&BTreeSet<Id>> {
        self.entries.get(&normalize_label(raw))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BTreeSet<Id>)> {
        self.entries.iter()
    }

    /// Token count of the longest label.
    pub fn max_label_tokens(&self) -> usize {
        self.max_label_tokens
    }
}

pub type ConceptIndex = LabelIndex<ConceptId>;
pub type PredicateIndex = LabelIndex<PredicateId>;

/// Every preferred label and synonym, normalized, mapped to its concept.
pub fn build_concept_index(ontology: &ConceptOntology) -> ConceptIndex {
    let mut index = LabelIndex::default();
    for concept in ontology.iter() {
        for label in concept.labels() {
            index.insert(label, concept.id.clone());
        }
    }
    index
}

pub fn build_predicate_index(hierarchy: &PredicateHierarchy) -> PredicateIndex {
    let mut index = LabelIndex::default();
    for predicate in hierarchy.iter() {
        for label in predicate.labels() {
            index.insert(label, predicate.id.clone());
        }
    }
    index
}
