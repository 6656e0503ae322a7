use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{ConceptId, Document, DocumentAnnotations, Statement, Term};
use crate::ontology::{ConceptOntology, PredicateHierarchy};
use crate::translation::{tokenize, TokenizerOptions};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexOptions {
    pub tokenizer: TokenizerOptions,
    /// Ancestors never used as statement endpoints during closure, e.g. a
    /// synthetic top concept such as `Thing`. Concept closure is unaffected.
    pub statement_closure_excludes: BTreeSet<ConceptId>,
}

/// The closed terms, concepts and statements of one document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DocumentView {
    pub terms: BTreeSet<Term>,
    pub concepts: BTreeSet<ConceptId>,
    pub statements: BTreeSet<Statement>,
}

/// Materializes one document: all super-concepts of detected concepts, and
/// every statement obtained by generalizing its subject, object and predicate.
pub fn close_document(
    doc: &Document,
    annotations: &DocumentAnnotations,
    ontology: &ConceptOntology,
    hierarchy: &PredicateHierarchy,
    opts: &IndexOptions,
) -> Result<DocumentView> {
    let unknown = |reason: String| Error::Annotation {
        doc: doc.doc_id.clone(),
        reason,
    };

    let terms = tokenize(&doc.text(), &opts.tokenizer)
        .into_iter()
        .filter_map(|tok| Term::new(tok).ok())
        .collect();

    let mut concepts = BTreeSet::new();
    for c in annotations.detected_concepts() {
        let ancestors = ontology
            .concept_ancestors(c)
            .map_err(|_| unknown(format!("unknown concept `{c}`")))?;
        concepts.insert(c.clone());
        concepts.extend(ancestors.iter().cloned());
    }

    let mut statements = BTreeSet::new();
    for st in annotations.extracted_statements() {
        let generalized = hierarchy
            .predicate_generalizations(st.predicate())
            .map_err(|_| unknown(format!("unknown predicate `{}`", st.predicate())))?;
        let predicates: Vec<_> = std::iter::once(st.predicate()).chain(generalized).collect();
        let subjects = endpoint_closure(st.subject(), ontology, opts);
        let objects = endpoint_closure(st.object(), ontology, opts);
        for s in &subjects {
            for o in &objects {
                if s == o {
                    continue;
                }
                for p in &predicates {
                    statements.insert(Statement::new((*s).clone(), (*p).clone(), (*o).clone())?);
                }
            }
        }
    }

    Ok(DocumentView {
        terms,
        concepts,
        statements,
    })
}

fn endpoint_closure<'a>(c: &'a ConceptId, ontology: &'a ConceptOntology, opts: &IndexOptions) -> Vec<&'a ConceptId> {
    let mut out = vec![c];
    if let Ok(ancestors) = ontology.concept_ancestors(c) {
        out.extend(
            ancestors
                .iter()
                .filter(|a| !opts.statement_closure_excludes.contains(*a)),
        );
    }
    out
}

/// Inverted indexes from terms, concepts and statements to documents.
///
/// Documents are numbered by ascending `doc_id`; every posting list is a
/// strictly increasing sequence of those numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CollectionIndex {
    pub(super) doc_ids: Vec<String>,
    pub(super) terms: BTreeMap<Term, Vec<u32>>,
    pub(super) concepts: BTreeMap<ConceptId, Vec<u32>>,
    pub(super) statements: BTreeMap<Statement, Vec<u32>>,
}

/// Builds the collection index from annotated documents.
pub fn build_collection_index(
    docs: &[(Document, DocumentAnnotations)],
    ontology: &ConceptOntology,
    hierarchy: &PredicateHierarchy,
    opts: &IndexOptions,
) -> Result<CollectionIndex> {
    let mut order: Vec<&(Document, DocumentAnnotations)> = docs.iter().collect();
    order.sort_by(|a, b| a.0.doc_id.cmp(&b.0.doc_id));
    for pair in order.windows(2) {
        if pair[0].0.doc_id == pair[1].0.doc_id {
            return Err(Error::Duplicate(pair[0].0.doc_id.clone()));
        }
    }
    if order.len() > u32::MAX as usize {
        return Err(Error::Invalid("collection exceeds u32 document numbers".into()));
    }

    let mut index = CollectionIndex::default();
    for (number, (doc, annotations)) in order.into_iter().enumerate() {
        if annotations.doc_id() != doc.doc_id {
            return Err(Error::Annotation {
                doc: doc.doc_id.clone(),
                reason: format!("annotations belong to `{}`", annotations.doc_id()),
            });
        }
        let number = number as u32;
        let view = close_document(doc, annotations, ontology, hierarchy, opts)?;
        index.doc_ids.push(doc.doc_id.clone());
        for term in view.terms {
            index.terms.entry(term).or_default().push(number);
        }
        for concept in view.concepts {
            index.concepts.entry(concept).or_default().push(number);
        }
        for statement in view.statements {
            index.statements.entry(statement).or_default().push(number);
        }
    }
    Ok(index)
}

impl CollectionIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    /// Document ids in ascending order; position is the document number.
    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_id(&self, number: u32) -> &str {
        &self.doc_ids[number as usize]
    }

    pub fn term_postings(&self, term: &str) -> &[u32] {
        self.terms.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn concept_postings(&self, concept: &ConceptId) -> &[u32] {
        self.concepts.get(concept).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn statement_postings(&self, statement: &Statement) -> &[u32] {
        self.statements.get(statement).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn support_term(&self, term: &str) -> usize {
        self.term_postings(term).len()
    }

    pub fn support_concept(&self, concept: &ConceptId) -> usize {
        self.concept_postings(concept).len()
    }

    pub fn support_statement(&self, statement: &Statement) -> usize {
        self.statement_postings(statement).len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &[u32])> {
        self.terms.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn concepts(&self) -> impl Iterator<Item = (&ConceptId, &[u32])> {
        self.concepts.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn statements(&self) -> impl Iterator<Item = (&Statement, &[u32])> {
        self.statements.iter().map(|(k, v)| (k, v.as_slice()))
    }
}
