//! Keyword to narrative query translation and Boolean graph-pattern retrieval
//! over documents annotated with concepts and statements.
//!
//! A [`NarrativeQuery`] asks for documents containing a set of statements
//! `(subject, predicate, object)`, a set of concepts and a set of terms. The
//! [`translation`] module turns a keyword string into every such query the
//! indexes support, [`strategies`] picks the candidates shown to a user and
//! [`evaluation`] scores them against relevance judgments.

pub mod engine;
pub mod error;
pub mod evaluation;
pub mod indexing;
pub mod ingestion;
pub mod model;
pub mod ontology;
pub mod retrieval;
pub mod strategies;
pub mod translation;

pub use engine::{CorpusPaths, Engine};
pub use error::{Error, Result};
pub use indexing::{CollectionIndex, IndexOptions};
pub use model::{
    canonical_serialize, Concept, ConceptId, Document, DocumentAnnotations, NarrativeQuery, Predicate, PredicateId,
    QueryLabels, Statement, Term,
};
pub use ontology::{ConceptOntology, PredicateHierarchy};
pub use strategies::{Candidate, RankOrder, Strategy, StrategyOptions};
pub use translation::{GeneratedQuery, TokenizerOptions, Translation, TranslationOptions};
