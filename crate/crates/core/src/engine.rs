//! A loaded corpus with every index built, shared by the CLI and the service.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::indexing::{
    build_collection_index, build_concept_index, build_predicate_index, read_snapshot, CollectionIndex, ConceptIndex,
    IndexOptions, PredicateIndex,
};
use crate::ingestion::{load_concepts, load_documents, load_predicates};
use crate::model::{ConceptId, Document, DocumentAnnotations, NarrativeQuery, QueryLabels};
use crate::ontology::{ConceptOntology, PredicateHierarchy};
use crate::retrieval;
use crate::translation::{translate, Indexes, TokenizerOptions, Translation, TranslationOptions};

#[derive(Clone, Debug)]
pub struct CorpusPaths {
    pub concepts: PathBuf,
    pub predicates: PathBuf,
    pub documents: PathBuf,
}

impl CorpusPaths {
    /// `concepts.jsonl`, `predicates.jsonl` and `documents.jsonl` inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        CorpusPaths {
            concepts: dir.join("concepts.jsonl"),
            predicates: dir.join("predicates.jsonl"),
            documents: dir.join("documents.jsonl"),
        }
    }
}

#[derive(Debug)]
pub struct Engine {
    ontology: ConceptOntology,
    hierarchy: PredicateHierarchy,
    concept_index: ConceptIndex,
    predicate_index: PredicateIndex,
    collection: CollectionIndex,
    documents: BTreeMap<String, Document>,
    options: IndexOptions,
}

impl Engine {
    pub fn build(
        ontology: ConceptOntology,
        hierarchy: PredicateHierarchy,
        docs: Vec<(Document, DocumentAnnotations)>,
        options: IndexOptions,
    ) -> Result<Self> {
        let collection = build_collection_index(&docs, &ontology, &hierarchy, &options)?;
        let documents = docs.into_iter().map(|(d, _)| (d.doc_id.clone(), d)).collect();
        Ok(Engine::assemble(ontology, hierarchy, collection, documents, options))
    }

    /// Uses a previously built collection index (e.g. from a snapshot).
    pub fn with_collection(
        ontology: ConceptOntology,
        hierarchy: PredicateHierarchy,
        documents: Vec<Document>,
        collection: CollectionIndex,
        options: IndexOptions,
    ) -> Result<Self> {
        let documents: BTreeMap<String, Document> = documents.into_iter().map(|d| (d.doc_id.clone(), d)).collect();
        let known = documents.keys().eq(collection.doc_ids().iter());
        if !known {
            return Err(Error::Invalid(
                "collection index does not cover exactly the loaded documents".into(),
            ));
        }
        Ok(Engine::assemble(ontology, hierarchy, collection, documents, options))
    }

    fn assemble(
        ontology: ConceptOntology,
        hierarchy: PredicateHierarchy,
        collection: CollectionIndex,
        documents: BTreeMap<String, Document>,
        options: IndexOptions,
    ) -> Self {
        Engine {
            concept_index: build_concept_index(&ontology),
            predicate_index: build_predicate_index(&hierarchy),
            ontology,
            hierarchy,
            collection,
            documents,
            options,
        }
    }

    pub fn load(paths: &CorpusPaths, options: IndexOptions) -> Result<Self> {
        let ontology = load_concepts(&paths.concepts)?;
        let hierarchy = load_predicates(&paths.predicates)?;
        let docs = load_documents(&paths.documents)?;
        Engine::build(ontology, hierarchy, docs, options)
    }

    /// Loads vocabularies and documents but takes the collection index from
    /// `snapshot`. The snapshot must have been built with the same `options`.
    pub fn load_with_snapshot(paths: &CorpusPaths, snapshot: impl AsRef<Path>, options: IndexOptions) -> Result<Self> {
        let snapshot = snapshot.as_ref();
        let file = File::open(snapshot).map_err(|e| Error::io(snapshot, e))?;
        let collection = read_snapshot(BufReader::new(file))?;
        let ontology = load_concepts(&paths.concepts)?;
        let hierarchy = load_predicates(&paths.predicates)?;
        let documents = load_documents(&paths.documents)?.into_iter().map(|(d, _)| d).collect();
        Engine::with_collection(ontology, hierarchy, documents, collection, options)
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn indexes(&self) -> Indexes<'_> {
        Indexes {
            concepts: &self.concept_index,
            predicates: &self.predicate_index,
            collection: &self.collection,
            hierarchy: &self.hierarchy,
        }
    }

    pub fn ontology(&self) -> &ConceptOntology {
        &self.ontology
    }

    pub fn hierarchy(&self) -> &PredicateHierarchy {
        &self.hierarchy
    }

    pub fn collection(&self) -> &CollectionIndex {
        &self.collection
    }

    pub fn tokenizer(&self) -> &TokenizerOptions {
        &self.options.tokenizer
    }

    pub fn index_options(&self) -> &IndexOptions {
        &self.options
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.get(doc_id)
    }

    /// Translates keywords with the tokenizer the collection was indexed with.
    pub fn translate(&self, keywords: &str, opts: &TranslationOptions) -> Result<Translation> {
        translate(keywords, self.indexes(), &self.options.tokenizer, opts)
    }

    pub fn answers(&self, q: &NarrativeQuery) -> Vec<String> {
        retrieval::answers(q, &self.collection)
    }

    pub fn result_count(&self, q: &NarrativeQuery) -> usize {
        retrieval::result_count(q, &self.collection)
    }

    /// Checks that every concept and predicate of `q` is known.
    pub fn validate_query(&self, q: &NarrativeQuery) -> Result<()> {
        for c in q.concepts() {
            if !self.ontology.contains(c) {
                return Err(Error::UnknownConcept(c.to_string()));
            }
        }
        for s in q.statements() {
            if !self.hierarchy.contains(s.predicate()) {
                return Err(Error::UnknownPredicate(s.predicate().to_string()));
            }
        }
        Ok(())
    }

    /// Preferred labels of the concepts and predicates used by `q`.
    pub fn labels(&self, q: &NarrativeQuery) -> QueryLabels {
        let mut labels = QueryLabels::default();
        for c in q.concepts() {
            labels.concepts.insert(c.to_string(), self.concept_label(c));
        }
        for s in q.statements() {
            let p = s.predicate();
            let label = self.hierarchy.get(p).map_or_else(|| p.to_string(), |p| p.label.clone());
            labels.predicates.insert(p.to_string(), label);
        }
        labels
    }

    fn concept_label(&self, c: &ConceptId) -> String {
        self.ontology
            .preferred_label(c)
            .map_or_else(|| c.to_string(), str::to_string)
    }
}
