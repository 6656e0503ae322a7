//! File formats.
//!
//! Concepts, predicates, documents and topics are UTF-8 JSON lines, one
//! record per line; blank lines are ignored. Relevance judgments use the
//! four-column whitespace-separated qrels layout
//! `topic_id iteration doc_id relevance`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::{Concept, ConceptId, Document, DocumentAnnotations, Predicate, Statement};
use crate::ontology::{ConceptOntology, PredicateHierarchy};

/// One line of a documents file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fulltext: Option<String>,
    #[serde(default)]
    pub concepts: Vec<ConceptId>,
    #[serde(default)]
    pub statements: Vec<Statement>,
}

impl DocumentRecord {
    pub fn into_parts(self) -> Result<(Document, DocumentAnnotations)> {
        let annotations = DocumentAnnotations::new(self.doc_id.clone(), self.concepts, self.statements)?;
        Ok((
            Document {
                doc_id: self.doc_id,
                title: self.title,
                abstract_text: self.abstract_text,
                fulltext: self.fulltext,
            },
            annotations,
        ))
    }

    pub fn from_parts(doc: &Document, annotations: &DocumentAnnotations) -> Self {
        DocumentRecord {
            doc_id: doc.doc_id.clone(),
            title: doc.title.clone(),
            abstract_text: doc.abstract_text.clone(),
            fulltext: doc.fulltext.clone(),
            concepts: annotations.detected_concepts().iter().cloned().collect(),
            statements: annotations.extracted_statements().iter().cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    #[serde(deserialize_with = "string_or_number")]
    pub topic_id: String,
    #[serde(rename = "query_string", alias = "query")]
    pub query: String,
}

fn string_or_number<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        Text(String),
        Number(u64),
    }
    Ok(match Id::deserialize(de)? {
        Id::Text(s) => s,
        Id::Number(n) => n.to_string(),
    })
}

/// Relevance judgments: topic -> document -> grade. A grade of 1 or more is relevant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qrels {
    topics: BTreeMap<String, BTreeMap<String, i32>>,
}

impl Qrels {
    pub fn insert(&mut self, topic: impl Into<String>, doc: impl Into<String>, relevance: i32) {
        self.topics.entry(topic.into()).or_default().insert(doc.into(), relevance);
    }

    pub fn topic(&self, topic: &str) -> Option<&BTreeMap<String, i32>> {
        self.topics.get(topic)
    }

    pub fn topics(&self) -> impl Iterator<Item = (&String, &BTreeMap<String, i32>)> {
        self.topics.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Deserializes every non-blank line of a JSON-lines stream.
fn parse_json_lines<T: DeserializeOwned>(path: &Path, input: impl BufRead) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e))?;
        out.push((i + 1, record));
    }
    Ok(out)
}

fn write_json_lines<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut out, &record).map_err(|e| Error::io(path, e.into()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_concepts(path: &Path, input: impl BufRead) -> Result<ConceptOntology> {
    let records: Vec<(usize, Concept)> = parse_json_lines(path, input)?;
    ConceptOntology::new(records.into_iter().map(|(_, c)| c))
}

pub fn load_concepts(path: impl AsRef<Path>) -> Result<ConceptOntology> {
    let path = path.as_ref();
    parse_concepts(path, open(path)?)
}

pub fn save_concepts(path: impl AsRef<Path>, ontology: &ConceptOntology) -> Result<()> {
    write_json_lines(path.as_ref(), ontology.iter())
}

pub fn parse_predicates(path: &Path, input: impl BufRead) -> Result<PredicateHierarchy> {
    let records: Vec<(usize, Predicate)> = parse_json_lines(path, input)?;
    PredicateHierarchy::new(records.into_iter().map(|(_, p)| p))
}

pub fn load_predicates(path: impl AsRef<Path>) -> Result<PredicateHierarchy> {
    let path = path.as_ref();
    parse_predicates(path, open(path)?)
}

pub fn save_predicates(path: impl AsRef<Path>, hierarchy: &PredicateHierarchy) -> Result<()> {
    write_json_lines(path.as_ref(), hierarchy.iter())
}

pub fn parse_documents(path: &Path, input: impl BufRead) -> Result<Vec<(Document, DocumentAnnotations)>> {
    let records: Vec<(usize, DocumentRecord)> = parse_json_lines(path, input)?;
    records
        .into_iter()
        .map(|(line, record)| record.into_parts().map_err(|e| Error::parse(path, line, e)))
        .collect()
}

pub fn load_documents(path: impl AsRef<Path>) -> Result<Vec<(Document, DocumentAnnotations)>> {
    let path = path.as_ref();
    parse_documents(path, open(path)?)
}

pub fn save_documents(path: impl AsRef<Path>, docs: &[(Document, DocumentAnnotations)]) -> Result<()> {
    write_json_lines(
        path.as_ref(),
        docs.iter().map(|(d, a)| DocumentRecord::from_parts(d, a)),
    )
}

pub fn parse_topics(path: &Path, input: impl BufRead) -> Result<Vec<Topic>> {
    Ok(parse_json_lines(path, input)?
        .into_iter()
        .map(|(_, t)| t)
        .collect())
}

pub fn load_topics(path: impl AsRef<Path>) -> Result<Vec<Topic>> {
    let path = path.as_ref();
    parse_topics(path, open(path)?)
}

pub fn save_topics(path: impl AsRef<Path>, topics: &[Topic]) -> Result<()> {
    write_json_lines(path.as_ref(), topics)
}

pub fn parse_qrels(path: &Path, input: impl BufRead) -> Result<Qrels> {
    let mut qrels = Qrels::default();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [topic, _iteration, doc, relevance] => {
                let relevance: i32 = relevance
                    .parse()
                    .map_err(|_| Error::parse(path, i + 1, format!("relevance `{relevance}` is not an integer")))?;
                qrels.insert(*topic, *doc, relevance);
            }
            other => {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected 4 columns, found {}", other.len()),
                ))
            }
        }
    }
    Ok(qrels)
}

pub fn load_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    parse_qrels(path, open(path)?)
}

/// Writes judgments with iteration `0`.
pub fn save_qrels(path: impl AsRef<Path>, qrels: &Qrels) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for (topic, docs) in qrels.topics() {
        for (doc, rel) in docs {
            text.push_str(&format!("{topic} 0 {doc} {rel}\n"));
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
