//! Domain vocabulary: concepts, predicates, statements, terms and narrative
//! queries, plus the documents they are evaluated against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident, $what:literal) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Result<Self> {
                let id = id.into();
                if id.is_empty() {
                    return Err(Error::Invalid(concat!($what, " must not be empty").into()));
                }
                Ok(Self(id))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(value: String) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(value: $name) -> String {
                value.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Opaque concept identifier, e.g. an ontology accession such as `CHEMBL1431`.
    ConceptId,
    "concept id"
);
string_id!(
    /// Opaque predicate identifier, e.g. `treats`.
    PredicateId,
    "predicate id"
);

/// A single lowercase word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Term(String);

impl Term {
    /// Lowercases `text`; rejects empty text and text containing whitespace.
    pub fn new(text: impl AsRef<str>) -> Result<Self> {
        let text = text.as_ref();
        if text.is_empty() {
            return Err(Error::Invalid("term must not be empty".into()));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!("term `{text}` contains whitespace")));
        }
        Ok(Term(text.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Term {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Term::new(value)
    }
}

impl From<Term> for String {
    fn from(value: Term) -> String {
        value.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for Term {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub preferred_label: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub parents: Vec<ConceptId>,
}

impl Concept {
    /// Preferred label followed by synonyms.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.preferred_label.as_str()).chain(self.synonyms.iter().map(String::as_str))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub id: PredicateId,
    pub label: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<PredicateId>,
}

impl Predicate {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.label.as_str()).chain(self.synonyms.iter().map(String::as_str))
    }
}

/// A directed `(subject, predicate, object)` triple between two distinct concepts.
///
/// Serialized as a three element array.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "(ConceptId, PredicateId, ConceptId)",
    into = "(ConceptId, PredicateId, ConceptId)"
)]
pub struct Statement {
    subject: ConceptId,
    predicate: PredicateId,
    object: ConceptId,
}

impl Statement {
    pub fn new(subject: ConceptId, predicate: PredicateId, object: ConceptId) -> Result<Self> {
        if subject == object {
            return Err(Error::Invalid(format!(
                "statement subject and object are both `{subject}`"
            )));
        }
        Ok(Statement {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &ConceptId {
        &self.subject
    }

    pub fn predicate(&self) -> &PredicateId {
        &self.predicate
    }

    pub fn object(&self) -> &ConceptId {
        &self.object
    }

    /// Same endpoints, different predicate.
    pub fn with_predicate(&self, predicate: PredicateId) -> Statement {
        Statement {
            subject: self.subject.clone(),
            predicate,
            object: self.object.clone(),
        }
    }
}

impl TryFrom<(ConceptId, PredicateId, ConceptId)> for Statement {
    type Error = Error;

    fn try_from((s, p, o): (ConceptId, PredicateId, ConceptId)) -> Result<Self> {
        Statement::new(s, p, o)
    }
}

impl From<Statement> for (ConceptId, PredicateId, ConceptId) {
    fn from(st: Statement) -> Self {
        (st.subject, st.predicate, st.object)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.object)
    }
}

/// A narrative query `(statements, concepts, terms)`.
///
/// The concept set always contains every statement endpoint, and at most one
/// statement exists per ordered concept pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawQuery")]
pub struct NarrativeQuery {
    statements: BTreeSet<Statement>,
    concepts: BTreeSet<ConceptId>,
    terms: BTreeSet<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    #[serde(default)]
    statements: Vec<Statement>,
    #[serde(default)]
    concepts: Vec<ConceptId>,
    #[serde(default)]
    terms: Vec<Term>,
}

impl TryFrom<RawQuery> for NarrativeQuery {
    type Error = Error;

    fn try_from(raw: RawQuery) -> Result<Self> {
        NarrativeQuery::new(raw.statements, raw.concepts, raw.terms)
    }
}

impl NarrativeQuery {
    pub fn new(
        statements: impl IntoIterator<Item = Statement>,
        concepts: impl IntoIterator<Item = ConceptId>,
        terms: impl IntoIterator<Item = Term>,
    ) -> Result<Self> {
        let statements: BTreeSet<Statement> = statements.into_iter().collect();
        let concepts: BTreeSet<ConceptId> = concepts.into_iter().collect();
        let mut pairs = BTreeSet::new();
        for st in &statements {
            for endpoint in [st.subject(), st.object()] {
                if !concepts.contains(endpoint) {
                    return Err(Error::MissingEndpoint(endpoint.to_string()));
                }
            }
            if !pairs.insert((st.subject(), st.object())) {
                return Err(Error::PairConflict(
                    st.subject().to_string(),
                    st.object().to_string(),
                ));
            }
        }
        Ok(NarrativeQuery {
            statements,
            concepts,
            terms: terms.into_iter().collect(),
        })
    }

    /// Like [`NarrativeQuery::new`] but adds statement endpoints to the concept set.
    pub fn with_endpoints(
        statements: impl IntoIterator<Item = Statement>,
        concepts: impl IntoIterator<Item = ConceptId>,
        terms: impl IntoIterator<Item = Term>,
    ) -> Result<Self> {
        let statements: Vec<Statement> = statements.into_iter().collect();
        let mut concepts: BTreeSet<ConceptId> = concepts.into_iter().collect();
        for st in &statements {
            concepts.insert(st.subject().clone());
            concepts.insert(st.object().clone());
        }
        NarrativeQuery::new(statements, concepts, terms)
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts(
        statements: BTreeSet<Statement>,
        concepts: BTreeSet<ConceptId>,
        terms: BTreeSet<Term>,
    ) -> Self {
        debug_assert!(NarrativeQuery::new(statements.clone(), concepts.clone(), terms.clone()).is_ok());
        NarrativeQuery {
            statements,
            concepts,
            terms,
        }
    }

    pub fn statements(&self) -> &BTreeSet<Statement> {
        &self.statements
    }

    pub fn concepts(&self) -> &BTreeSet<ConceptId> {
        &self.concepts
    }

    pub fn terms(&self) -> &BTreeSet<Term> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty() && self.concepts.is_empty() && self.terms.is_empty()
    }

    pub fn has_statements(&self) -> bool {
        !self.statements.is_empty()
    }

    /// Number of components (statements + concepts + terms).
    pub fn len(&self) -> usize {
        self.statements.len() + self.concepts.len() + self.terms.len()
    }

    pub fn canonical_key(&self) -> String {
        canonical_serialize(self)
    }
}

impl AsRef<NarrativeQuery> for NarrativeQuery {
    fn as_ref(&self) -> &NarrativeQuery {
        self
    }
}

impl fmt::Display for NarrativeQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&canonical_serialize(self))
    }
}

fn push_escaped(out: &mut String, raw: &str) {
    for ch in raw.chars() {
        if matches!(ch, '\\' | ',' | ';' | '|') {
            out.push('\\');
        }
        out.push(ch);
    }
}

/// Deterministic textual form of a query, used as the tie-breaking key.
///
/// Layout: `S:<s,p,o;...>|C:<c;...>|T:<t;...>` with every component sorted.
/// Delimiter characters occurring inside identifiers are backslash-escaped, so
/// distinct queries never share a key.
pub fn canonical_serialize(q: &NarrativeQuery) -> String {
    let mut out = String::from("S:");
    for (i, st) in q.statements.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        push_escaped(&mut out, st.subject.as_str());
        out.push(',');
        push_escaped(&mut out, st.predicate.as_str());
        out.push(',');
        push_escaped(&mut out, st.object.as_str());
    }
    out.push_str("|C:");
    for (i, c) in q.concepts.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        push_escaped(&mut out, c.as_str());
    }
    out.push_str("|T:");
    for (i, t) in q.terms.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        push_escaped(&mut out, t.as_str());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fulltext: Option<String>,
}

impl Document {
    /// Title, abstract and optional full text joined by single spaces.
    pub fn text(&self) -> String {
        let mut text = format!("{} {}", self.title, self.abstract_text);
        if let Some(full) = &self.fulltext {
            text.push(' ');
            text.push_str(full);
        }
        text
    }
}

/// Concepts detected in and statements extracted from one document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentAnnotations {
    doc_id: String,
    detected_concepts: BTreeSet<ConceptId>,
    extracted_statements: BTreeSet<Statement>,
}

impl DocumentAnnotations {
    pub fn new(
        doc_id: impl Into<String>,
        detected_concepts: impl IntoIterator<Item = ConceptId>,
        extracted_statements: impl IntoIterator<Item = Statement>,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        let detected_concepts: BTreeSet<ConceptId> = detected_concepts.into_iter().collect();
        let extracted_statements: BTreeSet<Statement> = extracted_statements.into_iter().collect();
        for st in &extracted_statements {
            for endpoint in [st.subject(), st.object()] {
                if !detected_concepts.contains(endpoint) {
                    return Err(Error::Annotation {
                        doc: doc_id,
                        reason: format!(
                            "statement {st} uses `{endpoint}` which is not among the detected concepts"
                        ),
                    });
                }
            }
        }
        Ok(DocumentAnnotations {
            doc_id,
            detected_concepts,
            extracted_statements,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn detected_concepts(&self) -> &BTreeSet<ConceptId> {
        &self.detected_concepts
    }

    pub fn extracted_statements(&self) -> &BTreeSet<Statement> {
        &self.extracted_statements
    }
}

/// Display labels for the identifiers occurring in a query.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLabels {
    pub concepts: BTreeMap<String, String>,
    pub predicates: BTreeMap<String, String>,
}
