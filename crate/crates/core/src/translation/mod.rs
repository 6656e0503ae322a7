//! Keyword query to narrative query translation.
//!
//! Translation runs in two phases. The mapping phase aligns token spans with
//! concept and predicate labels and collects the statements supported between
//! the mapped concepts. The generation phase enumerates every unambiguous use
//! of the tokens (concept, predicate, term) and every admissible statement
//! selection, keeping only queries whose predicate keywords are reflected by
//! a statement.

mod generate;
mod mapping;
mod tokenize;

use serde::{Deserialize, Serialize};

pub use generate::{generate_queries, GeneratedQuery, Generation};
pub use mapping::{map_tokens, MappingResult, TokenSpan};
pub use tokenize::{tokenize, TokenizerOptions, ENGLISH_STOPWORDS, PUNCTUATION};

use crate::error::{Error, Result};
use crate::indexing::{CollectionIndex, ConceptIndex, PredicateIndex};
use crate::ontology::PredicateHierarchy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TranslationOptions {
    /// Components need support strictly greater than `tau`.
    pub tau: usize,
    /// Also map ordered arrangements of non-adjacent tokens.
    pub consider_permutations: bool,
    pub max_tokens: usize,
    pub max_queries: usize,
    /// Upper bound on enumerated (assignment, statement selection) pairs.
    pub max_combinations: usize,
}

impl Default for TranslationOptions {
    fn default() -> Self {
        TranslationOptions {
            tau: 0,
            consider_permutations: false,
            max_tokens: 12,
            max_queries: 10_000,
            max_combinations: 1_000_000,
        }
    }
}

impl TranslationOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_tokens == 0 || self.max_tokens > 64 {
            return Err(Error::Invalid("max_tokens must be within 1..=64".into()));
        }
        if self.max_queries == 0 || self.max_combinations == 0 {
            return Err(Error::Invalid("max_queries and max_combinations must be positive".into()));
        }
        Ok(())
    }
}

/// Read-only view over everything translation consults.
#[derive(Clone, Copy, Debug)]
pub struct Indexes<'a> {
    pub concepts: &'a ConceptIndex,
    pub predicates: &'a PredicateIndex,
    pub collection: &'a CollectionIndex,
    pub hierarchy: &'a PredicateHierarchy,
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub mapping: MappingResult,
    /// Ascending canonical order.
    pub queries: Vec<GeneratedQuery>,
    pub truncated: bool,
}

impl Translation {
    pub fn tokens(&self) -> &[String] {
        &self.mapping.tokens
    }
}

/// Tokenizes `query`, maps the tokens and generates every candidate query.
pub fn translate(
    query: &str,
    indexes: Indexes<'_>,
    tokenizer: &TokenizerOptions,
    opts: &TranslationOptions,
) -> Result<Translation> {
    let tokens = tokenize(query, tokenizer);
    let mapping = map_tokens(&tokens, indexes, opts)?;
    let generation = generate_queries(&mapping, indexes.collection, opts)?;
    Ok(Translation {
        mapping,
        queries: generation.queries,
        truncated: generation.truncated,
    })
}
