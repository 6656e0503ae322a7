use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use narrative_core::{ConceptId, CorpusPaths, IndexOptions, StrategyOptions, TokenizerOptions, TranslationOptions};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("environment variable {name}: cannot parse `{value}`")]
    Env { name: String, value: String },
    #[error("no corpus configured: set corpus.dir or all three corpus files")]
    NoCorpus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Directory holding `concepts.jsonl`, `predicates.jsonl` and `documents.jsonl`.
    pub dir: Option<PathBuf>,
    pub concepts: Option<PathBuf>,
    pub predicates: Option<PathBuf>,
    pub documents: Option<PathBuf>,
    /// Prebuilt collection index written by `narrative index`.
    pub snapshot: Option<PathBuf>,
    pub statement_closure_excludes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub corpus: CorpusConfig,
    pub tokenizer: TokenizerOptions,
    pub translation: TranslationOptions,
    pub strategy: StrategyOptions,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            corpus: CorpusConfig::default(),
            tokenizer: TokenizerOptions::default(),
            translation: TranslationOptions::default(),
            strategy: StrategyOptions::default(),
        }
    }
}

/// Prefix of every environment override, e.g. `NARRATIVE_TAU=2`.
pub const ENV_PREFIX: &str = "NARRATIVE_";

impl ServiceConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        ServiceConfig::from_toml(&text, path)
    }

    /// Applies `NARRATIVE_*` overrides. Unknown names are ignored.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (name, value) in vars {
            let (name, value) = (name.as_ref(), value.as_ref());
            let Some(key) = name.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            let bad = || ConfigError::Env {
                name: name.to_string(),
                value: value.to_string(),
            };
            let path = || Some(PathBuf::from(value));
            match key {
                "LISTEN" => self.listen = value.parse().map_err(|_| bad())?,
                "CORPUS_DIR" => self.corpus.dir = path(),
                "CONCEPTS" => self.corpus.concepts = path(),
                "PREDICATES" => self.corpus.predicates = path(),
                "DOCUMENTS" => self.corpus.documents = path(),
                "SNAPSHOT" => self.corpus.snapshot = path(),
                "CLOSURE_EXCLUDES" => {
                    self.corpus.statement_closure_excludes = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect()
                }
                "REMOVE_STOPWORDS" => self.tokenizer.remove_stopwords = parse_bool(value).ok_or_else(bad)?,
                "REPLACE_PUNCTUATION" => self.tokenizer.replace_punctuation = parse_bool(value).ok_or_else(bad)?,
                "TAU" => self.translation.tau = value.parse().map_err(|_| bad())?,
                "PERMUTATIONS" => self.translation.consider_permutations = parse_bool(value).ok_or_else(bad)?,
                "MAX_TOKENS" => self.translation.max_tokens = value.parse().map_err(|_| bad())?,
                "MAX_QUERIES" => self.translation.max_queries = value.parse().map_err(|_| bad())?,
                _ => {}
            }
        }
        Ok(())
    }

    pub fn corpus_paths(&self) -> Result<CorpusPaths, ConfigError> {
        let c = &self.corpus;
        let base = c.dir.as_ref().map(CorpusPaths::in_dir);
        let pick = |explicit: &Option<PathBuf>, from_dir: Option<&PathBuf>| explicit.clone().or(from_dir.cloned());
        Ok(CorpusPaths {
            concepts: pick(&c.concepts, base.as_ref().map(|b| &b.concepts)).ok_or(ConfigError::NoCorpus)?,
            predicates: pick(&c.predicates, base.as_ref().map(|b| &b.predicates)).ok_or(ConfigError::NoCorpus)?,
            documents: pick(&c.documents, base.as_ref().map(|b| &b.documents)).ok_or(ConfigError::NoCorpus)?,
        })
    }

    pub fn index_options(&self) -> narrative_core::Result<IndexOptions> {
        let excludes = self
            .corpus
            .statement_closure_excludes
            .iter()
            .map(ConceptId::new)
            .collect::<narrative_core::Result<BTreeSet<_>>>()?;
        Ok(IndexOptions {
            tokenizer: self.tokenizer.clone(),
            statement_closure_excludes: excludes,
        })
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" => Some(false),
        _ => None,
    }
}
