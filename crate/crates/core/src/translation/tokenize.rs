use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// English stopwords (the NLTK list).
pub const ENGLISH_STOPWORDS: &[&str] = &[
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
    "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
    "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
    "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
    "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
    "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
    "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
    "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan",
    "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't",
    "wouldn", "wouldn't",
];

/// ASCII punctuation replaced by spaces when punctuation replacement is on.
pub const PUNCTUATION: &str = r##"!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~"##;

const BRACKETS: &[char] = &['(', ')', '[', ']', '{', '}'];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerOptions {
    pub remove_stopwords: bool,
    pub replace_punctuation: bool,
    pub stopword_list: BTreeSet<String>,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        TokenizerOptions {
            remove_stopwords: true,
            replace_punctuation: false,
            stopword_list: ENGLISH_STOPWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TokenizerOptions {
    pub fn with_punctuation_replacement(mut self, on: bool) -> Self {
        self.replace_punctuation = on;
        self
    }

    pub fn with_stopword_removal(mut self, on: bool) -> Self {
        self.remove_stopwords = on;
        self
    }
}

/// Splits text into lowercase tokens.
///
/// Brackets are deleted, punctuation optionally becomes whitespace, and
/// stopwords are optionally dropped.
pub fn tokenize(text: &str, opts: &TokenizerOptions) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .filter(|c| !BRACKETS.contains(c))
        .map(|c| {
            if opts.replace_punctuation && PUNCTUATION.contains(c) {
                ' '
            } else {
                c
            }
        })
        .collect();
    cleaned
        .split_whitespace()
        .map(str::to_lowercase)
        .filter(|tok| !tok.is_empty())
        .filter(|tok| !(opts.remove_stopwords && opts.stopword_list.contains(tok)))
        .collect()
}
