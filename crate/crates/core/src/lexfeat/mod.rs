//! Lexical features: n-gram counts, entropies and lexical richness.

mod lca;
mod ngram;

use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::Document;
use crate::features::{FeatureGroup, FeatureVector};

pub use lca::{lca_features, FrequencyList, LCA_FEATURES};
pub use ngram::{conditional_entropy, ngram_stats, shannon_entropy, NgramStats};

/// Names of the n-gram features, in output order.
pub const NGRAM_FEATURES: [&str; 13] = [
    "distinct_tokens",
    "distinct_tokens_ratio",
    "bigrams",
    "distinct_bigrams",
    "distinct_bigrams_ratio",
    "trigrams",
    "distinct_trigrams",
    "distinct_trigrams_ratio",
    "entropy_1gram",
    "entropy_2gram",
    "entropy_3gram",
    "cond_entropy_2gram",
    "cond_entropy_3gram",
];

/// All 37 lexical feature names in output order.
pub fn lexical_feature_names() -> Vec<&'static str> {
    NGRAM_FEATURES.iter().chain(LCA_FEATURES.iter()).copied().collect()
}

pub const DEFAULT_AUXILIARIES: &[&str] = &[
    "be", "am", "is", "are", "was", "were", "been", "being", "'s", "'re", "'m", "have", "has",
    "had", "having", "'ve", "'d", "do", "does", "did", "doing",
];

#[derive(Debug, Error)]
pub enum LexError {
    #[error("cannot read word list {path}: {source}")]
    Wordlist {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("POS tags required but missing for {what}")]
    TaggingRequired { what: String },
    #[error("invalid lexical configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct LexicalConfig {
    pub wordlist: FrequencyList,
    pub sophistication_cutoff: usize,
    /// POS prefixes of lexical (content) words.
    pub lexical_tags: Vec<String>,
    /// POS prefixes of verbs.
    pub verb_tags: Vec<String>,
    /// Verb forms excluded from lexical and verb counts.
    pub auxiliaries: Vec<String>,
    pub segment_size: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Emit absent richness features for documents with no tags instead of
    /// failing.
    pub allow_untagged: bool,
}

impl Default for LexicalConfig {
    fn default() -> Self {
        let strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        LexicalConfig {
            wordlist: FrequencyList::default(),
            sophistication_cutoff: 2000,
            lexical_tags: strings(&["NN", "VB", "JJ", "RB"]),
            verb_tags: strings(&["VB"]),
            auxiliaries: strings(DEFAULT_AUXILIARIES),
            segment_size: 50,
            random_samples: 10,
            seed: 0,
            allow_untagged: false,
        }
    }
}

impl LexicalConfig {
    pub fn validate(&self) -> Result<(), LexError> {
        if self.sophistication_cutoff == 0 {
            return Err(LexError::Config("sophistication_cutoff must be at least 1".into()));
        }
        if self.segment_size == 0 {
            return Err(LexError::Config("segment_size must be at least 1".into()));
        }
        if self.lexical_tags.is_empty() || self.verb_tags.is_empty() {
            return Err(LexError::Config("lexical and verb tag sets must be non-empty".into()));
        }
        Ok(())
    }
}

/// N-gram counts and entropies over any token sequence.
pub fn ngram_features<S: AsRef<str>>(tokens: &[S]) -> FeatureVector {
    let g = FeatureGroup::Lexical;
    let mut v = FeatureVector::new();
    let uni = ngram_stats(tokens, 1);
    v.push("distinct_tokens", g, uni.map(|s| s.distinct as f64));
    v.push("distinct_tokens_ratio", g, uni.map(|s| s.once_ratio));
    for (n, name) in [(2, "bigrams"), (3, "trigrams")] {
        let s = ngram_stats(tokens, n);
        v.push(name, g, s.map(|s| s.distinct as f64));
        v.push(format!("distinct_{name}"), g, s.map(|s| s.once as f64));
        v.push(format!("distinct_{name}_ratio"), g, s.map(|s| s.once_ratio));
    }
    for n in 1..=3 {
        v.push(format!("entropy_{n}gram"), g, shannon_entropy(tokens, n));
    }
    for n in 2..=3 {
        v.push(format!("cond_entropy_{n}gram"), g, conditional_entropy(tokens, n));
    }
    v
}

/// All 37 lexical features of a document.
pub fn extract_lexical(doc: &Document, config: &LexicalConfig) -> Result<FeatureVector, LexError> {
    config.validate()?;
    let forms: Vec<String> = doc.tokens.iter().map(|t| t.form.to_lowercase()).collect();
    let mut v = ngram_features(&forms);
    let tagged = doc.tokens.iter().filter(|t| t.pos.is_some()).count();
    if tagged == 0 && config.allow_untagged && !doc.tokens.is_empty() {
        for name in LCA_FEATURES {
            v.push(name, FeatureGroup::Lexical, None);
        }
    } else {
        let lca = lca_features(&doc.tokens, config).map_err(|e| match e {
            LexError::TaggingRequired { what } => LexError::TaggingRequired {
                what: format!("document {}: {what}", doc.id),
            },
            other => other,
        })?;
        v.extend(lca);
    }
    Ok(v)
}
