//! Labeled corpora: loading, validation, profiling and subject-aware folds.

mod folds;
mod load;
mod profile;
mod tokenize;

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treepat::{parse_ptb, Tree, TreeError};

pub use folds::{group_folds, FoldAssignment};
pub use load::{load_corpus, load_corpus_with, write_jsonl, CorpusFormat, LoadOptions};
pub use profile::{profile_corpus, DatasetProfile, LexiconComplexity, ProfileConfig, ProfileRow};
pub use tokenize::tokenize;

/// Penn Treebank part-of-speech tags, punctuation and empty-element tags
/// included.
pub const PTB_TAGSET: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP",
    "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB",
    "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", ".", ",", ":", "``", "''",
    "-LRB-", "-RRB-", "#", "$", "HYPH", "NFP", "ADD", "AFX", "GW", "XX", "-NONE-",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("document {doc}: tree leaves do not match tokens: {message}")]
    Alignment { doc: String, message: String },
    #[error("document {doc}: {source}")]
    Tree {
        doc: String,
        #[source]
        source: TreeError,
    },
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<String>,
}

impl Token {
    pub fn new(form: impl Into<String>, pos: Option<&str>) -> Self {
        Token {
            form: form.into(),
            pos: pos.map(str::to_string),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub subject_id: String,
    pub label: String,
    pub tokens: Vec<Token>,
    /// One bracketed tree per sentence, when parses are available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trees: Option<Vec<String>>,
    /// Percent of words deleted; 0 is the original text.
    #[serde(default)]
    pub alteration_level: u8,
}

impl Document {
    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    pub fn text(&self) -> String {
        self.forms().join(" ")
    }

    pub fn parsed_trees(&self) -> Result<Option<Vec<Tree>>, CorpusError> {
        match &self.trees {
            None => Ok(None),
            Some(ts) => ts
                .iter()
                .map(|s| {
                    parse_ptb(s).map_err(|source| CorpusError::Tree {
                        doc: self.id.clone(),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    /// The two class labels in sorted order; class index = position.
    pub labels: [String; 2],
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Validates labels and ids and builds the corpus.
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let labels: BTreeSet<String> = documents.iter().map(|d| d.label.clone()).collect();
        if labels.len() != 2 {
            return Err(CorpusError::Schema(format!(
                "expected exactly 2 class labels, found {}: {:?}",
                labels.len(),
                labels
            )));
        }
        let mut ids = BTreeSet::new();
        for d in &documents {
            if !ids.insert(d.id.as_str()) {
                return Err(CorpusError::Schema(format!("duplicate document id {:?}", d.id)));
            }
        }
        drop(ids);
        let mut it = labels.into_iter();
        let labels = [it.next().unwrap(), it.next().unwrap()];
        Ok(Corpus {
            name: name.into(),
            labels,
            documents,
        })
    }

    pub fn class_of(&self, doc: &Document) -> usize {
        usize::from(doc.label == self.labels[1])
    }

    pub fn class_indices(&self) -> Vec<usize> {
        self.documents.iter().map(|d| self.class_of(d)).collect()
    }

    pub fn has_trees(&self) -> bool {
        self.documents.iter().any(|d| d.trees.is_some())
    }
}

/// Maps every token to `(tree index, leaf index)` by walking tree leaves
/// and tokens together. Punctuation and empty-element leaves without a
/// matching token are skipped; forms compare case-insensitively.
pub fn align_tokens(tokens: &[Token], trees: &[Tree]) -> Result<Vec<(usize, usize)>, String> {
    let mut map = Vec::with_capacity(tokens.len());
    let mut cursor = 0;
    for (ti, tree) in trees.iter().enumerate() {
        for (li, leaf) in tree.leaves().into_iter().enumerate() {
            let form = leaf.form().unwrap_or_default();
            match tokens.get(cursor) {
                Some(tok) if tok.form.to_lowercase() == form.to_lowercase() => {
                    map.push((ti, li));
                    cursor += 1;
                }
                _ if leaf.is_non_word() => {}
                Some(tok) => {
                    return Err(format!(
                        "token {cursor} is {:?} but tree {ti} leaf {li} is {form:?}",
                        tok.form
                    ))
                }
                None => return Err(format!("extra leaf {form:?} in tree {ti} after the last token")),
            }
        }
    }
    if cursor != tokens.len() {
        return Err(format!(
            "{} tokens but only {cursor} word leaves",
            tokens.len()
        ));
    }
    Ok(map)
}

/// Tokens taken from tree leaves: lowercased forms, preterminal tags as POS.
pub fn tokens_from_trees(trees: &[Tree]) -> Vec<Token> {
    trees
        .iter()
        .flat_map(|t| t.word_leaves())
        .map(|l| Token {
            form: l.form().unwrap_or_default().to_lowercase(),
            pos: Some(l.category().to_string()),
        })
        .collect()
}
