//! Bracketed tree reading and relational pattern matching.

mod file;
mod pattern;
mod tree;

pub use file::{PatternEntry, PatternFile};
pub(crate) use pattern::FlatTree;
pub use pattern::{match_pattern, LabelMatcher, NodeMatch, Pattern, Relation};
pub use tree::{parse_ptb, parse_ptb_many, Tree, NON_WORD_TAGS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern syntax error: {0}")]
    Syntax(String),
    #[error("pattern file line {line}: {message}")]
    File { line: usize, message: String },
}
