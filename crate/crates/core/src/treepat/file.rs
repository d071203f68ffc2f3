//! Versioned pattern files.
//!
//! ```text
//! # comment
//! version 1
//! @FIN = MD|VBZ|VBP|VBD
//! C => S|SINV|SQ < (VP < @FIN)
//! ```
//!
//! `@NAME = text` defines a textual macro; every `@NAME` in later lines is
//! replaced before parsing. Entry lines carry whitespace-separated header
//! fields, then `=>`, then a pattern.

use std::collections::BTreeMap;

use super::pattern::Pattern;
use super::PatternError;

#[derive(Debug, Clone)]
pub struct PatternEntry {
    pub header: Vec<String>,
    pub pattern: Pattern,
    /// Pattern source after macro expansion.
    pub source: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct PatternFile {
    pub version: u32,
    pub entries: Vec<PatternEntry>,
}

impl PatternFile {
    pub fn parse(text: &str) -> Result<PatternFile, PatternError> {
        let mut version = None;
        let mut macros: BTreeMap<String, String> = BTreeMap::new();
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at_line = |e: PatternError| PatternError::File {
                line: line_no,
                message: e.to_string(),
            };
            if let Some(v) = line.strip_prefix("version ") {
                version = Some(v.trim().parse::<u32>().map_err(|e| PatternError::File {
                    line: line_no,
                    message: format!("bad version: {e}"),
                })?);
                continue;
            }
            if let Some(def) = line.strip_prefix('@') {
                let (name, body) = def.split_once('=').ok_or(PatternError::File {
                    line: line_no,
                    message: "macro definition needs '='".into(),
                })?;
                let body = expand(body.trim(), &macros);
                macros.insert(name.trim().to_string(), body);
                continue;
            }
            let (header, body) = line.split_once("=>").ok_or(PatternError::File {
                line: line_no,
                message: "entry needs '=>'".into(),
            })?;
            let source = expand(body.trim(), &macros);
            if source.contains('@') {
                return Err(PatternError::File {
                    line: line_no,
                    message: format!("undefined macro in {source:?}"),
                });
            }
            let pattern = Pattern::parse(&source).map_err(at_line)?;
            entries.push(PatternEntry {
                header: header.split_whitespace().map(str::to_string).collect(),
                pattern,
                source,
                line: line_no,
            });
        }
        let version = version.ok_or(PatternError::File {
            line: 0,
            message: "missing version line".into(),
        })?;
        Ok(PatternFile { version, entries })
    }
}

fn expand(text: &str, macros: &BTreeMap<String, String>) -> String {
    // Longest names first so @FIN does not clobber @FINITE.
    let mut names: Vec<&String> = macros.keys().collect();
    names.sort_by_key(|n| std::cmp::Reverse(n.len()));
    let mut out = text.to_string();
    for name in names {
        out = out.replace(&format!("@{name}"), &macros[name]);
    }
    out
}
