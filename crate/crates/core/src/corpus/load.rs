use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    align_tokens, tokenize, tokens_from_trees, Corpus, CorpusError, Document, Token, PTB_TAGSET,
};
use crate::treepat::parse_ptb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Allowed POS tags for explicitly supplied tokens.
    pub tagset: Vec<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            tagset: PTB_TAGSET.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct JsonRecord {
    id: String,
    #[serde(default)]
    subject_id: Option<String>,
    label: String,
    #[serde(default)]
    text: String,
    #[serde(default)]
    tokens: Option<Vec<Token>>,
    #[serde(default)]
    trees: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
struct JsonRecordOut<'a> {
    id: &'a str,
    subject_id: &'a str,
    label: &'a str,
    text: String,
    tokens: &'a [Token],
    #[serde(skip_serializing_if = "Option::is_none")]
    trees: Option<&'a Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct CsvRecord {
    id: String,
    #[serde(default)]
    subject_id: Option<String>,
    label: String,
    #[serde(default)]
    text: String,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    load_corpus_with(path, format, &LoadOptions::default())
}

pub fn load_corpus_with(
    path: &Path,
    format: CorpusFormat,
    options: &LoadOptions,
) -> Result<Corpus, CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut documents = Vec::new();
    match format {
        CorpusFormat::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
                documents.push(build_document(
                    rec.id,
                    rec.subject_id,
                    rec.label,
                    &rec.text,
                    rec.tokens,
                    rec.trees,
                    options,
                )?);
            }
        }
        CorpusFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            for rec in reader.deserialize::<CsvRecord>() {
                let rec = rec.map_err(|e| CorpusError::Parse {
                    line: e.position().map_or(0, |p| p.line() as usize),
                    message: e.to_string(),
                })?;
                documents.push(build_document(
                    rec.id,
                    rec.subject_id,
                    rec.label,
                    &rec.text,
                    None,
                    None,
                    options,
                )?);
            }
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Corpus::new(name, documents)
}

/// Token precedence: explicit tokens, then tree leaves, then the text
/// tokenizer.
fn build_document(
    id: String,
    subject_id: Option<String>,
    label: String,
    text: &str,
    tokens: Option<Vec<Token>>,
    trees: Option<Vec<String>>,
    options: &LoadOptions,
) -> Result<Document, CorpusError> {
    let parsed = match &trees {
        Some(ts) => Some(
            ts.iter()
                .map(|s| {
                    parse_ptb(s).map_err(|source| CorpusError::Tree {
                        doc: id.clone(),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let mut tokens = match (tokens, &parsed) {
        (Some(t), _) => {
            for tok in &t {
                if let Some(pos) = &tok.pos {
                    if !options.tagset.iter().any(|tag| tag == pos) {
                        return Err(CorpusError::Schema(format!(
                            "document {id}: POS tag {pos:?} is not in the tagset"
                        )));
                    }
                }
            }
            t
        }
        (None, Some(p)) => tokens_from_trees(p),
        (None, None) => tokenize(text).into_iter().map(|f| Token { form: f, pos: None }).collect(),
    };
    if let Some(p) = &parsed {
        let map = align_tokens(&tokens, p).map_err(|message| CorpusError::Alignment {
            doc: id.clone(),
            message,
        })?;
        for (tok, &(ti, li)) in tokens.iter_mut().zip(&map) {
            if tok.pos.is_none() {
                tok.pos = Some(p[ti].leaves()[li].category().to_string());
            }
        }
    }
    if tokens.is_empty() {
        return Err(CorpusError::Schema(format!("document {id} has no tokens")));
    }
    if let Some(t) = tokens.iter().find(|t| t.form.is_empty()) {
        return Err(CorpusError::Schema(format!("document {id} has an empty token {t:?}")));
    }
    let subject_id = subject_id.filter(|s| !s.is_empty()).unwrap_or_else(|| id.clone());
    Ok(Document {
        id,
        subject_id,
        label,
        tokens,
        trees,
        alteration_level: 0,
    })
}

/// Writes a corpus in the jsonl input schema, tokens and trees included.
pub fn write_jsonl(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    for d in &corpus.documents {
        let rec = JsonRecordOut {
            id: &d.id,
            subject_id: &d.subject_id,
            label: &d.label,
            text: d.text(),
            tokens: &d.tokens,
            trees: d.trees.as_ref(),
        };
        let line = serde_json::to_string(&rec).expect("records serialize");
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}
