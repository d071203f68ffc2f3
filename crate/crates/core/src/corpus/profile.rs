use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Document};
use crate::lexfeat::ngram_features;
use crate::synfeat::syntactic_features;
use crate::util::order_free_mean;

/// How the "lexicon complexity" row is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconComplexity {
    /// Mean word length in characters.
    #[default]
    MeanWordLength,
    /// Mean number of vowel groups per word.
    MeanSyllables,
}

impl LexiconComplexity {
    pub fn name(self) -> &'static str {
        match self {
            LexiconComplexity::MeanWordLength => "mean_word_length",
            LexiconComplexity::MeanSyllables => "mean_syllables",
        }
    }

    fn measure(self, doc: &Document) -> Option<f64> {
        let per_word: Vec<f64> = doc
            .tokens
            .iter()
            .map(|t| t.form.as_str())
            .filter(|w| w.chars().any(char::is_alphanumeric))
            .map(|w| match self {
                LexiconComplexity::MeanWordLength => w.chars().filter(|c| c.is_alphanumeric()).count() as f64,
                LexiconComplexity::MeanSyllables => syllables(w) as f64,
            })
            .collect();
        (!per_word.is_empty()).then(|| per_word.iter().sum::<f64>() / per_word.len() as f64)
    }
}

/// Vowel-group count with a silent final `e`; at least one per word.
fn syllables(word: &str) -> usize {
    let w: Vec<char> = word.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
    let vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0;
    let mut prev = false;
    for &c in &w {
        let v = vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    let n = w.len();
    if groups > 1 && w[n - 1] == 'e' && !vowel(w[n - 2]) && w[n - 2] != 'l' {
        groups -= 1;
    }
    groups.max(1)
}

#[derive(Debug, Clone, Default)]
pub struct ProfileConfig {
    pub lexicon_complexity: LexiconComplexity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub subgroup: String,
    pub feature: String,
    /// Mean over documents where the feature is defined.
    pub mean: Option<f64>,
}

/// Corpus-level feature means, one row per line of the dataset overview.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub corpus: String,
    pub n_documents: usize,
    pub lexicon_complexity: LexiconComplexity,
    pub rows: Vec<ProfileRow>,
}

impl DatasetProfile {
    pub fn get(&self, feature: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.feature == feature).and_then(|r| r.mean)
    }
}

/// (subgroup, feature name) in overview order.
pub const PROFILE_ROWS: [(&str, &str); 26] = [
    ("lexical richness", "distinct_tokens_ratio"),
    ("lexical richness", "distinct_bigrams_ratio"),
    ("lexical richness", "distinct_trigrams_ratio"),
    ("lexical complexity", "entropy_1gram"),
    ("lexical complexity", "entropy_2gram"),
    ("lexical complexity", "entropy_3gram"),
    ("lexical complexity", "cond_entropy_2gram"),
    ("lexical complexity", "cond_entropy_3gram"),
    ("lexical complexity", "lexicon_complexity"),
    ("length of production unit", "MLC"),
    ("length of production unit", "MLS"),
    ("length of production unit", "MLT"),
    ("sentence complexity", "C/S"),
    ("sentence complexity", "dlevel_0"),
    ("sentence complexity", "dlevel_1_4"),
    ("sentence complexity", "dlevel_5_7"),
    ("amount of subordination", "C/T"),
    ("amount of subordination", "CT/T"),
    ("amount of subordination", "DC/T"),
    ("amount of subordination", "DC/C"),
    ("amount of coordination", "CP/C"),
    ("amount of coordination", "CP/T"),
    ("amount of coordination", "T/S"),
    ("particular structures", "CN/C"),
    ("particular structures", "CN/T"),
    ("particular structures", "VP/T"),
];

/// Feature values of one document used by the profile, in row order.
fn document_row(doc: &Document, config: &ProfileConfig) -> Result<Vec<Option<f64>>, CorpusError> {
    let forms: Vec<String> = doc.tokens.iter().map(|t| t.form.to_lowercase()).collect();
    let lex = ngram_features(&forms);
    let syn = doc.parsed_trees()?.map(|trees| syntactic_features(&trees));
    Ok(PROFILE_ROWS
        .iter()
        .map(|(_, name)| match *name {
            "lexicon_complexity" => config.lexicon_complexity.measure(doc),
            n if lex.feature(n).is_some() => lex.value(n),
            n => syn.as_ref().and_then(|s| s.value(n)),
        })
        .collect())
}

/// Per-feature means over documents. Syntactic rows are absent when no
/// document carries trees.
pub fn profile_corpus(corpus: &Corpus, config: &ProfileConfig) -> Result<DatasetProfile, CorpusError> {
    let rows: Vec<Vec<Option<f64>>> = corpus
        .documents
        .par_iter()
        .map(|d| document_row(d, config))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(PROFILE_ROWS.len());
    for (j, (subgroup, feature)) in PROFILE_ROWS.iter().enumerate() {
        let mut values: Vec<f64> = rows.iter().filter_map(|r| r[j]).collect();
        out.push(ProfileRow {
            subgroup: subgroup.to_string(),
            feature: feature.to_string(),
            mean: order_free_mean(&mut values),
        });
    }
    Ok(DatasetProfile {
        corpus: corpus.name.clone(),
        n_documents: corpus.documents.len(),
        lexicon_complexity: config.lexicon_complexity,
        rows: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;

    fn doc(id: &str, label: &str, words: &str, tree: Option<&str>) -> Document {
        Document {
            id: id.into(),
            subject_id: id.into(),
            label: label.into(),
            tokens: words.split(' ').map(|w| Token::new(w, None)).collect(),
            trees: tree.map(|t| vec![t.to_string()]),
            alteration_level: 0,
        }
    }

    #[test]
    fn identical_documents_profile_to_their_values() {
        let tree = "(S (NP (DT the) (NN boy)) (VP (VBZ runs)))";
        let c = Corpus::new(
            "c",
            vec![doc("a", "x", "the boy runs", Some(tree)), doc("b", "y", "the boy runs", Some(tree))],
        )
        .unwrap();
        let p = profile_corpus(&c, &ProfileConfig::default()).unwrap();
        assert_eq!(p.rows.len(), 26);
        assert_eq!(p.get("distinct_tokens_ratio"), Some(1.0));
        assert_eq!(p.get("MLS"), Some(3.0));
        assert_eq!(p.get("C/S"), Some(1.0));
        assert_eq!(p.get("dlevel_0"), Some(1.0));
        assert!((p.get("lexicon_complexity").unwrap() - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn syntactic_rows_absent_without_trees() {
        let c = Corpus::new("c", vec![doc("a", "x", "a b", None), doc("b", "y", "c d", None)]).unwrap();
        let p = profile_corpus(&c, &ProfileConfig::default()).unwrap();
        assert_eq!(p.get("MLC"), None);
        assert_eq!(p.get("dlevel_5_7"), None);
        assert!(p.get("entropy_1gram").is_some());
    }

    #[test]
    fn syllable_heuristic() {
        assert_eq!(syllables("the"), 1);
        assert_eq!(syllables("cookie"), 2);
        assert_eq!(syllables("reaching"), 2);
        assert_eq!(syllables("table"), 2);
        assert_eq!(syllables("&uh"), 1);
    }
}
