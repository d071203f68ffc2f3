//! Syntactic complexity: production-unit counts, their ratios, and sentence
//! development levels.

mod dlevel;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, Document};
use crate::features::{FeatureGroup, FeatureVector};
use crate::treepat::{FlatTree, Pattern, PatternError, PatternFile, Tree};

pub use dlevel::{dlevel_classify, dlevel_distribution, DLevel, DLevelRules, DLEVEL_FEATURES};

/// The shipped production-unit pattern file.
pub const L2SCA_PATTERNS: &str = include_str!("../../data/l2sca.patterns");

pub const COUNT_FEATURES: [&str; 8] = ["S", "VP", "C", "T", "DC", "CT", "CP", "CN"];

pub const RATIO_FEATURES: [&str; 14] = [
    "MLS", "MLT", "MLC", "C/S", "VP/T", "C/T", "DC/C", "DC/T", "T/S", "CT/T", "CP/T", "CP/C",
    "CN/T", "CN/C",
];

/// All 25 syntactic feature names in output order.
pub fn syntactic_feature_names() -> Vec<&'static str> {
    COUNT_FEATURES
        .iter()
        .chain(RATIO_FEATURES.iter())
        .chain(DLEVEL_FEATURES.iter())
        .copied()
        .collect()
}

#[derive(Debug, Error)]
pub enum SynError {
    #[error("document {doc} has no parse trees")]
    TreesRequired { doc: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("pattern file: {0}")]
    Rules(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct ProductionCounts {
    pub s: usize,
    pub vp: usize,
    pub c: usize,
    pub t: usize,
    pub dc: usize,
    pub ct: usize,
    pub cp: usize,
    pub cn: usize,
}

impl ProductionCounts {
    pub fn get(&self, unit: &str) -> Option<usize> {
        Some(match unit {
            "S" => self.s,
            "VP" => self.vp,
            "C" => self.c,
            "T" => self.t,
            "DC" => self.dc,
            "CT" => self.ct,
            "CP" => self.cp,
            "CN" => self.cn,
            _ => return None,
        })
    }

    fn slot(&mut self, unit: &str) -> Option<&mut usize> {
        Some(match unit {
            "S" => &mut self.s,
            "VP" => &mut self.vp,
            "C" => &mut self.c,
            "T" => &mut self.t,
            "DC" => &mut self.dc,
            "CT" => &mut self.ct,
            "CP" => &mut self.cp,
            "CN" => &mut self.cn,
            _ => return None,
        })
    }

    fn as_array(&self) -> [usize; 8] {
        [self.s, self.vp, self.c, self.t, self.dc, self.ct, self.cp, self.cn]
    }
}

impl std::ops::Add for ProductionCounts {
    type Output = ProductionCounts;

    fn add(mut self, rhs: Self) -> Self {
        for unit in COUNT_FEATURES {
            *self.slot(unit).unwrap() += rhs.get(unit).unwrap();
        }
        self
    }
}

/// Production-unit patterns grouped by unit.
#[derive(Debug, Clone)]
pub struct UnitPatterns {
    pub version: u32,
    units: Vec<(String, Vec<Pattern>)>,
}

impl UnitPatterns {
    pub fn parse(text: &str) -> Result<Self, SynError> {
        let file = PatternFile::parse(text)?;
        let mut units: Vec<(String, Vec<Pattern>)> =
            COUNT_FEATURES.iter().map(|u| (u.to_string(), Vec::new())).collect();
        for e in file.entries {
            let [unit] = e.header.as_slice() else {
                return Err(SynError::Rules(format!("line {}: expected one unit name", e.line)));
            };
            let slot = units
                .iter_mut()
                .find(|(u, _)| u == unit)
                .ok_or_else(|| SynError::Rules(format!("line {}: unknown unit {unit:?}", e.line)))?;
            slot.1.push(e.pattern);
        }
        if let Some((u, _)) = units.iter().find(|(_, ps)| ps.is_empty()) {
            return Err(SynError::Rules(format!("no pattern for unit {u}")));
        }
        Ok(UnitPatterns { version: file.version, units })
    }

    /// The shipped pattern set.
    pub fn builtin() -> &'static UnitPatterns {
        static CELL: OnceLock<UnitPatterns> = OnceLock::new();
        CELL.get_or_init(|| UnitPatterns::parse(L2SCA_PATTERNS).expect("shipped pattern file is valid"))
    }

    /// Counts for one sentence tree.
    pub fn count_tree(&self, tree: &Tree) -> ProductionCounts {
        let rooted = tree.rooted();
        let flat = FlatTree::new(&rooted);
        let mut counts = ProductionCounts::default();
        for (unit, patterns) in &self.units {
            let nodes: BTreeSet<usize> = patterns.iter().flat_map(|p| p.counted_in(&flat)).collect();
            *counts.slot(unit).expect("known unit") = nodes.len();
        }
        counts
    }

    pub fn count(&self, trees: &[Tree]) -> ProductionCounts {
        trees.iter().map(|t| self.count_tree(t)).fold(ProductionCounts::default(), |a, b| a + b)
    }
}

/// Production-unit counts over a document's sentence trees, using the
/// shipped patterns.
pub fn count_production_units(trees: &[Tree]) -> ProductionCounts {
    UnitPatterns::builtin().count(trees)
}

/// The 14 length and ratio features. Zero denominators give absent values.
pub fn syntactic_ratios(counts: &ProductionCounts, word_count: usize) -> FeatureVector {
    let div = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
    let c = counts;
    let values = [
        div(word_count, c.s),
        div(word_count, c.t),
        div(word_count, c.c),
        div(c.c, c.s),
        div(c.vp, c.t),
        div(c.c, c.t),
        div(c.dc, c.c),
        div(c.dc, c.t),
        div(c.t, c.s),
        div(c.ct, c.t),
        div(c.cp, c.t),
        div(c.cp, c.c),
        div(c.cn, c.t),
        div(c.cn, c.c),
    ];
    let mut v = FeatureVector::new();
    for (name, value) in RATIO_FEATURES.iter().zip(values) {
        v.push(*name, FeatureGroup::Syntactic, value);
    }
    v
}

/// Word leaves across trees, punctuation and empty elements excluded.
pub fn word_count(trees: &[Tree]) -> usize {
    trees.iter().map(|t| t.word_leaves().len()).sum()
}

/// Counts, ratios and development-level proportions for a set of trees.
pub fn syntactic_features(trees: &[Tree]) -> FeatureVector {
    let counts = count_production_units(trees);
    let mut v = FeatureVector::new();
    for (name, n) in COUNT_FEATURES.iter().zip(counts.as_array()) {
        v.push(*name, FeatureGroup::Syntactic, Some(n as f64));
    }
    v.extend(syntactic_ratios(&counts, word_count(trees)));
    let dist = dlevel_distribution(trees);
    for (i, name) in DLEVEL_FEATURES.iter().enumerate() {
        v.push(*name, FeatureGroup::Syntactic, dist.map(|d| d[i]));
    }
    v
}

/// All 25 syntactic features of a document.
pub fn extract_syntactic(doc: &Document) -> Result<FeatureVector, SynError> {
    let trees = doc
        .parsed_trees()?
        .ok_or_else(|| SynError::TreesRequired { doc: doc.id.clone() })?;
    Ok(syntactic_features(&trees))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treepat::parse_ptb;

    fn counts(s: &str) -> ProductionCounts {
        count_production_units(&[parse_ptb(s).unwrap()])
    }

    #[test]
    fn simple_sentence() {
        let c = counts("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))");
        assert_eq!((c.s, c.t, c.c, c.dc, c.ct, c.vp), (1, 1, 1, 0, 0, 1));
    }

    #[test]
    fn relative_clause() {
        let c = counts(
            "(S (NP (NP (DT the) (NN boy)) (SBAR (WHNP (WP who)) (S (VP (VBD fell))))) (VP (VBZ cries)))",
        );
        assert_eq!((c.s, c.c, c.dc, c.ct, c.t, c.cn), (1, 2, 1, 1, 1, 1));
    }

    #[test]
    fn coordinated_clauses() {
        let c = counts(
            "(S (S (NP (PRP she)) (VP (VBZ washes))) (CC and) (S (NP (PRP he)) (VP (VBZ dries))))",
        );
        assert_eq!((c.c, c.t, c.vp), (2, 2, 2));
    }

    #[test]
    fn ratio_examples() {
        let c = ProductionCounts { s: 2, t: 2, c: 2, ..Default::default() };
        let v = syntactic_ratios(&c, 16);
        assert_eq!(v.value("MLS"), Some(8.0));
        assert_eq!(v.value("C/S"), Some(1.0));
        assert_eq!(v.value("T/S"), Some(1.0));
        let v = syntactic_ratios(&ProductionCounts::default(), 0);
        assert_eq!(v.len(), 14);
        assert!(v.iter().all(|f| f.value.is_none()));
    }

    #[test]
    fn names_in_order() {
        let t = parse_ptb("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap();
        let v = syntactic_features(&[t]);
        assert_eq!(v.names().collect::<Vec<_>>(), syntactic_feature_names());
        assert!(v.iter().all(|f| f.group == FeatureGroup::Syntactic));
    }

    #[test]
    fn unknown_unit_is_rejected() {
        assert!(UnitPatterns::parse("version 1\nXX => S\n").is_err());
    }
}
