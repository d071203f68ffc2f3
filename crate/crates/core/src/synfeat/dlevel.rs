use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::SynError;
use crate::treepat::{FlatTree, Pattern, PatternFile, Tree};

/// The shipped development-level rule table.
pub const DLEVEL_RULES: &str = include_str!("../../data/dlevel.patterns");

pub const DLEVEL_FEATURES: [&str; 3] = ["dlevel_0", "dlevel_1_4", "dlevel_5_7"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DLevel {
    pub level: u8,
    /// Name of the rule that fired, if any.
    pub rule: Option<String>,
    /// Set when the sentence has no clause at all (fragments, bare phrases),
    /// so level 0 is a default rather than a finding.
    pub no_clause: bool,
}

#[derive(Debug, Clone)]
struct Rule {
    level: u8,
    name: String,
    min: usize,
    patterns: Vec<Pattern>,
}

/// Ordered rule table, highest level first.
#[derive(Debug, Clone)]
pub struct DLevelRules {
    pub version: u32,
    rules: Vec<Rule>,
}

impl DLevelRules {
    pub fn parse(text: &str) -> Result<Self, SynError> {
        let file = PatternFile::parse(text)?;
        let mut rules: Vec<Rule> = Vec::new();
        for e in file.entries {
            let bad = |m: &str| SynError::Rules(format!("line {}: {m}", e.line));
            let [level, name, min] = e.header.as_slice() else {
                return Err(bad("expected `LEVEL NAME MIN`"));
            };
            let level: u8 = level.parse().map_err(|_| bad("level must be an integer"))?;
            if !(1..=7).contains(&level) {
                return Err(bad("level must be in 1..=7"));
            }
            let min: usize = min.parse().map_err(|_| bad("MIN must be an integer"))?;
            match rules.iter_mut().find(|r| r.level == level && r.name == *name) {
                Some(r) if r.min != min => return Err(bad("MIN differs from earlier lines of this rule")),
                Some(r) => r.patterns.push(e.pattern),
                None => rules.push(Rule {
                    level,
                    name: name.clone(),
                    min: min.max(1),
                    patterns: vec![e.pattern],
                }),
            }
        }
        rules.sort_by_key(|r| std::cmp::Reverse(r.level));
        Ok(DLevelRules { version: file.version, rules })
    }

    pub fn builtin() -> &'static DLevelRules {
        static CELL: OnceLock<DLevelRules> = OnceLock::new();
        CELL.get_or_init(|| DLevelRules::parse(DLEVEL_RULES).expect("shipped rule table is valid"))
    }

    pub fn classify(&self, tree: &Tree) -> DLevel {
        let rooted = tree.rooted();
        let flat = FlatTree::new(&rooted);
        for rule in &self.rules {
            let nodes: BTreeSet<usize> = rule.patterns.iter().flat_map(|p| p.counted_in(&flat)).collect();
            if nodes.len() >= rule.min {
                return DLevel {
                    level: rule.level,
                    rule: Some(rule.name.clone()),
                    no_clause: false,
                };
            }
        }
        DLevel {
            level: 0,
            rule: None,
            no_clause: !has_clause(tree),
        }
    }
}

fn has_clause(tree: &Tree) -> bool {
    matches!(tree.category(), "S" | "SINV" | "SQ" | "SBARQ" | "SBAR")
        || tree.children().iter().any(has_clause)
}

/// Development level of one sentence under the shipped rule table.
pub fn dlevel_classify(tree: &Tree) -> DLevel {
    DLevelRules::builtin().classify(tree)
}

/// Proportions of sentences at level 0, levels 1 to 4, and levels 5 to 7.
/// `None` without sentences.
pub fn dlevel_distribution(trees: &[Tree]) -> Option<[f64; 3]> {
    if trees.is_empty() {
        return None;
    }
    let mut bins = [0usize; 3];
    for t in trees {
        let bin = match dlevel_classify(t).level {
            0 => 0,
            1..=4 => 1,
            _ => 2,
        };
        bins[bin] += 1;
    }
    let n = trees.len() as f64;
    Some(bins.map(|b| b as f64 / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treepat::parse_ptb;

    fn level(s: &str) -> u8 {
        dlevel_classify(&parse_ptb(s).unwrap()).level
    }

    #[test]
    fn progressive_without_embedding_is_level_zero() {
        assert_eq!(
            level("(S (NP (NN mother)) (VP (VBZ is) (VP (VBG drying) (NP (DT the) (NNS dishes)))))"),
            0
        );
    }

    #[test]
    fn object_relative_clause() {
        // Walkthrough: one SBAR, so level 7 needs a second embedding and does
        // not fire; the SBAR sits on the object NP under VP, level 3.
        let l = level(
            "(S (NP (PRP she)) (VP (VBZ sees) (NP (NP (DT the) (NN jar)) (SBAR (WHNP (WDT that)) (S (VP (VBZ is) (ADJP (JJ open))))))))",
        );
        assert_eq!(l, 3);
    }

    #[test]
    fn relative_and_subordinate_clause() {
        let l = level(
            "(S (NP (PRP she)) (VP (VBZ sees) (NP (NP (DT the) (NN jar)) (SBAR (WHNP (WDT that)) (S (VP (VBZ is) (ADJP (JJ open)))))) (SBAR (IN because) (S (NP (PRP it)) (VP (VBZ falls))))))",
        );
        assert_eq!(l, 7);
    }

    #[test]
    fn fragment_is_flagged() {
        let d = dlevel_classify(&parse_ptb("(INTJ (UH okay))").unwrap());
        assert_eq!(d.level, 0);
        assert!(d.no_clause);
    }

    #[test]
    fn distribution() {
        let simple = parse_ptb("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap();
        let complex = parse_ptb(
            "(S (SBAR (IN if) (S (NP (PRP it)) (VP (VBZ falls)))) (NP (PRP he)) (VP (VBZ says) (SBAR (IN that) (S (NP (PRP it)) (VP (VBD broke))))))",
        )
        .unwrap();
        assert_eq!(dlevel_distribution(std::slice::from_ref(&simple)), Some([1.0, 0.0, 0.0]));
        assert_eq!(dlevel_distribution(&[simple, complex]), Some([0.5, 0.0, 0.5]));
        assert_eq!(dlevel_distribution(&[]), None);
    }
}
