//! Seeded random word deletion.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{align_tokens, Corpus, CorpusError, Document, Token};
use crate::treepat::{parse_ptb, Tree};
use crate::util::rng_from;

#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("alteration level {0} is outside 0..=100")]
    Range(u32),
    #[error("alteration levels must be strictly increasing, got {0:?}")]
    Levels(Vec<u8>),
    #[error("document {doc} is already altered (level {level})")]
    NotOriginal { doc: String, level: u8 },
    #[error("document {0} has no tokens")]
    Empty(String),
    #[error("leaf index {index} out of range for a tree with {leaves} leaves")]
    LeafIndex { index: usize, leaves: usize },
    #[error("parser command failed: {message}\n{output}")]
    External { message: String, output: String },
    #[error("document {doc}: {message}")]
    Alignment { doc: String, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Percentage of words deleted. 0 is the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct AlterationLevel(u8);

impl AlterationLevel {
    pub const DEFAULTS: [u8; 4] = [20, 40, 60, 80];

    pub fn new(percent: u32) -> Result<Self, PerturbError> {
        if percent > 100 {
            return Err(PerturbError::Range(percent));
        }
        Ok(AlterationLevel(percent as u8))
    }

    pub fn percent(self) -> u8 {
        self.0
    }

    /// Number of tokens deleted from an `n`-token document: `p·n/100`
    /// rounded half up, leaving at least one token.
    pub fn deletion_count(self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        ((self.0 as usize * n + 50) / 100).min(n - 1)
    }
}

impl TryFrom<u32> for AlterationLevel {
    type Error = PerturbError;

    fn try_from(p: u32) -> Result<Self, Self::Error> {
        AlterationLevel::new(p)
    }
}

impl From<AlterationLevel> for u32 {
    fn from(l: AlterationLevel) -> u32 {
        l.0 as u32
    }
}

impl fmt::Display for AlterationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.0)
    }
}

/// How altered documents get their parse trees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum TreeStrategy {
    /// Remove deleted leaves from the original trees.
    Project,
    /// Run an external parser over the altered text.
    Reparse { command: String },
}

impl TreeStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            TreeStrategy::Project => "project",
            TreeStrategy::Reparse { .. } => "reparse",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationPlan {
    pub levels: Vec<AlterationLevel>,
    pub seed: u64,
    pub tree_strategy: TreeStrategy,
}

impl PerturbationPlan {
    pub fn new(levels: &[u8], seed: u64) -> Result<Self, PerturbError> {
        let plan = PerturbationPlan {
            levels: levels.iter().map(|&p| AlterationLevel::new(p as u32)).collect::<Result<_, _>>()?,
            seed,
            tree_strategy: TreeStrategy::Project,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), PerturbError> {
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PerturbError::Levels(self.levels.iter().map(|l| l.0).collect()));
        }
        Ok(())
    }
}

/// Token positions deleted from a document, drawn without replacement from a
/// generator seeded by `(seed, doc_id, level)`.
pub fn deleted_positions(n: usize, level: AlterationLevel, seed: u64, doc_id: &str) -> BTreeSet<usize> {
    let k = level.deletion_count(n);
    if k == 0 {
        return BTreeSet::new();
    }
    let mut rng = rng_from(&[b"delete", &seed.to_le_bytes(), doc_id.as_bytes(), &[level.0]]);
    sample(&mut rng, n, k).into_iter().collect()
}

/// Deletes words and projects any parse trees onto the survivors.
pub fn delete_words(doc: &Document, level: AlterationLevel, seed: u64) -> Result<Document, PerturbError> {
    delete_words_with(doc, level, seed, &TreeStrategy::Project)
}

pub fn delete_words_with(
    doc: &Document,
    level: AlterationLevel,
    seed: u64,
    strategy: &TreeStrategy,
) -> Result<Document, PerturbError> {
    if doc.alteration_level != 0 {
        return Err(PerturbError::NotOriginal {
            doc: doc.id.clone(),
            level: doc.alteration_level,
        });
    }
    if doc.tokens.is_empty() {
        return Err(PerturbError::Empty(doc.id.clone()));
    }
    if level.0 == 0 {
        return Ok(doc.clone());
    }
    let deleted = deleted_positions(doc.tokens.len(), level, seed, &doc.id);
    let tokens: Vec<Token> = doc
        .tokens
        .iter()
        .enumerate()
        .filter(|(i, _)| !deleted.contains(i))
        .map(|(_, t)| t.clone())
        .collect();
    let trees = match (doc.parsed_trees()?, strategy) {
        (None, _) => None,
        (Some(trees), TreeStrategy::Project) => Some(project_document_trees(doc, &trees, &deleted)?),
        (Some(_), TreeStrategy::Reparse { command }) => {
            let forms: Vec<&str> = tokens.iter().map(|t| t.form.as_str()).collect();
            let trees = reparse_external(&forms.join(" "), command)?;
            align_tokens(&tokens, &trees).map_err(|message| PerturbError::Alignment {
                doc: doc.id.clone(),
                message,
            })?;
            Some(trees.iter().map(Tree::render).collect())
        }
    };
    Ok(Document {
        tokens,
        trees,
        alteration_level: level.0,
        ..doc.clone()
    })
}

fn project_document_trees(
    doc: &Document,
    trees: &[Tree],
    deleted: &BTreeSet<usize>,
) -> Result<Vec<String>, PerturbError> {
    let map = align_tokens(&doc.tokens, trees).map_err(|message| PerturbError::Alignment {
        doc: doc.id.clone(),
        message,
    })?;
    let mut per_tree: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); trees.len()];
    for &pos in deleted {
        let (ti, li) = map[pos];
        per_tree[ti].insert(li);
    }
    let mut out = Vec::new();
    for (tree, del) in trees.iter().zip(&per_tree) {
        if let Some(t) = project_tree_deletion(tree, del)? {
            if !t.word_leaves().is_empty() {
                out.push(t.render());
            }
        }
    }
    Ok(out)
}

/// Removes the listed leaves (by in-order leaf index) and prunes internal
/// nodes left without leaves. `None` when every leaf is deleted.
pub fn project_tree_deletion(tree: &Tree, deleted: &BTreeSet<usize>) -> Result<Option<Tree>, PerturbError> {
    let leaves = tree.leaves().len();
    if let Some(&index) = deleted.iter().find(|&&i| i >= leaves) {
        return Err(PerturbError::LeafIndex { index, leaves });
    }
    let mut next = 0;
    Ok(prune(tree, deleted, &mut next))
}

fn prune(tree: &Tree, deleted: &BTreeSet<usize>, next: &mut usize) -> Option<Tree> {
    if tree.is_leaf() {
        let i = *next;
        *next += 1;
        return (!deleted.contains(&i)).then(|| tree.clone());
    }
    let children: Vec<Tree> = tree.children().iter().filter_map(|c| prune(c, deleted, next)).collect();
    (!children.is_empty()).then(|| Tree::node(tree.label(), children))
}

/// Runs `command` through `sh -c` with `text` on standard input and parses
/// one bracketed tree per non-empty output line.
pub fn reparse_external(text: &str, command: &str) -> Result<Vec<Tree>, PerturbError> {
    let external = |message: String, output: String| PerturbError::External { message, output };
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| external(format!("cannot start {command:?}: {e}"), String::new()))?;
    {
        let mut stdin = child.stdin.take().expect("piped stdin");
        // A parser that exits without reading its input is reported through
        // its exit status below.
        let _ = stdin.write_all(text.as_bytes());
    }
    let out = child
        .wait_with_output()
        .map_err(|e| external(format!("waiting for {command:?}: {e}"), String::new()))?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    if !out.status.success() {
        return Err(external(format!("{command:?} exited with {}", out.status), stderr));
    }
    stdout
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_ptb(l).map_err(|e| external(format!("bad tree from {command:?}: {e}"), stdout.clone())))
        .collect()
}

/// One altered corpus per plan level.
pub fn perturb_corpus(corpus: &Corpus, plan: &PerturbationPlan) -> Result<BTreeMap<u8, Corpus>, PerturbError> {
    plan.validate()?;
    let mut out = BTreeMap::new();
    for &level in &plan.levels {
        let documents = corpus
            .documents
            .par_iter()
            .map(|d| delete_words_with(d, level, plan.seed, &plan.tree_strategy))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(
            level.0,
            Corpus {
                name: corpus.name.clone(),
                labels: corpus.labels.clone(),
                documents,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(words: &[&str], trees: Option<Vec<&str>>) -> Document {
        Document {
            id: "d1".into(),
            subject_id: "s1".into(),
            label: "x".into(),
            tokens: words.iter().map(|w| Token::new(*w, None)).collect(),
            trees: trees.map(|ts| ts.into_iter().map(String::from).collect()),
            alteration_level: 0,
        }
    }

    fn level(p: u32) -> AlterationLevel {
        AlterationLevel::new(p).unwrap()
    }

    #[test]
    fn deletion_counts() {
        let ten: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = ten.iter().map(String::as_str).collect();
        assert_eq!(delete_words(&doc(&refs, None), level(20), 1).unwrap().tokens.len(), 8);
        let five = doc(&refs[..5], None);
        let out = delete_words(&five, level(80), 1).unwrap();
        assert_eq!(out.tokens.len(), 1);
        assert_eq!(out.alteration_level, 80);
        assert_eq!(delete_words(&five, level(0), 1).unwrap(), five);
        assert_eq!(level(100).deletion_count(5), 4);
        assert!(AlterationLevel::new(101).is_err());
    }

    #[test]
    fn altered_documents_are_not_realtered() {
        let d = delete_words(&doc(&["a", "b", "c"], None), level(40), 0).unwrap();
        assert!(matches!(delete_words(&d, level(20), 0), Err(PerturbError::NotOriginal { .. })));
    }

    #[test]
    fn tree_pruning() {
        let t = parse_ptb("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap();
        let none = BTreeSet::new();
        assert_eq!(project_tree_deletion(&t, &none).unwrap(), Some(t.clone()));
        let first = project_tree_deletion(&t, &BTreeSet::from([0])).unwrap().unwrap();
        assert_eq!(first.render(), "(S (NP (NN boy)) (VP (VBZ runs)))");
        let np = project_tree_deletion(&t, &BTreeSet::from([0, 1])).unwrap().unwrap();
        assert_eq!(np.render(), "(S (VP (VBZ runs)))");
        assert_eq!(project_tree_deletion(&t, &BTreeSet::from([0, 1, 2])).unwrap(), None);
        assert!(matches!(
            project_tree_deletion(&t, &BTreeSet::from([3])),
            Err(PerturbError::LeafIndex { .. })
        ));
    }

    #[test]
    fn trees_follow_deleted_tokens() {
        let d = doc(
            &["the", "boy", "runs", "she", "sits"],
            Some(vec![
                "(S (NP (DT the) (NN boy)) (VP (VBZ runs)) (. .))",
                "(S (NP (PRP she)) (VP (VBZ sits)) (. .))",
            ]),
        );
        let out = delete_words(&d, level(60), 3).unwrap();
        let trees = out.parsed_trees().unwrap().unwrap();
        let leaves: Vec<String> = trees
            .iter()
            .flat_map(|t| t.word_leaves())
            .map(|l| l.form().unwrap().to_string())
            .collect();
        assert_eq!(leaves, out.forms());
    }

    #[test]
    fn external_parser() {
        let trees = reparse_external("the boy", "cat >/dev/null; echo '(S (NP (DT the) (NN boy)))'").unwrap();
        assert_eq!(trees.len(), 1);
        assert!(matches!(reparse_external("x", "exit 1"), Err(PerturbError::External { .. })));
        let d = doc(&["the", "boy", "runs"], Some(vec!["(S (NP (DT the) (NN boy)) (VP (VBZ runs)))"]));
        let strategy = TreeStrategy::Reparse {
            command: "cat >/dev/null; echo '(S (NP (DT a) (NN dog)))'".into(),
        };
        assert!(matches!(
            delete_words_with(&d, level(40), 0, &strategy),
            Err(PerturbError::Alignment { .. })
        ));
    }

    #[test]
    fn plan_levels_increase() {
        assert!(PerturbationPlan::new(&[20, 40, 60, 80], 1).is_ok());
        assert!(PerturbationPlan::new(&[40, 20], 1).is_err());
        assert!(PerturbationPlan::new(&[20, 20], 1).is_err());
    }
}
