use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError};
use crate::util::rng_from;

/// Fold index per document id. All documents of a subject share a fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub folds: BTreeMap<String, usize>,
}

impl FoldAssignment {
    pub fn fold_of(&self, doc_id: &str) -> Option<usize> {
        self.folds.get(doc_id).copied()
    }

    /// Positions in `doc_ids` of the test documents of `fold`.
    pub fn test_positions(&self, fold: usize, doc_ids: &[String]) -> Vec<usize> {
        doc_ids
            .iter()
            .enumerate()
            .filter(|(_, id)| self.fold_of(id) == Some(fold))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.folds.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

struct Subject {
    id: String,
    class: usize,
    docs: Vec<String>,
}

/// Subject-grouped k-fold assignment.
///
/// Subjects are shuffled under `seed`, ordered by document count (largest
/// first), and taken alternately from the two classes. Each goes to the fold
/// with the fewest documents, ties broken by the fewest documents of the
/// subject's class, then by fold index.
pub fn group_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment, CorpusError> {
    if k < 2 {
        return Err(CorpusError::Config(format!("need at least 2 folds, got {k}")));
    }
    let mut by_subject: BTreeMap<&str, (Vec<String>, [usize; 2])> = BTreeMap::new();
    for d in &corpus.documents {
        let e = by_subject.entry(d.subject_id.as_str()).or_default();
        e.0.push(d.id.clone());
        e.1[corpus.class_of(d)] += 1;
    }
    if by_subject.len() < k {
        return Err(CorpusError::Config(format!(
            "{} subjects cannot fill {k} folds",
            by_subject.len()
        )));
    }
    // A subject's class is the majority label of its documents.
    let mut per_class: [Vec<Subject>; 2] = [Vec::new(), Vec::new()];
    for (id, (docs, counts)) in by_subject {
        let class = usize::from(counts[1] > counts[0]);
        per_class[class].push(Subject { id: id.to_string(), class, docs });
    }
    for (c, subjects) in per_class.iter().enumerate() {
        if subjects.len() < 2 {
            return Err(CorpusError::Config(format!(
                "class {:?} has {} subject(s); every training split needs both classes",
                corpus.labels[c],
                subjects.len()
            )));
        }
    }
    let mut rng = rng_from(&[b"group_folds", &seed.to_le_bytes(), &(k as u64).to_le_bytes()]);
    for subjects in per_class.iter_mut() {
        subjects.shuffle(&mut rng);
        subjects.sort_by_key(|s| std::cmp::Reverse(s.docs.len()));
    }
    let mut order = Vec::new();
    let [mut a, mut b] = per_class.map(|v| v.into_iter());
    // Which class leads alternates with the seed.
    let mut turn = (seed & 1) as usize;
    loop {
        let next = if turn == 0 { a.next().or_else(|| b.next()) } else { b.next().or_else(|| a.next()) };
        match next {
            Some(s) => order.push(s),
            None => break,
        }
        turn = 1 - turn;
    }

    let mut totals = vec![0usize; k];
    let mut class_totals = vec![[0usize; 2]; k];
    let mut folds = BTreeMap::new();
    let mut subject_fold: Vec<(String, usize, usize)> = Vec::new();
    for s in order {
        let fold = (0..k)
            .min_by_key(|&f| (totals[f], class_totals[f][s.class], f))
            .expect("k >= 2");
        totals[fold] += s.docs.len();
        class_totals[fold][s.class] += s.docs.len();
        for d in &s.docs {
            folds.insert(d.clone(), fold);
        }
        subject_fold.push((s.id, s.class, fold));
    }
    // Both classes must appear outside every fold.
    for f in 0..k {
        for c in 0..2 {
            if !subject_fold.iter().any(|&(_, sc, sf)| sc == c && sf != f) {
                return Err(CorpusError::Config(format!(
                    "fold {f} would leave class {:?} out of its training split",
                    corpus.labels[c]
                )));
            }
        }
    }
    Ok(FoldAssignment { k, folds })
}
