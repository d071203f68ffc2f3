use std::collections::BTreeSet;

use proptest::prelude::*;

use lexsyn::lexfeat::{conditional_entropy, shannon_entropy};
use lexsyn::perturb::{deleted_positions, project_tree_deletion, AlterationLevel};
use lexsyn::stats::kruskal_wallis;
use lexsyn::synth::{text_corpus, TextSpec};
use lexsyn::treepat::{parse_ptb, Tree};

fn sample_trees() -> Vec<Tree> {
    let c = text_corpus(&TextSpec {
        subjects_per_class: 2,
        ..TextSpec::default()
    });
    c.documents
        .iter()
        .flat_map(|d| d.trees.clone().unwrap())
        .map(|t| parse_ptb(&t).unwrap())
        .collect()
}

fn forms(t: &Tree) -> Vec<String> {
    t.leaves().iter().map(|l| l.form().unwrap().to_string()).collect()
}

proptest! {
    #[test]
    fn deletion_count_and_positions(n in 1usize..400, p in 0u32..=100, seed: u64) {
        let level = AlterationLevel::new(p).unwrap();
        let k = level.deletion_count(n);
        prop_assert!(k < n);
        let del = deleted_positions(n, level, seed, "doc");
        prop_assert_eq!(del.len(), k);
        prop_assert!(del.iter().all(|&i| i < n));
        prop_assert_eq!(&del, &deleted_positions(n, level, seed, "doc"));
    }

    #[test]
    fn projection_keeps_surviving_leaves_in_order(pick in 0usize..64, mask: u64) {
        let trees = sample_trees();
        let tree = &trees[pick % trees.len()];
        let original = forms(tree);
        let deleted: BTreeSet<usize> = (0..original.len()).filter(|i| mask >> (i % 64) & 1 == 1).collect();
        let want: Vec<String> = original
            .iter()
            .enumerate()
            .filter(|(i, _)| !deleted.contains(i))
            .map(|(_, f)| f.clone())
            .collect();
        match project_tree_deletion(tree, &deleted).unwrap() {
            None => prop_assert!(want.is_empty()),
            Some(t) => {
                prop_assert_eq!(forms(&t), want);
                prop_assert_eq!(parse_ptb(&t.render()).unwrap(), t);
            }
        }
    }

    #[test]
    fn entropies_are_bounded(seq in prop::collection::vec(0u8..6, 3..80)) {
        let words: Vec<String> = seq.iter().map(|t| t.to_string()).collect();
        for n in 1..=3 {
            let h = shannon_entropy(&words, n).unwrap();
            let windows = (words.len() + 1 - n) as f64;
            prop_assert!(h >= 0.0 && h <= windows.log2() + 1e-12);
        }
        for n in 2..=3 {
            let c = conditional_entropy(&words, n).unwrap();
            // At most the entropy of the next token, bounded by the vocabulary.
            prop_assert!(c >= 0.0 && c <= 6f64.log2() + 1e-12);
            prop_assert!(c <= shannon_entropy(&words, n).unwrap() + 1e-12);
        }
    }

    #[test]
    fn kruskal_wallis_is_symmetric(
        a in prop::collection::vec(-5i32..5, 2..30),
        b in prop::collection::vec(-5i32..5, 2..30),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        match (kruskal_wallis(&a, &b), kruskal_wallis(&b, &a)) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x.h - y.h).abs() < 1e-9);
                prop_assert!(x.h >= 0.0 && (0.0..=1.0).contains(&x.p));
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric failure"),
        }
    }
}
