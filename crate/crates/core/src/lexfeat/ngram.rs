//! N-gram counts and entropies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramStats {
    /// Number of distinct n-grams.
    pub distinct: usize,
    /// Distinct n-grams occurring exactly once.
    pub once: usize,
    /// `once / distinct`.
    pub once_ratio: f64,
}

fn counts<S: AsRef<str>>(tokens: &[S], n: usize) -> BTreeMap<Vec<&str>, usize> {
    let mut out = BTreeMap::new();
    if tokens.len() < n {
        return out;
    }
    for w in tokens.windows(n) {
        *out.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
    }
    out
}

fn check_order(n: usize, allowed: std::ops::RangeInclusive<usize>) {
    assert!(allowed.contains(&n), "n-gram order {n} outside {allowed:?}");
}

/// Distinct and hapax n-gram counts. `None` with fewer than `n` tokens.
pub fn ngram_stats<S: AsRef<str>>(tokens: &[S], n: usize) -> Option<NgramStats> {
    check_order(n, 1..=3);
    if tokens.len() < n || tokens.is_empty() {
        return None;
    }
    let c = counts(tokens, n);
    let distinct = c.len();
    let once = c.values().filter(|&&f| f == 1).count();
    Some(NgramStats {
        distinct,
        once,
        once_ratio: once as f64 / distinct as f64,
    })
}

/// Shannon entropy in bits of the n-gram distribution.
pub fn shannon_entropy<S: AsRef<str>>(tokens: &[S], n: usize) -> Option<f64> {
    check_order(n, 1..=3);
    if tokens.len() < n || tokens.is_empty() {
        return None;
    }
    let c = counts(tokens, n);
    let len = (tokens.len() + 1 - n) as f64;
    let h: f64 = c
        .values()
        .map(|&f| {
            let p = f as f64 / len;
            -p * p.log2()
        })
        .sum();
    Some(h.max(0.0))
}

/// Entropy in bits of the last token of each n-gram given the preceding
/// `n - 1` tokens. Context frequencies count occurrences as a context, so
/// each context's successor distribution sums to one.
pub fn conditional_entropy<S: AsRef<str>>(tokens: &[S], n: usize) -> Option<f64> {
    check_order(n, 2..=3);
    if tokens.len() < n {
        return None;
    }
    let grams = counts(tokens, n);
    let mut contexts: BTreeMap<&[&str], usize> = BTreeMap::new();
    for (g, &f) in &grams {
        *contexts.entry(&g[..n - 1]).or_insert(0) += f;
    }
    let len = (tokens.len() + 1 - n) as f64;
    let h: f64 = grams
        .iter()
        .map(|(g, &f)| {
            let ctx = contexts[&g[..n - 1]] as f64;
            -(f as f64 / len) * (f as f64 / ctx).log2()
        })
        .sum();
    Some(h.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn ngram_examples() {
        let s = ngram_stats(&toks("a a a a"), 1).unwrap();
        assert_eq!((s.distinct, s.once, s.once_ratio), (1, 0, 0.0));
        let s = ngram_stats(&toks("a b c d"), 1).unwrap();
        assert_eq!((s.distinct, s.once, s.once_ratio), (4, 4, 1.0));
        let s = ngram_stats(&toks("the cat sat the cat ran"), 2).unwrap();
        assert_eq!((s.distinct, s.once, s.once_ratio), (4, 3, 0.75));
        assert!(ngram_stats(&toks("a b"), 3).is_none());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&toks("a a a a"), 1), Some(0.0));
        assert!((shannon_entropy(&toks("a b c d"), 1).unwrap() - 2.0).abs() < 1e-12);
        // {2,2,1,1}/6, summed by hand.
        assert!((shannon_entropy(&toks("the cat sat the cat ran"), 1).unwrap() - 1.918296).abs() < 1e-6);
        assert!(shannon_entropy::<&str>(&[], 1).is_none());
    }

    #[test]
    fn conditional_entropy_examples() {
        assert_eq!(conditional_entropy(&toks("a b a b a b"), 2), Some(0.0));
        assert!((conditional_entropy(&toks("a a a b"), 2).unwrap() - 0.918296).abs() < 1e-6);
        assert!(conditional_entropy(&toks("a"), 2).is_none());
    }

    #[test]
    #[should_panic]
    fn conditional_entropy_rejects_unigrams() {
        conditional_entropy(&toks("a b"), 1);
    }
}
