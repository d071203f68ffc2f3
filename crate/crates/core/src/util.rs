use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Stable 64-bit seed from a list of parts. Independent of platform and of
/// the standard library's hasher.
pub(crate) fn derive_seed(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub(crate) fn rng_from(parts: &[&[u8]]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parts))
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Mean of the values, summed in sorted order so the result does not depend
/// on input order.
pub(crate) fn order_free_mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_part_sensitive() {
        let a = derive_seed(&[b"7", b"doc1", b"20"]);
        assert_eq!(a, derive_seed(&[b"7", b"doc1", b"20"]));
        assert_ne!(a, derive_seed(&[b"7", b"doc12", b"0"]));
        assert_ne!(derive_seed(&[b"ab", b"c"]), derive_seed(&[b"a", b"bc"]));
    }

    #[test]
    fn order_free_mean_ignores_permutation() {
        let mut a = vec![0.1, 1e16, -1e16, 0.3];
        let mut b = vec![-1e16, 0.3, 0.1, 1e16];
        assert_eq!(order_free_mean(&mut a), order_free_mean(&mut b));
        assert_eq!(order_free_mean(&mut []), None);
    }
}
