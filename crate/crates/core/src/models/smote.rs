use rand::distributions::Open01;
use rand::Rng;

use super::{class_counts, Matrix, ModelError};
use crate::util::rng_from;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Balances the classes by adding synthetic minority rows after the
/// originals. Each synthetic row is `x + t·(nn − x)` for a random minority
/// row `x`, one of its `k` nearest minority neighbours `nn` (capped at
/// minority size − 1), and `t` in (0, 1).
pub fn smote_oversample(x: &Matrix, y: &[usize], k: usize, seed: u64) -> Result<(Matrix, Vec<usize>), ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::Length(y.len(), x.len()));
    }
    if let Some(&l) = y.iter().find(|&&l| l > 1) {
        return Err(ModelError::Label(l));
    }
    let counts = class_counts(y);
    if counts.contains(&0) {
        return Err(ModelError::SingleClass);
    }
    let mut out_x = x.clone();
    let mut out_y = y.to_vec();
    if counts[0] == counts[1] {
        return Ok((out_x, out_y));
    }
    let minority = usize::from(counts[1] < counts[0]);
    let members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority).collect();
    let need = counts[1 - minority] - counts[minority];
    let mut rng = rng_from(&[b"smote", &seed.to_le_bytes()]);

    if members.len() == 1 {
        log::warn!("SMOTE: minority class has one sample; duplicating it {need} time(s)");
        for _ in 0..need {
            out_x.push(x[members[0]].clone());
            out_y.push(minority);
        }
        return Ok((out_x, out_y));
    }

    let k = k.clamp(1, members.len() - 1);
    let neighbours: Vec<Vec<usize>> = members
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (dist2(&x[i], &x[j]), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();
    for _ in 0..need {
        let m = rng.gen_range(0..members.len());
        let base = &x[members[m]];
        let nn = &x[neighbours[m][rng.gen_range(0..k)]];
        let t: f64 = rng.sample(Open01);
        out_x.push(base.iter().zip(nn).map(|(a, b)| a + t * (b - a)).collect());
        out_y.push(minority);
    }
    Ok((out_x, out_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_input_is_unchanged() {
        let x = vec![vec![0.0], vec![1.0]];
        let (ox, oy) = smote_oversample(&x, &[0, 1], 5, 1).unwrap();
        assert_eq!((ox, oy), (x, vec![0, 1]));
    }

    #[test]
    fn two_point_minority_interpolates_on_the_diagonal() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 5.0], vec![6.0, 6.0], vec![7.0, 7.0]];
        let (ox, oy) = smote_oversample(&x, &[1, 1, 0, 0, 0], 5, 3).unwrap();
        assert_eq!(oy, vec![1, 1, 0, 0, 0, 1]);
        let p = &ox[5];
        assert_eq!(p[0], p[1]);
        assert!(p[0] > 0.0 && p[0] < 1.0);
    }

    #[test]
    fn single_class_is_an_error() {
        assert!(matches!(
            smote_oversample(&vec![vec![0.0], vec![1.0]], &[1, 1], 5, 0),
            Err(ModelError::SingleClass)
        ));
    }

    #[test]
    fn one_sample_minority_is_duplicated() {
        let x = vec![vec![3.0], vec![0.0], vec![1.0], vec![2.0]];
        let (ox, oy) = smote_oversample(&x, &[1, 0, 0, 0], 5, 0).unwrap();
        assert_eq!(oy.iter().filter(|&&l| l == 1).count(), 3);
        assert!(ox[4..].iter().all(|r| r == &vec![3.0]));
    }
}
