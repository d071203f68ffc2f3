use super::{class_counts, Matrix};

/// Gaussian naive Bayes.
#[derive(Debug, Clone)]
pub struct GaussianNb {
    means: [Vec<f64>; 2],
    vars: [Vec<f64>; 2],
    log_priors: [f64; 2],
}

impl GaussianNb {
    /// With `equal_priors` both classes get prior 1/2 whatever their
    /// frequencies.
    pub fn fit(x: &Matrix, y: &[usize], equal_priors: bool, var_smoothing: f64) -> Self {
        let d = x[0].len();
        let counts = class_counts(y);
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut vars = [vec![0.0; d], vec![0.0; d]];
        for (row, &c) in x.iter().zip(y) {
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        for c in 0..2 {
            for m in &mut means[c] {
                *m /= counts[c] as f64;
            }
        }
        for (row, &c) in x.iter().zip(y) {
            for j in 0..d {
                vars[c][j] += (row[j] - means[c][j]).powi(2);
            }
        }
        // Smoothing relative to the largest feature variance of the whole set.
        let n = x.len() as f64;
        let max_var = (0..d)
            .map(|j| {
                let mu = x.iter().map(|r| r[j]).sum::<f64>() / n;
                x.iter().map(|r| (r[j] - mu).powi(2)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        let eps = var_smoothing * max_var.max(f64::MIN_POSITIVE);
        for c in 0..2 {
            for v in &mut vars[c] {
                *v = *v / counts[c] as f64 + eps;
            }
        }
        let log_priors = if equal_priors {
            [0.5f64.ln(); 2]
        } else {
            [0, 1].map(|c| (counts[c] as f64 / n).ln())
        };
        GaussianNb { means, vars, log_priors }
    }

    pub fn log_joint(&self, row: &[f64]) -> [f64; 2] {
        [0, 1].map(|c| {
            self.log_priors[c]
                + row
                    .iter()
                    .zip(&self.means[c])
                    .zip(&self.vars[c])
                    .map(|((x, m), v)| -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (x - m).powi(2) / (2.0 * v))
                    .sum::<f64>()
        })
    }

    /// Ties go to class 0.
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let [a, b] = self.log_joint(row);
        usize::from(b > a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_priors_ignore_class_frequencies() {
        // Symmetric likelihoods: class 0 at -1, class 1 at +1, same spread.
        let make = |n0: usize, n1: usize| {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for i in 0..n0 {
                x.push(vec![-1.0 + if i % 2 == 0 { 0.5 } else { -0.5 }]);
                y.push(0);
            }
            for i in 0..n1 {
                x.push(vec![1.0 + if i % 2 == 0 { 0.5 } else { -0.5 }]);
                y.push(1);
            }
            (x, y)
        };
        let (xb, yb) = make(10, 10);
        let (xi, yi) = make(90, 10);
        let balanced = GaussianNb::fit(&xb, &yb, true, 1e-9);
        let skewed = GaussianNb::fit(&xi, &yi, true, 1e-9);
        for k in -40..=40 {
            let v = k as f64 * 0.05;
            assert_eq!(balanced.predict_row(&[v]), skewed.predict_row(&[v]), "at {v}");
        }
        // The boundary sits at 0.
        assert_eq!(skewed.predict_row(&[-0.01]), 0);
        assert_eq!(skewed.predict_row(&[0.01]), 1);
        let with_priors = GaussianNb::fit(&xi, &yi, false, 1e-9);
        assert_eq!(with_priors.predict_row(&[0.1]), 0);
    }
}
