use super::Matrix;

const TAU: f64 = 1e-12;

/// Soft-margin SVM with an RBF kernel, trained by sequential minimal
/// optimization using maximal-violating-pair selection.
#[derive(Debug, Clone)]
pub struct Svm {
    pub gamma: f64,
    support: Matrix,
    /// `alpha_i * y_i` per support vector.
    coef: Vec<f64>,
    rho: f64,
    pub iterations: usize,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// 1 / (d × mean per-column population variance).
pub(crate) fn default_gamma(x: &Matrix) -> f64 {
    let n = x.len() as f64;
    let d = x[0].len();
    let mean_var = (0..d)
        .map(|j| {
            let mu = x.iter().map(|r| r[j]).sum::<f64>() / n;
            x.iter().map(|r| (r[j] - mu).powi(2)).sum::<f64>() / n
        })
        .sum::<f64>()
        / d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0 / d as f64
    }
}

impl Svm {
    pub fn fit(x: &Matrix, labels: &[usize], c: f64, tol: f64, gamma: Option<f64>, max_iter: usize) -> Self {
        let n = x.len();
        let gamma = gamma.unwrap_or_else(|| default_gamma(x));
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let k: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| rbf(gamma, &x[i], &x[j])).collect())
            .collect();
        let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
        let mut alpha = vec![0.0; n];
        // Gradient of the dual objective 1/2 a'Qa - e'a.
        let mut g = vec![-1.0; n];
        let up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
        let low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

        let mut iterations = 0;
        while iterations < max_iter {
            let mut i = usize::MAX;
            let mut gmax = f64::NEG_INFINITY;
            let mut j = usize::MAX;
            let mut gmin = f64::INFINITY;
            for t in 0..n {
                let v = -y[t] * g[t];
                if up(alpha[t], y[t]) && v > gmax {
                    gmax = v;
                    i = t;
                }
                if low(alpha[t], y[t]) && v < gmin {
                    gmin = v;
                    j = t;
                }
            }
            if i == usize::MAX || j == usize::MAX || gmax - gmin < tol {
                break;
            }
            iterations += 1;
            let (ai, aj) = (alpha[i], alpha[j]);
            if y[i] != y[j] {
                let quad = (k[i][i] + k[j][j] + 2.0 * q(i, j)).max(TAU);
                let delta = (-g[i] - g[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (k[i][i] + k[j][j] - 2.0 * q(i, j)).max(TAU);
                let delta = (g[i] - g[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
            let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
            for (t, gt) in g.iter_mut().enumerate() {
                *gt += q(i, t) * di + q(j, t) * dj;
            }
        }
        if iterations == max_iter {
            log::warn!("SMO stopped after {max_iter} iterations without reaching tolerance {tol}");
        }

        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        let mut free_sum = 0.0;
        let mut free = 0usize;
        for t in 0..n {
            let yg = y[t] * g[t];
            if alpha[t] >= c {
                if y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if alpha[t] <= 0.0 {
                if y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                free_sum += yg;
            }
        }
        let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };

        let (support, coef): (Matrix, Vec<f64>) = (0..n)
            .filter(|&t| alpha[t] > 0.0)
            .map(|t| (x[t].clone(), alpha[t] * y[t]))
            .unzip();
        Svm { gamma, support, coef, rho, iterations }
    }

    pub fn decision(&self, row: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, a)| a * rbf(self.gamma, s, row))
            .sum::<f64>()
            - self.rho
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        usize::from(self.decision(row) > 0.0)
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_needs_the_kernel() {
        let x: Matrix = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let y = [0, 0, 1, 1];
        let m = Svm::fit(&x, &y, 10.0, 1e-3, Some(2.0), 10_000);
        for (row, &label) in x.iter().zip(&y) {
            assert_eq!(m.predict_row(row), label);
        }
    }

    #[test]
    fn default_gamma_uses_mean_variance() {
        let x: Matrix = vec![vec![0.0, 0.0], vec![2.0, 4.0]];
        // Variances 1 and 4, mean 2.5, d = 2.
        assert!((default_gamma(&x) - 0.2).abs() < 1e-12);
    }
}
