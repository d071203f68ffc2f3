use rand::Rng;

use super::Matrix;
use crate::util::rng_from;

#[derive(Debug, Clone)]
struct Layer {
    /// `w[out][in]`.
    w: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Layer {
    fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.b)
            .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }
}

/// Feed-forward network: ReLU hidden layers, one sigmoid output unit,
/// binary cross-entropy, full-batch Adam.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Layer>,
}

struct Adam {
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    t: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn step(&mut self, params: &mut [&mut f64], grads: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.b1.powi(self.t);
        let c2 = 1.0 - self.b2.powi(self.t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            self.m[k] = self.b1 * self.m[k] + (1.0 - self.b1) * g;
            self.v[k] = self.b2 * self.v[k] + (1.0 - self.b2) * g * g;
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            **p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Mlp {
    /// `adam` is `[learning rate, beta1, beta2, epsilon]`.
    pub fn fit(x: &Matrix, y: &[usize], hidden: &[usize], epochs: usize, adam: [f64; 4], seed: u64) -> Self {
        let mut rng = rng_from(&[b"mlp", &seed.to_le_bytes()]);
        let mut sizes = vec![x[0].len()];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        // Glorot-uniform weights and biases.
        let mut layers: Vec<Layer> = sizes
            .windows(2)
            .map(|w| {
                let bound = (6.0 / (w[0] + w[1]) as f64).sqrt();
                Layer {
                    w: (0..w[1]).map(|_| (0..w[0]).map(|_| rng.gen_range(-bound..bound)).collect()).collect(),
                    b: (0..w[1]).map(|_| rng.gen_range(-bound..bound)).collect(),
                }
            })
            .collect();
        let n_params: usize = layers.iter().map(|l| l.b.len() * (l.w[0].len() + 1)).sum();
        let mut opt = Adam {
            lr: adam[0],
            b1: adam[1],
            b2: adam[2],
            eps: adam[3],
            t: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        };
        let n = x.len() as f64;
        for _ in 0..epochs {
            let mut grad_w: Vec<Vec<Vec<f64>>> =
                layers.iter().map(|l| vec![vec![0.0; l.w[0].len()]; l.w.len()]).collect();
            let mut grad_b: Vec<Vec<f64>> = layers.iter().map(|l| vec![0.0; l.b.len()]).collect();
            for (row, &label) in x.iter().zip(y) {
                // Forward pass, keeping every layer's activations.
                let mut acts = vec![row.clone()];
                for (li, layer) in layers.iter().enumerate() {
                    let z = layer.forward(acts.last().unwrap());
                    let a = if li + 1 == layers.len() {
                        z.into_iter().map(sigmoid).collect()
                    } else {
                        z.into_iter().map(|v| v.max(0.0)).collect()
                    };
                    acts.push(a);
                }
                // Sigmoid with cross-entropy: output delta is p - y.
                let mut delta = vec![acts.last().unwrap()[0] - label as f64];
                for li in (0..layers.len()).rev() {
                    let input = &acts[li];
                    for (o, d) in delta.iter().enumerate() {
                        grad_b[li][o] += d / n;
                        for (i, a) in input.iter().enumerate() {
                            grad_w[li][o][i] += d * a / n;
                        }
                    }
                    if li > 0 {
                        delta = (0..input.len())
                            .map(|i| {
                                if input[i] <= 0.0 {
                                    0.0
                                } else {
                                    delta.iter().enumerate().map(|(o, d)| d * layers[li].w[o][i]).sum()
                                }
                            })
                            .collect();
                    }
                }
            }
            let grads: Vec<f64> = grad_w
                .iter()
                .zip(&grad_b)
                .flat_map(|(gw, gb)| gw.iter().flatten().chain(gb.iter()).copied())
                .collect();
            let mut params: Vec<&mut f64> = layers
                .iter_mut()
                .flat_map(|l| l.w.iter_mut().flatten().chain(l.b.iter_mut()))
                .collect();
            opt.step(&mut params, &grads);
        }
        Mlp { layers }
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        let mut a = row.to_vec();
        for (li, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&a);
            a = if li + 1 == self.layers.len() {
                z.into_iter().map(sigmoid).collect()
            } else {
                z.into_iter().map(|v| v.max(0.0)).collect()
            };
        }
        a[0]
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        usize::from(self.probability(row) > 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn training_reduces_loss() {
        let x: Matrix = vec![vec![0.5, -1.0], vec![-0.3, 0.8], vec![1.2, 0.1]];
        let y = [1, 0, 1];
        let loss = |m: &Mlp| -> f64 {
            x.iter()
                .zip(&y)
                .map(|(r, &l)| {
                    let p = m.probability(r).clamp(1e-15, 1.0 - 1e-15);
                    -(l as f64 * p.ln() + (1.0 - l as f64) * (1.0 - p).ln())
                })
                .sum::<f64>()
                / 3.0
        };
        let before = Mlp::fit(&x, &y, &[4], 0, [1e-4, 0.9, 0.999, 1e-8], 1);
        let after = Mlp::fit(&x, &y, &[4], 50, [1e-4, 0.9, 0.999, 1e-8], 1);
        assert!(loss(&after) < loss(&before));
    }
}
