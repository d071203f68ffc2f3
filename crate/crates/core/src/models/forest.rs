use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Matrix;
use crate::util::rng_from;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART classification tree with Gini impurity.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn gini(c: [usize; 2]) -> f64 {
    let n = (c[0] + c[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = c[0] as f64 / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

fn majority(c: [usize; 2]) -> usize {
    usize::from(c[1] > c[0])
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    max_depth: usize,
    min_samples_split: usize,
    max_features: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> [usize; 2] {
        let mut c = [0; 2];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn build(&mut self, idx: &mut [usize], depth: usize) -> usize {
        let counts = self.counts(idx);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority(counts) });
        if depth >= self.max_depth || idx.len() < self.min_samples_split || counts.contains(&0) {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(idx, counts) else {
            return id;
        };
        idx.sort_by(|&a, &b| {
            let (va, vb) = (self.x[a][feature] <= threshold, self.x[b][feature] <= threshold);
            vb.cmp(&va).then(a.cmp(&b))
        });
        let cut = idx.iter().take_while(|&&i| self.x[i][feature] <= threshold).count();
        let (l, r) = idx.split_at_mut(cut);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    fn best_split(&mut self, idx: &[usize], counts: [usize; 2]) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let n = idx.len() as f64;
        let parent = gini(counts);
        let mut best: Option<(f64, usize, f64)> = None;
        let features = sample(&mut self.rng, d, self.max_features.min(d)).into_vec();
        let mut order: Vec<usize> = idx.to_vec();
        for &f in &features {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left = [0usize; 2];
            for k in 0..order.len() - 1 {
                left[self.y[order[k]]] += 1;
                let (v, next) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if v == next {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let nl = (k + 1) as f64;
                let impurity = (nl * gini(left) + (n - nl) * gini(right)) / n;
                if best.is_none_or(|(b, _, _)| impurity < b) {
                    best = Some((impurity, f, v + (next - v) / 2.0));
                }
            }
        }
        best.filter(|(imp, _, _)| *imp < parent).map(|(_, f, t)| (f, t))
    }
}

impl DecisionTree {
    pub fn fit(
        x: &Matrix,
        y: &[usize],
        sample_idx: &mut [usize],
        max_depth: usize,
        min_samples_split: usize,
        max_features: usize,
        rng: ChaCha8Rng,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            max_depth,
            min_samples_split: min_samples_split.max(2),
            max_features: max_features.max(1),
            rng,
            nodes: Vec::new(),
        };
        b.build(sample_idx, 0);
        DecisionTree { nodes: b.nodes }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class } => return *class,
                Node::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Bagged trees over bootstrap samples, `sqrt(d)` candidate features per
/// split, majority vote with ties to class 0.
#[derive(Debug, Clone)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    pub fn fit(
        x: &Matrix,
        y: &[usize],
        n_trees: usize,
        max_depth: usize,
        min_samples_split: usize,
        seed: u64,
    ) -> Self {
        let n = x.len();
        let d = x[0].len();
        let max_features = ((d as f64).sqrt().floor() as usize).max(1);
        let trees = (0..n_trees)
            .map(|t| {
                let mut rng = rng_from(&[b"forest", &seed.to_le_bytes(), &(t as u64).to_le_bytes()]);
                let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                DecisionTree::fit(x, y, &mut idx, max_depth, min_samples_split, max_features, rng)
            })
            .collect();
        RandomForest { trees }
    }

    pub fn votes(&self, row: &[f64]) -> [usize; 2] {
        let mut v = [0; 2];
        for t in &self.trees {
            v[t.predict_row(row)] += 1;
        }
        v
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        majority(self.votes(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tree_separates_a_threshold() {
        let x: Matrix = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..20).map(|i| usize::from(i >= 12)).collect();
        let mut idx: Vec<usize> = (0..20).collect();
        let t = DecisionTree::fit(&x, &y, &mut idx, 5, 2, 1, rng_from(&[b"t"]));
        assert_eq!(t.depth(), 1);
        assert_eq!(t.predict_row(&[11.4]), 0);
        assert_eq!(t.predict_row(&[11.6]), 1);
    }

    #[test]
    fn depth_is_capped_and_vote_is_majority() {
        // Alternating labels force deep trees.
        let x: Matrix = (0..64).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let y: Vec<usize> = (0..64).map(|i| i % 2).collect();
        let f = RandomForest::fit(&x, &y, 25, 5, 2, 9);
        assert!(f.trees.iter().all(|t| t.depth() <= 5));
        for row in &x {
            let votes: usize = f.trees.iter().map(|t| t.predict_row(row)).sum();
            let expected = usize::from(votes * 2 > f.trees.len());
            assert_eq!(f.predict_row(row), expected);
        }
    }
}
