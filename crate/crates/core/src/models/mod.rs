//! Classifiers, oversampling, cross-validation and scoring.

mod cv;
mod forest;
mod gnb;
mod metrics;
mod mlp;
mod smote;
mod svm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cv::{cross_validate, CVResult, FoldOutcome, Standardizer};
pub use forest::{DecisionTree, RandomForest};
pub use gnb::GaussianNb;
pub use metrics::{confusion, macro_f1, macro_f1_over};
pub use mlp::Mlp;
pub use smote::smote_oversample;
pub use svm::Svm;

/// Row-major feature matrix.
pub type Matrix = Vec<Vec<f64>>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data has a single class")]
    SingleClass,
    #[error("class {class} has {count} sample(s); need at least {need}")]
    TooFew { class: usize, count: usize, need: usize },
    #[error("expected {expected} columns, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} labels for {1} rows")]
    Length(usize, usize),
    #[error("label {0} is not a class index in 0..2")]
    Label(usize),
    #[error("no usable feature columns")]
    NoFeatures,
    #[error("fold assignment: {0}")]
    Folds(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gnb,
    Rf,
    Svm,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Gnb, ModelKind::Rf, ModelKind::Svm, ModelKind::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Gnb => "gnb",
            ModelKind::Rf => "rf",
            ModelKind::Svm => "svm",
            ModelKind::Mlp => "mlp",
        }
    }

    /// Whether the model is trained on standardized features.
    pub fn standardized(self) -> bool {
        matches!(self, ModelKind::Svm | ModelKind::Mlp)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gnb" => Ok(ModelKind::Gnb),
            "rf" => Ok(ModelKind::Rf),
            "svm" => Ok(ModelKind::Svm),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(format!("unknown model {other:?} (expected gnb, rf, svm or mlp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelParams {
    Gnb {
        equal_priors: bool,
        /// Added to every variance, as a fraction of the largest one.
        var_smoothing: f64,
    },
    Rf {
        n_trees: usize,
        max_depth: usize,
        min_samples_split: usize,
    },
    Svm {
        c: f64,
        tol: f64,
        /// `None`: 1 / (features × mean feature variance) of the training data.
        gamma: Option<f64>,
        max_iter: usize,
    },
    Mlp {
        hidden: Vec<usize>,
        epochs: usize,
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
}

impl ModelParams {
    pub fn defaults(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Gnb => ModelParams::Gnb {
                equal_priors: true,
                var_smoothing: 1e-9,
            },
            ModelKind::Rf => ModelParams::Rf {
                n_trees: 100,
                max_depth: 5,
                min_samples_split: 2,
            },
            ModelKind::Svm => ModelParams::Svm {
                c: 1.0,
                tol: 1e-3,
                gamma: None,
                max_iter: 1_000_000,
            },
            ModelKind::Mlp => ModelParams::Mlp {
                hidden: vec![10, 10],
                epochs: 200,
                learning_rate: 0.001,
                beta1: 0.9,
                beta2: 0.999,
                epsilon: 1e-8,
            },
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Gnb { .. } => ModelKind::Gnb,
            ModelParams::Rf { .. } => ModelKind::Rf,
            ModelParams::Svm { .. } => ModelKind::Svm,
            ModelParams::Mlp { .. } => ModelKind::Mlp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub params: ModelParams,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        ModelSpec {
            params: ModelParams::defaults(kind),
            seed,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind()
    }
}

#[derive(Debug, Clone)]
enum Fitted {
    Gnb(GaussianNb),
    Rf(RandomForest),
    Svm(Svm),
    Mlp(Mlp),
}

/// What training decided beyond the spec.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    /// Input columns dropped for having zero variance.
    pub dropped_columns: Vec<usize>,
    /// RBF width actually used by the SVM.
    pub gamma: Option<f64>,
    pub support_vectors: Option<usize>,
    pub svm_iterations: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub info: ModelInfo,
    n_inputs: usize,
    kept: Vec<usize>,
    fitted: Fitted,
}

fn check_xy(x: &Matrix, y: &[usize]) -> Result<usize, ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::Length(y.len(), x.len()));
    }
    if let Some(&l) = y.iter().find(|&&l| l > 1) {
        return Err(ModelError::Label(l));
    }
    let d = x.first().map_or(0, Vec::len);
    if let Some(r) = x.iter().find(|r| r.len() != d) {
        return Err(ModelError::Dimension { expected: d, got: r.len() });
    }
    Ok(d)
}

pub(crate) fn class_counts(y: &[usize]) -> [usize; 2] {
    let mut c = [0; 2];
    for &l in y {
        c[l] += 1;
    }
    c
}

/// Fits a model. Zero-variance columns are dropped and listed in the model
/// info.
pub fn train(spec: &ModelSpec, x: &Matrix, y: &[usize]) -> Result<Model, ModelError> {
    let d = check_xy(x, y)?;
    let counts = class_counts(y);
    if counts.contains(&0) {
        return Err(ModelError::SingleClass);
    }
    for (class, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(ModelError::TooFew { class, count, need: 2 });
        }
    }
    let (kept, dropped): (Vec<usize>, Vec<usize>) = (0..d).partition(|&j| {
        let first = x[0][j];
        x.iter().any(|r| r[j] != first)
    });
    if !dropped.is_empty() {
        log::warn!("dropping {} zero-variance column(s): {dropped:?}", dropped.len());
    }
    if kept.is_empty() {
        return Err(ModelError::NoFeatures);
    }
    let xs: Matrix = x.iter().map(|r| kept.iter().map(|&j| r[j]).collect()).collect();
    let mut info = ModelInfo {
        dropped_columns: dropped,
        ..ModelInfo::default()
    };
    let fitted = match &spec.params {
        ModelParams::Gnb { equal_priors, var_smoothing } => {
            Fitted::Gnb(GaussianNb::fit(&xs, y, *equal_priors, *var_smoothing))
        }
        ModelParams::Rf { n_trees, max_depth, min_samples_split } => Fitted::Rf(RandomForest::fit(
            &xs,
            y,
            *n_trees,
            *max_depth,
            *min_samples_split,
            spec.seed,
        )),
        ModelParams::Svm { c, tol, gamma, max_iter } => {
            let svm = Svm::fit(&xs, y, *c, *tol, *gamma, *max_iter);
            info.gamma = Some(svm.gamma);
            info.support_vectors = Some(svm.n_support());
            info.svm_iterations = Some(svm.iterations);
            Fitted::Svm(svm)
        }
        ModelParams::Mlp { hidden, epochs, learning_rate, beta1, beta2, epsilon } => Fitted::Mlp(Mlp::fit(
            &xs,
            y,
            hidden,
            *epochs,
            [*learning_rate, *beta1, *beta2, *epsilon],
            spec.seed,
        )),
    };
    Ok(Model {
        spec: spec.clone(),
        info,
        n_inputs: d,
        kept,
        fitted,
    })
}

/// Class index per row.
pub fn predict(model: &Model, x: &Matrix) -> Result<Vec<usize>, ModelError> {
    if let Some(r) = x.iter().find(|r| r.len() != model.n_inputs) {
        return Err(ModelError::Dimension {
            expected: model.n_inputs,
            got: r.len(),
        });
    }
    Ok(x
        .iter()
        .map(|row| {
            let r: Vec<f64> = model.kept.iter().map(|&j| row[j]).collect();
            match &model.fitted {
                Fitted::Gnb(m) => m.predict_row(&r),
                Fitted::Rf(m) => m.predict_row(&r),
                Fitted::Svm(m) => m.predict_row(&r),
                Fitted::Mlp(m) => m.predict_row(&r),
            }
        })
        .collect())
}

impl Model {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn forest(&self) -> Option<&RandomForest> {
        match &self.fitted {
            Fitted::Rf(f) => Some(f),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::blobs;

    #[test]
    fn every_model_fits_separable_blobs() {
        // train() expects standardized columns.
        let (x, y) = blobs([60, 60], 2, 6.0, 1);
        let x = Standardizer::fit(&x).transform(&x);
        for kind in ModelKind::ALL {
            let m = train(&ModelSpec::new(kind, 3), &x, &y).unwrap();
            let p = predict(&m, &x).unwrap();
            let f1 = macro_f1(&y, &p).unwrap();
            assert!(f1 >= 0.95, "{kind}: training macro F1 {f1}");
        }
    }

    #[test]
    fn deterministic_predictions() {
        let (x, y) = blobs([40, 40], 3, 1.0, 2);
        for kind in ModelKind::ALL {
            let a = predict(&train(&ModelSpec::new(kind, 5), &x, &y).unwrap(), &x).unwrap();
            let b = predict(&train(&ModelSpec::new(kind, 5), &x, &y).unwrap(), &x).unwrap();
            assert_eq!(a, b, "{kind}");
        }
    }

    #[test]
    fn zero_variance_columns_are_dropped() {
        let (mut x, y) = blobs([20, 20], 2, 4.0, 3);
        for r in &mut x {
            r.push(7.0);
        }
        let m = train(&ModelSpec::new(ModelKind::Gnb, 0), &x, &y).unwrap();
        assert_eq!(m.info.dropped_columns, vec![2]);
        assert!(matches!(predict(&m, &vec![vec![0.0; 2]]), Err(ModelError::Dimension { .. })));
        assert_eq!(predict(&m, &Vec::new()).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn single_class_is_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train(&ModelSpec::new(ModelKind::Rf, 0), &x, &[0, 0]),
            Err(ModelError::SingleClass)
        ));
    }

    #[test]
    fn spec_serializes_with_hyperparameters() {
        let s = serde_json::to_string(&ModelSpec::new(ModelKind::Rf, 4)).unwrap();
        assert!(s.contains("\"n_trees\":100") && s.contains("\"max_depth\":5"), "{s}");
        let back: ModelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, ModelSpec::new(ModelKind::Rf, 4));
    }
}
