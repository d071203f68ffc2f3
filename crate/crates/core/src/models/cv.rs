use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{macro_f1_over, predict, smote_oversample, train, Matrix, ModelError, ModelInfo, ModelSpec};
use crate::corpus::FoldAssignment;
use crate::features::FeatureTable;
use crate::util::derive_seed;

/// Column-wise z-scoring with population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len() as f64;
        let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let sd = (0..d)
            .map(|j| (x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
            .collect();
        Standardizer { mean, sd }
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        x.iter()
            .map(|r| r.iter().enumerate().map(|(j, v)| (v - self.mean[j]) / self.sd[j]).collect())
            .collect()
    }

    pub fn inverse(&self, x: &Matrix) -> Matrix {
        x.iter()
            .map(|r| r.iter().enumerate().map(|(j, v)| v * self.sd[j] + self.mean[j]).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Rows added by SMOTE to the training split.
    pub n_synthetic: usize,
    pub seed: u64,
    pub f1: Option<f64>,
    /// Why the fold was not scored.
    pub skipped: Option<String>,
    pub info: Option<ModelInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVResult {
    pub model: ModelSpec,
    pub alteration_level: u8,
    pub folds: Vec<FoldOutcome>,
    /// Scores of the folds that were not skipped, in fold order.
    pub fold_f1: Vec<f64>,
    pub mean_f1: Option<f64>,
    pub skipped: Vec<usize>,
}

fn skip(fold: usize, n_train: usize, n_test: usize, seed: u64, reason: String) -> FoldOutcome {
    log::warn!("fold {fold} skipped: {reason}");
    FoldOutcome {
        fold,
        n_train,
        n_test,
        n_synthetic: 0,
        seed,
        f1: None,
        skipped: Some(reason),
        info: None,
    }
}

fn run_fold(table: &FeatureTable, test: &[bool], fold: usize, spec: &ModelSpec) -> Result<FoldOutcome, ModelError> {
    let seed = derive_seed(&[b"cv", &spec.seed.to_le_bytes(), &(fold as u64).to_le_bytes()]);
    let train_idx: Vec<usize> = (0..table.n_docs()).filter(|&i| !test[i]).collect();
    let test_idx: Vec<usize> = (0..table.n_docs()).filter(|&i| test[i]).collect();
    let (n_train, n_test) = (train_idx.len(), test_idx.len());
    if test_idx.is_empty() {
        return Ok(skip(fold, n_train, n_test, seed, "empty test split".into()));
    }
    let y_train: Vec<usize> = train_idx.iter().map(|&i| table.labels[i]).collect();
    if !(y_train.contains(&0) && y_train.contains(&1)) {
        return Ok(skip(fold, n_train, n_test, seed, "training split has a single class".into()));
    }

    // Absent values take the training mean; columns never present in
    // training are dropped.
    let mut cols = Vec::new();
    let mut fill = Vec::new();
    for j in 0..table.n_features() {
        let present: Vec<f64> = train_idx.iter().filter_map(|&i| table.rows[i][j]).collect();
        if !present.is_empty() {
            cols.push(j);
            fill.push(present.iter().sum::<f64>() / present.len() as f64);
        }
    }
    let dense = |idx: &[usize]| -> Matrix {
        idx.iter()
            .map(|&i| cols.iter().zip(&fill).map(|(&j, &f)| table.rows[i][j].unwrap_or(f)).collect())
            .collect()
    };
    let (x_train, x_test) = (dense(&train_idx), dense(&test_idx));

    let scaler = Standardizer::fit(&x_train);
    let keep: Vec<usize> = (0..cols.len()).filter(|&j| scaler.sd[j] > 0.0).collect();
    if keep.is_empty() {
        return Ok(skip(fold, n_train, n_test, seed, "no feature varies in the training split".into()));
    }
    let pick = |x: &Matrix| -> Matrix { x.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect() };
    let scaler = Standardizer {
        mean: keep.iter().map(|&j| scaler.mean[j]).collect(),
        sd: keep.iter().map(|&j| scaler.sd[j]).collect(),
    };
    let (x_train, x_test) = (pick(&x_train), pick(&x_test));
    let z_train = scaler.transform(&x_train);
    let (z_bal, y_bal) = smote_oversample(&z_train, &y_train, 5, seed)?;
    let n_synthetic = y_bal.len() - n_train;

    let (fit_x, eval_x) = if spec.kind().standardized() {
        (z_bal, scaler.transform(&x_test))
    } else {
        (scaler.inverse(&z_bal), x_test)
    };
    let fold_spec = ModelSpec {
        params: spec.params.clone(),
        seed,
    };
    let model = match train(&fold_spec, &fit_x, &y_bal) {
        Ok(m) => m,
        Err(e @ (ModelError::TooFew { .. } | ModelError::NoFeatures)) => {
            return Ok(skip(fold, n_train, n_test, seed, e.to_string()));
        }
        Err(e) => return Err(e),
    };
    let y_test: Vec<usize> = test_idx.iter().map(|&i| table.labels[i]).collect();
    let pred = predict(&model, &eval_x)?;
    let f1 = macro_f1_over(&y_test, &pred, &[0, 1])?;
    Ok(FoldOutcome {
        fold,
        n_train,
        n_test,
        n_synthetic,
        seed,
        f1: Some(f1),
        skipped: None,
        info: Some(model.info),
    })
}

/// Group-stratified cross-validation of one model on one feature table.
///
/// Per fold: impute, standardize on the training split, SMOTE the training
/// split, train, and score macro F1 on the untouched test split. Folds run
/// in parallel; each has its own seed derived from `spec.seed` and the fold
/// index. Skipped folds are reported and left out of the mean.
pub fn cross_validate(table: &FeatureTable, folds: &FoldAssignment, spec: &ModelSpec) -> Result<CVResult, ModelError> {
    let mut fold_of = Vec::with_capacity(table.n_docs());
    for id in &table.doc_ids {
        match folds.fold_of(id) {
            Some(f) if f < folds.k => fold_of.push(f),
            Some(f) => return Err(ModelError::Folds(format!("document {id} is in fold {f} of {}", folds.k))),
            None => return Err(ModelError::Folds(format!("document {id} has no fold"))),
        }
    }
    if let Some(&l) = table.labels.iter().find(|&&l| l > 1) {
        return Err(ModelError::Label(l));
    }
    let outcomes: Vec<FoldOutcome> = (0..folds.k)
        .into_par_iter()
        .map(|fold| {
            let test: Vec<bool> = fold_of.iter().map(|&f| f == fold).collect();
            run_fold(table, &test, fold, spec)
        })
        .collect::<Result<_, _>>()?;
    let fold_f1: Vec<f64> = outcomes.iter().filter_map(|o| o.f1).collect();
    let skipped = outcomes.iter().filter(|o| o.f1.is_none()).map(|o| o.fold).collect();
    Ok(CVResult {
        model: spec.clone(),
        alteration_level: table.alteration_level,
        mean_f1: crate::util::mean(&fold_f1),
        fold_f1,
        folds: outcomes,
        skipped,
    })
}
