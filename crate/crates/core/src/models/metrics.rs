use super::ModelError;

/// 2×2 confusion counts, `[true][predicted]`.
pub fn confusion(y_true: &[usize], y_pred: &[usize]) -> Result<[[usize; 2]; 2], ModelError> {
    if y_true.len() != y_pred.len() {
        return Err(ModelError::Length(y_pred.len(), y_true.len()));
    }
    let mut m = [[0; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(ModelError::Label(t.max(p)));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Unweighted mean of per-class F1 over `labels`. A listed class absent from
/// both truth and prediction scores 0.
pub fn macro_f1_over(y_true: &[usize], y_pred: &[usize], labels: &[usize]) -> Result<f64, ModelError> {
    if y_true.len() != y_pred.len() {
        return Err(ModelError::Length(y_pred.len(), y_true.len()));
    }
    if labels.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for &c in labels {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t == c, p == c) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        let den = 2 * tp + fp + fn_;
        if den > 0 {
            total += 2.0 * tp as f64 / den as f64;
        }
    }
    Ok(total / labels.len() as f64)
}

/// Macro F1 over the two classes `{0, 1}`.
pub fn macro_f1(y_true: &[usize], y_pred: &[usize]) -> Result<f64, ModelError> {
    macro_f1_over(y_true, y_pred, &[0, 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_cases() {
        assert_eq!(macro_f1(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 1.0);
        assert_eq!(macro_f1(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.5);
        let f = macro_f1(&[0, 0, 0, 1], &[0, 0, 0, 0]).unwrap();
        assert!((f - 3.0 / 7.0).abs() < 1e-12);
        assert!(macro_f1(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn symmetric_under_relabeling() {
        let t = [0, 1, 1, 0, 1, 1, 0];
        let p = [0, 1, 0, 0, 1, 0, 1];
        let flip = |v: &[usize]| v.iter().map(|x| 1 - x).collect::<Vec<_>>();
        assert_eq!(macro_f1(&t, &p).unwrap(), macro_f1(&flip(&t), &flip(&p)).unwrap());
    }

    #[test]
    fn confusion_counts() {
        assert_eq!(confusion(&[0, 0, 1], &[0, 1, 1]).unwrap(), [[1, 1], [0, 1]]);
    }
}
