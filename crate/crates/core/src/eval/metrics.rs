//! Window metrics: MAE (accuracy = 1 - MAE) and F1.

/// Scores for one k-step prediction window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScore {
    pub mae: f64,
    pub accuracy: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
    pub f1: f64,
}

/// Counts agreement between prediction and observation over a window.
/// Ties accuracy to the MAE identity: accuracy = (tp + tn) / k = 1 - mae.
pub fn window_score(pred: &[u8], obs: &[u8]) -> WindowScore {
    assert_eq!(pred.len(), obs.len(), "prediction and observation windows must match");
    assert!(!pred.is_empty(), "empty window");
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fne = 0usize;
    let mut tn = 0usize;
    for (&p, &o) in pred.iter().zip(obs) {
        match (p, o) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fne += 1,
            _ => tn += 1,
        }
    }
    let k = pred.len() as f64;
    let mae = (fp + fne) as f64 / k;
    WindowScore {
        mae,
        accuracy: (tp + tn) as f64 / k,
        true_pos: tp,
        false_pos: fp,
        false_neg: fne,
        true_neg: tn,
        f1: f1_from_counts(tp, fp, fne),
    }
}

/// Mean absolute error over the window: (1/k) sum |pred - obs|.
pub fn window_mae(pred: &[u8], obs: &[u8]) -> f64 {
    window_score(pred, obs).mae
}

/// F1 = TP / (TP + (FN + FP) / 2); 0 when the denominator is 0 (no positive
/// anywhere in prediction or observation).
pub fn f1_score(pred: &[u8], obs: &[u8]) -> f64 {
    window_score(pred, obs).f1
}

pub fn f1_from_counts(tp: usize, fp: usize, fne: usize) -> f64 {
    let denom = tp as f64 + (fne + fp) as f64 / 2.0;
    if denom == 0.0 {
        0.0
    } else {
        tp as f64 / denom
    }
}
