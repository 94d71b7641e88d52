//! Binary cross-entropy over a k-step output window.

/// Probabilities are clamped to [PROB_CLAMP, 1 - PROB_CLAMP] before the log
/// so an extreme output cannot produce a non-finite loss.
pub const PROB_CLAMP: f64 = 1e-12;

/// Mean BCE over the window: -(1/k) sum[y ln p + (1-y) ln(1-p)].
pub fn bce_loss(probs: &[f64], targets: &[f64]) -> f64 {
    debug_assert_eq!(probs.len(), targets.len());
    let k = probs.len() as f64;
    let mut total = 0.0;
    for (&p, &y) in probs.iter().zip(targets) {
        let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    total / k
}

/// Gradient of the mean BCE with respect to the sigmoid pre-activations:
/// d(loss)/dz_s = (p_s - y_s) / k.
pub fn bce_sigmoid_grad(probs: &[f64], targets: &[f64]) -> Vec<f64> {
    debug_assert_eq!(probs.len(), targets.len());
    let k = probs.len() as f64;
    probs.iter().zip(targets).map(|(&p, &y)| (p - y) / k).collect()
}
