//! Central finite-difference gradient oracle.

use super::params::ParamSet;
use crate::error::{Error, Result};

/// Numerical gradient of `loss` with respect to every scalar parameter,
/// using central differences (L(p+eps) - L(p-eps)) / (2 eps). The model is
/// restored exactly after each probe. The loss closure must be evaluated
/// with dropout disabled; callers are responsible for that.
pub fn finite_diff_grad<P, F>(params: &mut P, eps: f64, mut loss: F) -> Result<P>
where
    P: ParamSet + Clone,
    F: FnMut(&P) -> Result<f64>,
{
    if eps <= 0.0 {
        return Err(Error::Config(format!("finite-difference eps must be positive, got {eps}")));
    }
    let mut grads = params.clone();
    for (_, g) in grads.blocks_mut() {
        for v in g {
            *v = 0.0;
        }
    }
    let n_blocks = params.blocks().len();
    for bi in 0..n_blocks {
        let block_len = params.blocks()[bi].1.len();
        for j in 0..block_len {
            let original = params.blocks()[bi].1[j];
            params.blocks_mut()[bi].1[j] = original + eps;
            let plus = loss(params)?;
            params.blocks_mut()[bi].1[j] = original - eps;
            let minus = loss(params)?;
            params.blocks_mut()[bi].1[j] = original;
            grads.blocks_mut()[bi].1[j] = (plus - minus) / (2.0 * eps);
        }
    }
    Ok(grads)
}

/// Largest relative error between two gradient sets with identical block
/// structure: |a - b| / max(|a|, |b|, floor).
pub fn max_relative_error<P: ParamSet>(a: &P, b: &P, floor: f64) -> f64 {
    let mut worst = 0.0f64;
    for ((_, ba), (_, bb)) in a.blocks().into_iter().zip(b.blocks()) {
        for (&x, &y) in ba.iter().zip(bb) {
            let denom = x.abs().max(y.abs()).max(floor);
            worst = worst.max((x - y).abs() / denom);
        }
    }
    worst
}
