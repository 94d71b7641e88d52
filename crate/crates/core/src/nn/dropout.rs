//! Inverted dropout: units are dropped with probability `rate` during
//! training and survivors are scaled by 1/(1-rate), so inference needs no
//! rescaling. At inference (or rate 0) the operation is the identity.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Per-unit multipliers recorded by the forward pass: 0 for dropped units,
/// 1/(1-rate) for kept ones (1.0 when inactive). The backward pass applies
/// the same multipliers.
#[derive(Debug, Clone)]
pub struct DropoutMask {
    pub scale: Vec<f64>,
}

impl DropoutMask {
    pub fn identity(len: usize) -> Self {
        Self { scale: vec![1.0; len] }
    }

    pub fn backward(&self, d_out: &[f64]) -> Vec<f64> {
        d_out.iter().zip(&self.scale).map(|(d, s)| d * s).collect()
    }
}

pub fn dropout_apply(
    x: &[f64],
    rate: f64,
    rng: &mut ChaCha8Rng,
    training: bool,
) -> Result<(Vec<f64>, DropoutMask)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Config(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    if !training || rate == 0.0 {
        return Ok((x.to_vec(), DropoutMask::identity(x.len())));
    }
    let keep_scale = 1.0 / (1.0 - rate);
    let mut y = Vec::with_capacity(x.len());
    let mut scale = Vec::with_capacity(x.len());
    for &v in x {
        if rng.random::<f64>() < rate {
            y.push(0.0);
            scale.push(0.0);
        } else {
            y.push(v * keep_scale);
            scale.push(keep_scale);
        }
    }
    Ok((y, DropoutMask { scale }))
}

/// Batched variant over a units x batch matrix; masks draw in row-major
/// element order.
pub fn dropout_apply_batch(
    x: &crate::nn::linalg::Mat,
    rate: f64,
    rng: &mut ChaCha8Rng,
    training: bool,
) -> Result<(crate::nn::linalg::Mat, DropoutMask)> {
    let (y, mask) = dropout_apply(&x.data, rate, rng, training)?;
    Ok((crate::nn::linalg::Mat { rows: x.rows, cols: x.cols, data: y }, mask))
}

impl DropoutMask {
    pub fn backward_batch(&self, d_out: &crate::nn::linalg::Mat) -> crate::nn::linalg::Mat {
        crate::nn::linalg::Mat {
            rows: d_out.rows,
            cols: d_out.cols,
            data: self.backward(&d_out.data),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn inference_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = [1.0, -2.0, 3.5, 0.0];
        let (y, mask) = dropout_apply(&x, 0.5, &mut rng, false).unwrap();
        assert_eq!(y, x.to_vec());
        assert!(mask.scale.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn zero_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = [1.0, 2.0];
        let (y, _) = dropout_apply(&x, 0.0, &mut rng, true).unwrap();
        assert_eq!(y, x.to_vec());
    }

    #[test]
    fn invalid_rate_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(dropout_apply(&[1.0], 1.0, &mut rng, true).is_err());
        assert!(dropout_apply(&[1.0], -0.1, &mut rng, true).is_err());
    }

    #[test]
    fn mean_over_many_draws_preserves_expectation() {
        // E[y] = x for inverted dropout; check within 1% over 1e5 draws.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x = [2.0, -4.0, 0.5];
        let n = 100_000;
        let mut sums = [0.0f64; 3];
        for _ in 0..n {
            let (y, _) = dropout_apply(&x, 0.2, &mut rng, true).unwrap();
            for (s, v) in sums.iter_mut().zip(&y) {
                *s += v;
            }
        }
        for (s, &xv) in sums.iter().zip(&x) {
            let mean = s / n as f64;
            assert!(
                (mean - xv).abs() <= 0.01 * xv.abs(),
                "mean {mean} too far from {xv}"
            );
        }
    }

    #[test]
    fn backward_applies_the_same_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = [1.0; 64];
        let (y, mask) = dropout_apply(&x, 0.3, &mut rng, true).unwrap();
        let d = mask.backward(&[1.0; 64]);
        for (yv, dv) in y.iter().zip(&d) {
            assert_eq!(yv, dv);
        }
        assert!(y.contains(&0.0), "some unit should drop at rate 0.3");
    }
}
