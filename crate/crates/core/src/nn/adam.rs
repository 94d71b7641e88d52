//! Adam with bias correction.

use super::params::ParamSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AdamState {
    /// First-moment estimates, one vector per parameter block.
    m: Vec<Vec<f64>>,
    /// Second-moment estimates.
    v: Vec<Vec<f64>>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new<P: ParamSet>(params: &P) -> Self {
        let shapes: Vec<usize> = params.blocks().iter().map(|(_, b)| b.len()).collect();
        Self {
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One Adam update. `grads` must have the same block structure as
    /// `params` (it is a value of the same model type).
    pub fn step<P: ParamSet>(&mut self, params: &mut P, grads: &P, learning_rate: f64) -> Result<()> {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let grad_blocks = grads.blocks();
        let param_blocks = params.blocks_mut();
        if grad_blocks.len() != param_blocks.len() {
            return Err(Error::DimMismatch(format!(
                "adam: {} gradient blocks vs {} parameter blocks",
                grad_blocks.len(),
                param_blocks.len()
            )));
        }
        for (idx, ((name, block), (gname, gblock))) in
            param_blocks.into_iter().zip(grad_blocks).enumerate()
        {
            if name != gname || block.len() != gblock.len() {
                return Err(Error::DimMismatch(format!(
                    "adam: block {idx} mismatch ({name}[{}] vs {gname}[{}])",
                    block.len(),
                    gblock.len()
                )));
            }
            let m = &mut self.m[idx];
            let v = &mut self.v[idx];
            for j in 0..block.len() {
                let g = gblock[j];
                m[j] = self.beta1 * m[j] + (1.0 - self.beta1) * g;
                v[j] = self.beta2 * v[j] + (1.0 - self.beta2) * g * g;
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                block[j] -= learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::dense::{Activation, DenseLayer};

    fn scalar_layer(value: f64) -> DenseLayer {
        let mut layer = DenseLayer::zeros(1, 1, Activation::Identity);
        layer.w.data[0] = value;
        layer
    }

    /// Hand oracle for n Adam steps on a scalar with constant gradient.
    fn adam_oracle(theta0: f64, g: f64, lr: f64, steps: usize) -> f64 {
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let (mut theta, mut m, mut v) = (theta0, 0.0, 0.0);
        for t in 1..=steps {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t as i32));
            let v_hat = v / (1.0 - b2.powi(t as i32));
            theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        theta
    }

    #[test]
    fn first_step_matches_hand_oracle() {
        let mut params = scalar_layer(1.0);
        let mut grads = scalar_layer(0.3);
        grads.b[0] = 0.0;
        let mut state = AdamState::new(&params);
        state.step(&mut params, &grads, 0.001).unwrap();
        let expected = adam_oracle(1.0, 0.3, 0.001, 1);
        assert!((params.w.data[0] - expected).abs() < 1e-15);
        // Bias-corrected first step moves by almost exactly the learning rate.
        assert!((1.0 - params.w.data[0] - 0.001).abs() < 1e-9);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn two_equal_gradient_steps_match_oracle() {
        let mut params = scalar_layer(1.0);
        let grads = scalar_layer(0.3);
        let mut state = AdamState::new(&params);
        state.step(&mut params, &grads, 0.001).unwrap();
        let after_one = params.w.data[0];
        state.step(&mut params, &grads, 0.001).unwrap();
        let expected = adam_oracle(1.0, 0.3, 0.001, 2);
        assert!((params.w.data[0] - expected).abs() < 1e-15);
        // Each step is roughly lr * sign(g).
        assert!((after_one - params.w.data[0] - 0.001).abs() < 1e-6);
    }

    #[test]
    fn zero_gradient_with_zero_moments_is_a_no_op() {
        let mut params = scalar_layer(0.7);
        let grads = scalar_layer(0.0);
        let mut state = AdamState::new(&params);
        state.step(&mut params, &grads, 0.1).unwrap();
        assert_eq!(params.w.data[0], 0.7);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn second_moments_stay_nonnegative() {
        let mut params = scalar_layer(0.0);
        let mut state = AdamState::new(&params);
        for g in [-2.0, 3.0, -0.5, 0.0] {
            let grads = scalar_layer(g);
            state.step(&mut params, &grads, 0.01).unwrap();
        }
        assert!(state.v.iter().flatten().all(|&v| v >= 0.0));
        assert_eq!(state.step, 4);
    }
}
