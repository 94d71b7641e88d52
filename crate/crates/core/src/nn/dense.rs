//! Fully connected layer: y = activation(W x + b).

use rand_chacha::ChaCha8Rng;

use super::linalg::{sigmoid, Mat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Identity => z,
        }
    }

    /// Derivative as a function of the pre-activation z.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub w: Mat,
    pub b: Vec<f64>,
    pub activation: Activation,
}

/// Values saved during the forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct DenseCache {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl DenseLayer {
    pub fn new(out_dim: usize, in_dim: usize, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        Self { w: Mat::glorot_uniform(out_dim, in_dim, rng), b: vec![0.0; out_dim], activation }
    }

    pub fn zeros(out_dim: usize, in_dim: usize, activation: Activation) -> Self {
        Self { w: Mat::zeros(out_dim, in_dim), b: vec![0.0; out_dim], activation }
    }

    pub fn out_dim(&self) -> usize {
        self.w.rows
    }

    pub fn in_dim(&self) -> usize {
        self.w.cols
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.w.cols {
            return Err(Error::DimMismatch(format!(
                "dense layer expects input of length {}, got {}",
                self.w.cols,
                x.len()
            )));
        }
        let mut z = self.b.clone();
        self.w.add_matvec(x, &mut z);
        for v in z.iter_mut() {
            *v = self.activation.apply(*v);
        }
        Ok(z)
    }

    /// Forward pass that keeps the inputs and pre-activations for backprop.
    pub fn forward_cached(&self, x: &[f64]) -> Result<(Vec<f64>, DenseCache)> {
        if x.len() != self.w.cols {
            return Err(Error::DimMismatch(format!(
                "dense layer expects input of length {}, got {}",
                self.w.cols,
                x.len()
            )));
        }
        let mut z = self.b.clone();
        self.w.add_matvec(x, &mut z);
        let y = z.iter().map(|&v| self.activation.apply(v)).collect();
        Ok((y, DenseCache { x: x.to_vec(), z }))
    }

    /// Backprop from a gradient on the layer output; returns the gradient on x.
    pub fn backward(&self, cache: &DenseCache, d_out: &[f64], grads: &mut DenseLayer) -> Vec<f64> {
        let dz: Vec<f64> = d_out
            .iter()
            .zip(&cache.z)
            .map(|(&d, &z)| d * self.activation.derivative(z))
            .collect();
        self.backward_preact(cache, &dz, grads)
    }

    /// Backprop from a gradient already on the pre-activation (used when the
    /// loss derivative is fused with the sigmoid output).
    pub fn backward_preact(&self, cache: &DenseCache, dz: &[f64], grads: &mut DenseLayer) -> Vec<f64> {
        grads.w.add_outer(dz, &cache.x);
        for (g, d) in grads.b.iter_mut().zip(dz) {
            *g += d;
        }
        let mut dx = vec![0.0; self.w.cols];
        self.w.add_tmatvec(dz, &mut dx);
        dx
    }

    /// Batched forward: x is in_dim x batch, one column per sample.
    pub fn forward_batch(&self, x: &Mat) -> Result<(Mat, DenseBatchCache)> {
        if x.rows != self.w.cols {
            return Err(Error::DimMismatch(format!(
                "dense layer expects batch input with {} rows, got {}",
                self.w.cols, x.rows
            )));
        }
        let mut z = Mat::broadcast_rows(&self.b, x.cols);
        z.add_mul(&self.w, x);
        let mut y = z.clone();
        for v in y.data.iter_mut() {
            *v = self.activation.apply(*v);
        }
        Ok((y, DenseBatchCache { x: x.clone(), z }))
    }

    pub fn backward_batch(&self, cache: &DenseBatchCache, d_out: &Mat, grads: &mut DenseLayer) -> Mat {
        let mut dz = d_out.clone();
        for (v, z) in dz.data.iter_mut().zip(&cache.z.data) {
            *v *= self.activation.derivative(*z);
        }
        self.backward_preact_batch(cache, &dz, grads)
    }

    pub fn backward_preact_batch(&self, cache: &DenseBatchCache, dz: &Mat, grads: &mut DenseLayer) -> Mat {
        grads.w.add_mul_bt(dz, &cache.x);
        dz.add_row_sums(&mut grads.b);
        let mut dx = Mat::zeros(self.w.cols, dz.cols);
        dx.add_tmul(&self.w, dz);
        dx
    }
}

/// Batched forward cache: inputs and pre-activations, one column per sample.
#[derive(Debug, Clone)]
pub struct DenseBatchCache {
    pub x: Mat,
    pub z: Mat,
}
