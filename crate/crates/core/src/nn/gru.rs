//! GRU cell: forward step, unrolled sequence, and backprop through time.
//!
//! Equations:
//!   z = sigma(W_z x + U_z h_prev + b_z)
//!   r = sigma(W_r x + U_r h_prev + b_r)
//!   g = tanh (W_h x + U_h (r * h_prev) + b_h)
//!   h = (1 - z) * h_prev + z * g

use rand_chacha::ChaCha8Rng;

use super::linalg::{sigmoid, Mat};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GruCellParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub w_z: Mat,
    pub w_r: Mat,
    pub w_h: Mat,
    pub u_z: Mat,
    pub u_r: Mat,
    pub u_h: Mat,
    pub b_z: Vec<f64>,
    pub b_r: Vec<f64>,
    pub b_h: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GruStepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    /// r * h_prev, the input to U_h.
    pub rh: Vec<f64>,
}

impl GruCellParams {
    pub fn new(input_dim: usize, hidden_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            input_dim,
            hidden_dim,
            w_z: Mat::glorot_uniform(hidden_dim, input_dim, rng),
            w_r: Mat::glorot_uniform(hidden_dim, input_dim, rng),
            w_h: Mat::glorot_uniform(hidden_dim, input_dim, rng),
            u_z: Mat::glorot_uniform(hidden_dim, hidden_dim, rng),
            u_r: Mat::glorot_uniform(hidden_dim, hidden_dim, rng),
            u_h: Mat::glorot_uniform(hidden_dim, hidden_dim, rng),
            b_z: vec![0.0; hidden_dim],
            b_r: vec![0.0; hidden_dim],
            b_h: vec![0.0; hidden_dim],
        }
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            w_z: Mat::zeros(hidden_dim, input_dim),
            w_r: Mat::zeros(hidden_dim, input_dim),
            w_h: Mat::zeros(hidden_dim, input_dim),
            u_z: Mat::zeros(hidden_dim, hidden_dim),
            u_r: Mat::zeros(hidden_dim, hidden_dim),
            u_h: Mat::zeros(hidden_dim, hidden_dim),
            b_z: vec![0.0; hidden_dim],
            b_r: vec![0.0; hidden_dim],
            b_h: vec![0.0; hidden_dim],
        }
    }

    pub fn forward(&self, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
        let (h, _) = self.forward_cached(x, h_prev)?;
        Ok(h)
    }

    pub fn forward_cached(&self, x: &[f64], h_prev: &[f64]) -> Result<(Vec<f64>, GruStepCache)> {
        if x.len() != self.input_dim || h_prev.len() != self.hidden_dim {
            return Err(Error::DimMismatch(format!(
                "gru cell expects x[{}], h[{}]; got x[{}], h[{}]",
                self.input_dim,
                self.hidden_dim,
                x.len(),
                h_prev.len()
            )));
        }
        let hd = self.hidden_dim;
        let mut z = self.b_z.clone();
        self.w_z.add_matvec(x, &mut z);
        self.u_z.add_matvec(h_prev, &mut z);
        let mut r = self.b_r.clone();
        self.w_r.add_matvec(x, &mut r);
        self.u_r.add_matvec(h_prev, &mut r);
        for v in z.iter_mut() {
            *v = sigmoid(*v);
        }
        for v in r.iter_mut() {
            *v = sigmoid(*v);
        }
        let rh: Vec<f64> = (0..hd).map(|j| r[j] * h_prev[j]).collect();
        let mut g = self.b_h.clone();
        self.w_h.add_matvec(x, &mut g);
        self.u_h.add_matvec(&rh, &mut g);
        for v in g.iter_mut() {
            *v = v.tanh();
        }
        let h: Vec<f64> = (0..hd).map(|j| (1.0 - z[j]) * h_prev[j] + z[j] * g[j]).collect();
        let cache = GruStepCache { x: x.to_vec(), h_prev: h_prev.to_vec(), z, r, g, rh };
        Ok((h, cache))
    }

    pub fn run_sequence(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<GruStepCache>)> {
        let mut h = vec![0.0; self.hidden_dim];
        let mut caches = Vec::with_capacity(xs.len());
        for x in xs {
            let (nh, cache) = self.forward_cached(x, &h)?;
            h = nh;
            caches.push(cache);
        }
        Ok((h, caches))
    }

    /// BPTT over a cached sequence given the loss gradient on the final h.
    pub fn backward_sequence(&self, caches: &[GruStepCache], d_h_final: &[f64], grads: &mut GruCellParams) {
        let hd = self.hidden_dim;
        let mut dh = d_h_final.to_vec();
        for cache in caches.iter().rev() {
            // h = (1-z)*h_prev + z*g
            let mut dz_pre = vec![0.0; hd];
            let mut dg_pre = vec![0.0; hd];
            for j in 0..hd {
                let dz = dh[j] * (cache.g[j] - cache.h_prev[j]);
                dz_pre[j] = dz * cache.z[j] * (1.0 - cache.z[j]);
                let dg = dh[j] * cache.z[j];
                dg_pre[j] = dg * (1.0 - cache.g[j] * cache.g[j]);
            }
            // d(rh) = U_h^T dg_pre; dr = d(rh) * h_prev
            let mut d_rh = vec![0.0; hd];
            self.u_h.add_tmatvec(&dg_pre, &mut d_rh);
            let mut dr_pre = vec![0.0; hd];
            for j in 0..hd {
                dr_pre[j] = d_rh[j] * cache.h_prev[j] * cache.r[j] * (1.0 - cache.r[j]);
            }

            grads.w_z.add_outer(&dz_pre, &cache.x);
            grads.w_r.add_outer(&dr_pre, &cache.x);
            grads.w_h.add_outer(&dg_pre, &cache.x);
            grads.u_z.add_outer(&dz_pre, &cache.h_prev);
            grads.u_r.add_outer(&dr_pre, &cache.h_prev);
            grads.u_h.add_outer(&dg_pre, &cache.rh);
            for j in 0..hd {
                grads.b_z[j] += dz_pre[j];
                grads.b_r[j] += dr_pre[j];
                grads.b_h[j] += dg_pre[j];
            }

            let mut dh_prev = vec![0.0; hd];
            for j in 0..hd {
                dh_prev[j] = dh[j] * (1.0 - cache.z[j]) + d_rh[j] * cache.r[j];
            }
            self.u_z.add_tmatvec(&dz_pre, &mut dh_prev);
            self.u_r.add_tmatvec(&dr_pre, &mut dh_prev);
            dh = dh_prev;
        }
    }
}

/// Public step entry matching the cell contract; validates dimensions.
pub fn gru_cell_forward(params: &GruCellParams, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
    params.forward(x, h_prev)
}
