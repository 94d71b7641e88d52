//! LSTM cell: forward step, unrolled sequence, and backprop through time.
//!
//! Gate equations (sigma = sigmoid, * = elementwise product):
//!   i = sigma(W_xi x + W_hi h_prev + b_i)
//!   f = sigma(W_xf x + W_hf h_prev + b_f)
//!   o = sigma(W_xo x + W_ho h_prev + b_o)
//!   g = tanh (W_xc x + W_hc h_prev + b_c)
//!   c = f * c_prev + i * g
//!   h = o * tanh(c)

use rand_chacha::ChaCha8Rng;

use super::linalg::{sigmoid, Mat};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LstmCellParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub w_xi: Mat,
    pub w_xf: Mat,
    pub w_xo: Mat,
    pub w_xc: Mat,
    pub w_hi: Mat,
    pub w_hf: Mat,
    pub w_ho: Mat,
    pub w_hc: Mat,
    pub b_i: Vec<f64>,
    pub b_f: Vec<f64>,
    pub b_o: Vec<f64>,
    pub b_c: Vec<f64>,
}

/// Per-step values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LstmStepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub o: Vec<f64>,
    pub g: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

impl LstmCellParams {
    pub fn new(input_dim: usize, hidden_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let x = |rng: &mut ChaCha8Rng| Mat::glorot_uniform(hidden_dim, input_dim, rng);
        let h = |rng: &mut ChaCha8Rng| Mat::glorot_uniform(hidden_dim, hidden_dim, rng);
        Self {
            input_dim,
            hidden_dim,
            w_xi: x(rng),
            w_xf: x(rng),
            w_xo: x(rng),
            w_xc: x(rng),
            w_hi: h(rng),
            w_hf: h(rng),
            w_ho: h(rng),
            w_hc: h(rng),
            b_i: vec![0.0; hidden_dim],
            b_f: vec![0.0; hidden_dim],
            b_o: vec![0.0; hidden_dim],
            b_c: vec![0.0; hidden_dim],
        }
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            w_xi: Mat::zeros(hidden_dim, input_dim),
            w_xf: Mat::zeros(hidden_dim, input_dim),
            w_xo: Mat::zeros(hidden_dim, input_dim),
            w_xc: Mat::zeros(hidden_dim, input_dim),
            w_hi: Mat::zeros(hidden_dim, hidden_dim),
            w_hf: Mat::zeros(hidden_dim, hidden_dim),
            w_ho: Mat::zeros(hidden_dim, hidden_dim),
            w_hc: Mat::zeros(hidden_dim, hidden_dim),
            b_i: vec![0.0; hidden_dim],
            b_f: vec![0.0; hidden_dim],
            b_o: vec![0.0; hidden_dim],
            b_c: vec![0.0; hidden_dim],
        }
    }

    fn check_dims(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<()> {
        if x.len() != self.input_dim || h_prev.len() != self.hidden_dim || c_prev.len() != self.hidden_dim {
            return Err(Error::DimMismatch(format!(
                "lstm cell expects x[{}], h[{}], c[{}]; got x[{}], h[{}], c[{}]",
                self.input_dim,
                self.hidden_dim,
                self.hidden_dim,
                x.len(),
                h_prev.len(),
                c_prev.len()
            )));
        }
        Ok(())
    }

    fn gate(&self, wx: &Mat, wh: &Mat, b: &[f64], x: &[f64], h_prev: &[f64]) -> Vec<f64> {
        let mut z = b.to_vec();
        wx.add_matvec(x, &mut z);
        wh.add_matvec(h_prev, &mut z);
        z
    }

    /// One LSTM step; returns (h, c).
    pub fn forward(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (h, c, _) = self.forward_cached(x, h_prev, c_prev)?;
        Ok((h, c))
    }

    /// Gate activations plus the new (h, c, tanh(c)) for one step.
    #[allow(clippy::type_complexity)]
    fn step(
        &self,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let hd = self.hidden_dim;
        let mut i = self.gate(&self.w_xi, &self.w_hi, &self.b_i, x, h_prev);
        let mut f = self.gate(&self.w_xf, &self.w_hf, &self.b_f, x, h_prev);
        let mut o = self.gate(&self.w_xo, &self.w_ho, &self.b_o, x, h_prev);
        let mut g = self.gate(&self.w_xc, &self.w_hc, &self.b_c, x, h_prev);
        let mut c = vec![0.0; hd];
        let mut tanh_c = vec![0.0; hd];
        let mut h = vec![0.0; hd];
        for j in 0..hd {
            i[j] = sigmoid(i[j]);
            f[j] = sigmoid(f[j]);
            o[j] = sigmoid(o[j]);
            g[j] = g[j].tanh();
            c[j] = f[j] * c_prev[j] + i[j] * g[j];
            tanh_c[j] = c[j].tanh();
            h[j] = o[j] * tanh_c[j];
        }
        (i, f, o, g, c, tanh_c, h)
    }

    pub fn forward_cached(
        &self,
        x: &[f64],
        h_prev: &[f64],
        c_prev: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>, LstmStepCache)> {
        self.check_dims(x, h_prev, c_prev)?;
        let (i, f, o, g, c, tanh_c, h) = self.step(x, h_prev, c_prev);
        let cache = LstmStepCache {
            x: x.to_vec(),
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            i,
            f,
            o,
            g,
            tanh_c,
        };
        Ok((h, c, cache))
    }

    /// Unroll over a sequence from zero initial state; returns the final h
    /// and the per-step caches (chronological order). The running state is
    /// moved into each step's cache rather than copied.
    pub fn run_sequence(&self, xs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<LstmStepCache>)> {
        let mut h = vec![0.0; self.hidden_dim];
        let mut c = vec![0.0; self.hidden_dim];
        let mut caches = Vec::with_capacity(xs.len());
        for x in xs {
            self.check_dims(x, &h, &c)?;
            let (i, f, o, g, new_c, tanh_c, new_h) = self.step(x, &h, &c);
            caches.push(LstmStepCache { x: x.clone(), h_prev: h, c_prev: c, i, f, o, g, tanh_c });
            h = new_h;
            c = new_c;
        }
        Ok((h, caches))
    }

    /// BPTT over a cached sequence given the loss gradient on the final h.
    /// Parameter gradients accumulate into `grads`; input gradients are not
    /// needed by any caller and are not produced.
    pub fn backward_sequence(&self, caches: &[LstmStepCache], d_h_final: &[f64], grads: &mut LstmCellParams) {
        let hd = self.hidden_dim;
        let mut dh = d_h_final.to_vec();
        let mut dc = vec![0.0; hd];
        let mut do_pre = vec![0.0; hd];
        let mut di_pre = vec![0.0; hd];
        let mut df_pre = vec![0.0; hd];
        let mut dg_pre = vec![0.0; hd];
        for cache in caches.iter().rev() {
            // h = o * tanh(c); c = f*c_prev + i*g
            for j in 0..hd {
                do_pre[j] = dh[j] * cache.tanh_c[j] * cache.o[j] * (1.0 - cache.o[j]);
                dc[j] += dh[j] * cache.o[j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
                di_pre[j] = dc[j] * cache.g[j] * cache.i[j] * (1.0 - cache.i[j]);
                df_pre[j] = dc[j] * cache.c_prev[j] * cache.f[j] * (1.0 - cache.f[j]);
                dg_pre[j] = dc[j] * cache.i[j] * (1.0 - cache.g[j] * cache.g[j]);
            }

            grads.w_xi.add_outer(&di_pre, &cache.x);
            grads.w_xf.add_outer(&df_pre, &cache.x);
            grads.w_xo.add_outer(&do_pre, &cache.x);
            grads.w_xc.add_outer(&dg_pre, &cache.x);
            grads.w_hi.add_outer(&di_pre, &cache.h_prev);
            grads.w_hf.add_outer(&df_pre, &cache.h_prev);
            grads.w_ho.add_outer(&do_pre, &cache.h_prev);
            grads.w_hc.add_outer(&dg_pre, &cache.h_prev);
            for j in 0..hd {
                grads.b_i[j] += di_pre[j];
                grads.b_f[j] += df_pre[j];
                grads.b_o[j] += do_pre[j];
                grads.b_c[j] += dg_pre[j];
            }

            // Propagate to the previous step.
            for v in dh.iter_mut() {
                *v = 0.0;
            }
            self.w_hi.add_tmatvec(&di_pre, &mut dh);
            self.w_hf.add_tmatvec(&df_pre, &mut dh);
            self.w_ho.add_tmatvec(&do_pre, &mut dh);
            self.w_hc.add_tmatvec(&dg_pre, &mut dh);
            for (d, f) in dc.iter_mut().zip(&cache.f) {
                *d *= f;
            }
        }
    }
}

/// Batched per-step cache: one column per sample.
#[derive(Debug, Clone)]
pub struct LstmBatchCache {
    pub x: Mat,
    pub h_prev: Mat,
    pub c_prev: Mat,
    pub i: Mat,
    pub f: Mat,
    pub o: Mat,
    pub g: Mat,
    pub tanh_c: Mat,
}

impl LstmCellParams {
    /// Batched unroll: xs[step] is input_dim x batch, state matrices are
    /// hidden_dim x batch. Each weight matrix streams once per step for the
    /// whole batch. Same recurrence as the per-sample path.
    pub fn run_sequence_batch(&self, xs: &[Mat]) -> Result<(Mat, Vec<LstmBatchCache>)> {
        let batch = xs.first().map(|m| m.cols).unwrap_or(0);
        let hd = self.hidden_dim;
        let mut h = Mat::zeros(hd, batch);
        let mut c = Mat::zeros(hd, batch);
        let mut caches = Vec::with_capacity(xs.len());
        for x in xs {
            if x.rows != self.input_dim || x.cols != batch {
                return Err(Error::DimMismatch(format!(
                    "lstm batch step expects {}x{batch}, got {}x{}",
                    self.input_dim, x.rows, x.cols
                )));
            }
            let mut i = Mat::broadcast_rows(&self.b_i, batch);
            i.add_mul(&self.w_xi, x);
            i.add_mul(&self.w_hi, &h);
            let mut f = Mat::broadcast_rows(&self.b_f, batch);
            f.add_mul(&self.w_xf, x);
            f.add_mul(&self.w_hf, &h);
            let mut o = Mat::broadcast_rows(&self.b_o, batch);
            o.add_mul(&self.w_xo, x);
            o.add_mul(&self.w_ho, &h);
            let mut g = Mat::broadcast_rows(&self.b_c, batch);
            g.add_mul(&self.w_xc, x);
            g.add_mul(&self.w_hc, &h);

            let mut new_c = Mat::zeros(hd, batch);
            let mut tanh_c = Mat::zeros(hd, batch);
            let mut new_h = Mat::zeros(hd, batch);
            for idx in 0..hd * batch {
                i.data[idx] = sigmoid(i.data[idx]);
                f.data[idx] = sigmoid(f.data[idx]);
                o.data[idx] = sigmoid(o.data[idx]);
                g.data[idx] = g.data[idx].tanh();
                new_c.data[idx] = f.data[idx] * c.data[idx] + i.data[idx] * g.data[idx];
                tanh_c.data[idx] = new_c.data[idx].tanh();
                new_h.data[idx] = o.data[idx] * tanh_c.data[idx];
            }
            caches.push(LstmBatchCache { x: x.clone(), h_prev: h, c_prev: c, i, f, o, g, tanh_c });
            h = new_h;
            c = new_c;
        }
        Ok((h, caches))
    }

    /// Batched BPTT mirroring `backward_sequence`.
    pub fn backward_sequence_batch(
        &self,
        caches: &[LstmBatchCache],
        d_h_final: &Mat,
        grads: &mut LstmCellParams,
    ) {
        let mut dh = d_h_final.clone();
        let n = dh.data.len();
        let mut dc = Mat::zeros(dh.rows, dh.cols);
        let mut do_pre = Mat::zeros(dh.rows, dh.cols);
        let mut di_pre = Mat::zeros(dh.rows, dh.cols);
        let mut df_pre = Mat::zeros(dh.rows, dh.cols);
        let mut dg_pre = Mat::zeros(dh.rows, dh.cols);
        for cache in caches.iter().rev() {
            for idx in 0..n {
                let o = cache.o.data[idx];
                let tc = cache.tanh_c.data[idx];
                let i = cache.i.data[idx];
                let f = cache.f.data[idx];
                let g = cache.g.data[idx];
                do_pre.data[idx] = dh.data[idx] * tc * o * (1.0 - o);
                dc.data[idx] += dh.data[idx] * o * (1.0 - tc * tc);
                di_pre.data[idx] = dc.data[idx] * g * i * (1.0 - i);
                df_pre.data[idx] = dc.data[idx] * cache.c_prev.data[idx] * f * (1.0 - f);
                dg_pre.data[idx] = dc.data[idx] * i * (1.0 - g * g);
            }

            grads.w_xi.add_mul_bt(&di_pre, &cache.x);
            grads.w_xf.add_mul_bt(&df_pre, &cache.x);
            grads.w_xo.add_mul_bt(&do_pre, &cache.x);
            grads.w_xc.add_mul_bt(&dg_pre, &cache.x);
            grads.w_hi.add_mul_bt(&di_pre, &cache.h_prev);
            grads.w_hf.add_mul_bt(&df_pre, &cache.h_prev);
            grads.w_ho.add_mul_bt(&do_pre, &cache.h_prev);
            grads.w_hc.add_mul_bt(&dg_pre, &cache.h_prev);
            di_pre.add_row_sums(&mut grads.b_i);
            df_pre.add_row_sums(&mut grads.b_f);
            do_pre.add_row_sums(&mut grads.b_o);
            dg_pre.add_row_sums(&mut grads.b_c);

            for v in dh.data.iter_mut() {
                *v = 0.0;
            }
            dh.add_tmul(&self.w_hi, &di_pre);
            dh.add_tmul(&self.w_hf, &df_pre);
            dh.add_tmul(&self.w_ho, &do_pre);
            dh.add_tmul(&self.w_hc, &dg_pre);
            for idx in 0..n {
                dc.data[idx] *= cache.f.data[idx];
            }
        }
    }
}

/// Public step entry matching the cell contract; validates dimensions.
pub fn lstm_cell_forward(
    params: &LstmCellParams,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.forward(x, h_prev, c_prev)
}
