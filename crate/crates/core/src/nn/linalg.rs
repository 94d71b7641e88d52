//! Minimal dense matrix type for the network kernels.
//!
//! Row-major `f64` storage. The three hot operations are `matvec` (forward),
//! `add_tmatvec` (backprop through a weight matrix) and `add_outer` (weight
//! gradient accumulation); they are written over contiguous row slices so the
//! compiler can vectorize the inner loops.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Glorot-uniform init: [-b, b] with b = sqrt(6 / (fan_in + fan_out)),
    /// fan_in = cols, fan_out = rows. Keeps activation scale stable through
    /// the deep path so the x2 branch transmits usable signal from step one.
    pub fn glorot_uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let data = (0..rows * cols).map(|_| rng.random_range(-bound..bound)).collect();
        Self { rows, cols, data }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// out = W x
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(r), x);
        }
    }

    /// out += W x
    pub fn add_matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o += dot(self.row(r), x);
        }
    }

    /// out += W^T d
    pub fn add_tmatvec(&self, d: &[f64], out: &mut [f64]) {
        debug_assert_eq!(d.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &dv) in d.iter().enumerate() {
            let row = self.row(r);
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * dv;
            }
        }
    }

    /// W += d x^T (gradient accumulation: d over rows, x over cols)
    pub fn add_outer(&mut self, d: &[f64], x: &[f64]) {
        debug_assert_eq!(d.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for (r, &dv) in d.iter().enumerate() {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (w, xv) in row.iter_mut().zip(x) {
                *w += dv * xv;
            }
        }
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix with every row equal to `bias` stretched over `cols` columns
    /// (a column-broadcast bias for batched activations).
    pub fn broadcast_rows(bias: &[f64], cols: usize) -> Self {
        let mut data = Vec::with_capacity(bias.len() * cols);
        for &b in bias {
            data.extend(std::iter::repeat_n(b, cols));
        }
        Self { rows: bias.len(), cols, data }
    }

    /// self += a * b. Batched layout: one column per sample. Rows are
    /// processed four at a time so each streamed b-row feeds four fma
    /// chains.
    pub fn add_mul(&mut self, a: &Mat, b: &Mat) {
        debug_assert_eq!(a.cols, b.rows);
        debug_assert_eq!(self.rows, a.rows);
        debug_assert_eq!(self.cols, b.cols);
        let cols = self.cols;
        let quad_rows = a.rows / 4 * 4;
        for r0 in (0..quad_rows).step_by(4) {
            let (h0, rest) = self.data[r0 * cols..].split_at_mut(cols);
            let (h1, rest) = rest.split_at_mut(cols);
            let (h2, rest) = rest.split_at_mut(cols);
            let h3 = &mut rest[..cols];
            for k in 0..a.cols {
                let b_row = b.row(k);
                let a0 = a.data[r0 * a.cols + k];
                let a1 = a.data[(r0 + 1) * a.cols + k];
                let a2 = a.data[(r0 + 2) * a.cols + k];
                let a3 = a.data[(r0 + 3) * a.cols + k];
                for (c, &bv) in b_row.iter().enumerate() {
                    h0[c] += a0 * bv;
                    h1[c] += a1 * bv;
                    h2[c] += a2 * bv;
                    h3[c] += a3 * bv;
                }
            }
        }
        for r in quad_rows..a.rows {
            let a_row = a.row(r);
            let out = &mut self.data[r * cols..(r + 1) * cols];
            for (k, &av) in a_row.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let b_row = b.row(k);
                for (o, &bv) in out.iter_mut().zip(b_row) {
                    *o += av * bv;
                }
            }
        }
    }

    /// self += a^T * d, with a read transposed (a: r x k, d: r x cols,
    /// self: k x cols). The output row stays resident while the d rows
    /// stream.
    pub fn add_tmul(&mut self, a: &Mat, d: &Mat) {
        debug_assert_eq!(a.rows, d.rows);
        debug_assert_eq!(self.rows, a.cols);
        debug_assert_eq!(self.cols, d.cols);
        let cols = self.cols;
        for k in 0..a.cols {
            let out = &mut self.data[k * cols..(k + 1) * cols];
            for r in 0..a.rows {
                let av = a.data[r * a.cols + k];
                if av == 0.0 {
                    continue;
                }
                let d_row = d.row(r);
                for (o, &dv) in out.iter_mut().zip(d_row) {
                    *o += av * dv;
                }
            }
        }
    }

    /// self += d * x^T, summing over the sample lane (d: rows x b,
    /// x: cols x b, self: rows x cols). Accumulates each coefficient in
    /// ascending sample order.
    pub fn add_mul_bt(&mut self, d: &Mat, x: &Mat) {
        debug_assert_eq!(d.cols, x.cols);
        debug_assert_eq!(self.rows, d.rows);
        debug_assert_eq!(self.cols, x.rows);
        for r in 0..d.rows {
            let d_row = d.row(r);
            let out = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (o, k) in out.iter_mut().zip(0..x.rows) {
                *o += dot(d_row, x.row(k));
            }
        }
    }

    /// Per-row sums added into `out` (bias gradients over the sample lane).
    pub fn add_row_sums(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.row(r).iter().sum::<f64>();
        }
    }

    /// Stacks two matrices with equal column counts, top rows first.
    pub fn vstack(top: &Mat, bottom: &Mat) -> Mat {
        debug_assert_eq!(top.cols, bottom.cols);
        let mut data = Vec::with_capacity(top.data.len() + bottom.data.len());
        data.extend_from_slice(&top.data);
        data.extend_from_slice(&bottom.data);
        Mat { rows: top.rows + bottom.rows, cols: top.cols, data }
    }

    /// Splits into (first `at` rows, remainder).
    pub fn split_rows(&self, at: usize) -> (Mat, Mat) {
        let cut = at * self.cols;
        (
            Mat { rows: at, cols: self.cols, data: self.data[..cut].to_vec() },
            Mat { rows: self.rows - at, cols: self.cols, data: self.data[cut..].to_vec() },
        )
    }
}

/// Inner product with four independent accumulators. Splitting the sum
/// breaks the floating-point dependency chain so the loop vectorizes; the
/// summation order is fixed, so results stay deterministic.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let quads = a.len() / 4 * 4;
    let mut acc = [0.0f64; 4];
    for (ca, cb) in a[..quads].chunks_exact(4).zip(b[..quads].chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in a[quads..].iter().zip(&b[quads..]) {
        sum += x * y;
    }
    sum
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// out[i] += v[i] for same-length slices.
pub fn add_assign(out: &mut [f64], v: &[f64]) {
    debug_assert_eq!(out.len(), v.len());
    for (o, x) in out.iter_mut().zip(v) {
        *o += x;
    }
}
