//! Uniform access to a model's parameters as named flat blocks.
//!
//! Adam, the finite-difference oracle, gradient checks and the model
//! container all walk parameters through this trait, so every model type
//! exposes its blocks once and in one fixed order. Gradients reuse the
//! parameter struct itself as the container: a gradient is a value of the
//! same type whose blocks hold the partial derivatives.

use super::dense::DenseLayer;
use super::gru::GruCellParams;
use super::lstm::LstmCellParams;
use crate::error::{Error, Result};

pub trait ParamSet {
    /// Named parameter blocks in a fixed, documented order.
    fn blocks(&self) -> Vec<(String, &[f64])>;
    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])>;

    fn param_count(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }

    /// Multiplies every parameter by `factor` (used to average accumulated
    /// per-sample gradients).
    fn scale(&mut self, factor: f64) {
        for (_, block) in self.blocks_mut() {
            for v in block {
                *v *= factor;
            }
        }
    }

    /// Errors with the offending block name if any value is not finite.
    fn check_finite(&self) -> Result<()> {
        for (name, block) in self.blocks() {
            if block.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(())
    }
}

impl ParamSet for DenseLayer {
    fn blocks(&self) -> Vec<(String, &[f64])> {
        vec![("w".to_string(), self.w.data.as_slice()), ("b".to_string(), self.b.as_slice())]
    }

    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
        vec![("w".to_string(), self.w.data.as_mut_slice()), ("b".to_string(), self.b.as_mut_slice())]
    }
}

impl ParamSet for LstmCellParams {
    fn blocks(&self) -> Vec<(String, &[f64])> {
        vec![
            ("w_xi".to_string(), self.w_xi.data.as_slice()),
            ("w_xf".to_string(), self.w_xf.data.as_slice()),
            ("w_xo".to_string(), self.w_xo.data.as_slice()),
            ("w_xc".to_string(), self.w_xc.data.as_slice()),
            ("w_hi".to_string(), self.w_hi.data.as_slice()),
            ("w_hf".to_string(), self.w_hf.data.as_slice()),
            ("w_ho".to_string(), self.w_ho.data.as_slice()),
            ("w_hc".to_string(), self.w_hc.data.as_slice()),
            ("b_i".to_string(), self.b_i.as_slice()),
            ("b_f".to_string(), self.b_f.as_slice()),
            ("b_o".to_string(), self.b_o.as_slice()),
            ("b_c".to_string(), self.b_c.as_slice()),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
        vec![
            ("w_xi".to_string(), self.w_xi.data.as_mut_slice()),
            ("w_xf".to_string(), self.w_xf.data.as_mut_slice()),
            ("w_xo".to_string(), self.w_xo.data.as_mut_slice()),
            ("w_xc".to_string(), self.w_xc.data.as_mut_slice()),
            ("w_hi".to_string(), self.w_hi.data.as_mut_slice()),
            ("w_hf".to_string(), self.w_hf.data.as_mut_slice()),
            ("w_ho".to_string(), self.w_ho.data.as_mut_slice()),
            ("w_hc".to_string(), self.w_hc.data.as_mut_slice()),
            ("b_i".to_string(), self.b_i.as_mut_slice()),
            ("b_f".to_string(), self.b_f.as_mut_slice()),
            ("b_o".to_string(), self.b_o.as_mut_slice()),
            ("b_c".to_string(), self.b_c.as_mut_slice()),
        ]
    }
}

impl ParamSet for GruCellParams {
    fn blocks(&self) -> Vec<(String, &[f64])> {
        vec![
            ("w_z".to_string(), self.w_z.data.as_slice()),
            ("w_r".to_string(), self.w_r.data.as_slice()),
            ("w_h".to_string(), self.w_h.data.as_slice()),
            ("u_z".to_string(), self.u_z.data.as_slice()),
            ("u_r".to_string(), self.u_r.data.as_slice()),
            ("u_h".to_string(), self.u_h.data.as_slice()),
            ("b_z".to_string(), self.b_z.as_slice()),
            ("b_r".to_string(), self.b_r.as_slice()),
            ("b_h".to_string(), self.b_h.as_slice()),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<(String, &mut [f64])> {
        vec![
            ("w_z".to_string(), self.w_z.data.as_mut_slice()),
            ("w_r".to_string(), self.w_r.data.as_mut_slice()),
            ("w_h".to_string(), self.w_h.data.as_mut_slice()),
            ("u_z".to_string(), self.u_z.data.as_mut_slice()),
            ("u_r".to_string(), self.u_r.data.as_mut_slice()),
            ("u_h".to_string(), self.u_h.data.as_mut_slice()),
            ("b_z".to_string(), self.b_z.as_mut_slice()),
            ("b_r".to_string(), self.b_r.as_mut_slice()),
            ("b_h".to_string(), self.b_h.as_mut_slice()),
        ]
    }
}

/// Prefixes child block names when composing a model from sub-layers.
pub fn prefixed<'a>(prefix: &str, blocks: Vec<(String, &'a [f64])>) -> Vec<(String, &'a [f64])> {
    blocks.into_iter().map(|(n, b)| (format!("{prefix}.{n}"), b)).collect()
}

pub fn prefixed_mut<'a>(prefix: &str, blocks: Vec<(String, &'a mut [f64])>) -> Vec<(String, &'a mut [f64])> {
    blocks.into_iter().map(|(n, b)| (format!("{prefix}.{n}"), b)).collect()
}
