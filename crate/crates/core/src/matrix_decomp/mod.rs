//! Node matrices, increment matrices and the decompositions of a vector into
//! increments `f'(v_i) - f'(v_0)`.

mod decompose;
mod factorization;
pub mod rational;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux_model::FluxModel;
use crate::poly::Polynomial;

pub use decompose::{decompose_general, decompose_improved, Decomposition, DecompositionMethod};
pub use factorization::{
    directional_gain, neumann_inverse_bound, remainder_matrix, Factorization, GainRow,
};

/// Condition number above which solves with the increment matrix are refused.
pub const CONDITION_LIMIT: f64 = 1e14;

/// `H_d(h)` with entries `(i h / d)^l`, rows l = 1..d, columns i = 1..d.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMatrix {
    pub d: usize,
    pub h: f64,
    pub matrix: DMatrix<f64>,
}

pub fn build_h(d: usize, h: f64) -> Result<NodeMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("h must lie in (0, 1], got {h}")));
    }
    let matrix = DMatrix::from_fn(d, d, |l, i| ((i + 1) as f64 * h / d as f64).powi(l as i32 + 1));
    Ok(NodeMatrix { d, h, matrix })
}

/// `H_d(h)^{-1}`. Exact rational inverse of `H_d(1)` with column l scaled by
/// `h^{-l}` for `d <= 6`; LU inverse beyond.
pub fn invert_h(h: &NodeMatrix) -> Result<DMatrix<f64>> {
    let d = h.d;
    if d <= rational::EXACT_MAX_DIM {
        let inv = rational::inverse_adjugate(&rational::node_matrix_unit(d))
            .ok_or_else(|| Error::InvalidArgument("node matrix singular".into()))?;
        Ok(DMatrix::from_fn(d, d, |i, l| rational::to_f64(&inv[i][l]) * h.h.powi(-(l as i32 + 1))))
    } else {
        h.matrix
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("node matrix singular".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRow {
    pub h: f64,
    pub norm: f64,
    pub product: f64,
}

/// `||H_d(h)^{-1}||` (largest singular value) and its product with `h^d`.
pub fn h_inverse_norm_certificate(d: usize, h_list: &[f64]) -> Result<Vec<NormRow>> {
    h_list
        .par_iter()
        .map(|&h| {
            let inv = invert_h(&build_h(d, h)?)?;
            let norm = operator_norm(&inv);
            Ok(NormRow { h, norm, product: norm * h.powi(d as i32) })
        })
        .collect()
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Taylor coefficients `p^{(k)}(x0) / k!` of a polynomial about `x0`.
pub(crate) fn taylor_coeffs(p: &Polynomial, x0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.degree() + 1);
    let mut q = p.clone();
    let mut fact = 1.0;
    for k in 0..=p.degree() {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(q.eval(x0) / fact);
        q = q.derivative();
    }
    out
}

pub(crate) fn check_interval(v0: f64, h: f64) -> Result<()> {
    if !(v0 >= 0.0) {
        return Err(Error::OutOfDomain(v0));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("h must lie in (0, 1], got {h}")));
    }
    if v0 + h > 1.0 + 1e-15 {
        return Err(Error::OutOfDomain(v0 + h));
    }
    Ok(())
}

/// `A(v0, h, d)` with columns `f'(v_i) - f'(v_0)`, `v_i = v0 + i h / d`.
///
/// Polynomial fluxes are expanded about `v0`, so the increments are formed
/// without subtracting nearly equal values.
pub fn build_increment_matrix(flux: &FluxModel, v0: f64, h: f64) -> Result<DMatrix<f64>> {
    check_interval(v0, h)?;
    let d = flux.dim();
    let step = h / d as f64;
    let mut a = DMatrix::zeros(d, d);
    for j in 0..d {
        match flux.component_poly(j, 1) {
            Some(p) => {
                let c = taylor_coeffs(p, v0);
                for i in 0..d {
                    let t = (i + 1) as f64 * step;
                    a[(j, i)] = c.iter().skip(1).rev().fold(0.0, |acc, &ck| (acc + ck) * t);
                }
            }
            None => {
                let base = flux.component(j, 1, v0);
                for i in 0..d {
                    let vi = (v0 + (i + 1) as f64 * step).min(1.0);
                    a[(j, i)] = flux.component(j, 1, vi) - base;
                }
            }
        }
    }
    Ok(a)
}
