use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{build_h, build_increment_matrix, check_interval, invert_h, operator_norm, taylor_coeffs};
use crate::error::{Error, Result};
use crate::flux_model::FluxModel;

/// `A = W^T H + s R` with `s = (h/d)^{d+1}`.
///
/// `wronskian` is stored row-per-derivative (row l holds `f^{(1+l)}/l!`), so
/// the product that reproduces the increments uses its transpose.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub wronskian: DMatrix<f64>,
    pub node_matrix: DMatrix<f64>,
    pub remainder: DMatrix<f64>,
    pub scale: f64,
    pub increments: DMatrix<f64>,
    /// Mean-value nodes: `R[j,i] = f_j^{(d+2)}(xi) i^{d+1} / (d+1)!`.
    pub remainder_nodes: Vec<Vec<Option<f64>>>,
    /// `||A - (W^T H + s R)||` with `R` rebuilt from the solved nodes where
    /// available.
    pub reconstruction_error: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn solve_node(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    const SAMPLES: usize = 64;
    let xs: Vec<f64> = (0..=SAMPLES).map(|k| lo + (hi - lo) * k as f64 / SAMPLES as f64).collect();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            return Some(a);
        }
        if gb == 0.0 {
            return Some(b);
        }
        if ga.signum() == gb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if g(m).signum() == ga.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        return Some(0.5 * (a + b));
    }
    None
}

pub fn remainder_matrix(flux: &FluxModel, v0: f64, h: f64) -> Result<Factorization> {
    check_interval(v0, h)?;
    let d = flux.dim();
    let w = flux.wronskian(v0)?;
    let hm = build_h(d, h)?.matrix;
    let a = build_increment_matrix(flux, v0, h)?;
    let step = h / d as f64;
    let scale = step.powi(d as i32 + 1);
    let wh = w.transpose() * &hm;

    let mut r = DMatrix::zeros(d, d);
    for j in 0..d {
        match flux.component_poly(j, 1) {
            Some(p) => {
                // Taylor tail of f_j' beyond degree d, divided by the scale.
                let c = taylor_coeffs(p, v0);
                for i in 0..d {
                    let ii = (i + 1) as f64;
                    r[(j, i)] = c.iter().enumerate().skip(d + 1).map(|(k, ck)| ck * ii.powi(k as i32) * step.powi((k - d - 1) as i32)).sum();
                }
            }
            None => {
                for i in 0..d {
                    r[(j, i)] = (a[(j, i)] - wh[(j, i)]) / scale;
                }
            }
        }
    }

    let mut nodes = vec![vec![None; d]; d];
    let mut rebuilt = r.clone();
    let top = factorial(d + 1);
    for j in 0..d {
        for i in 0..d {
            let ii = ((i + 1) as f64).powi(d as i32 + 1);
            let target = r[(j, i)];
            let g = |x: f64| flux.component(j, d + 2, x) * ii / top - target;
            if let Some(x) = solve_node(g, v0, (v0 + (i + 1) as f64 * step).min(1.0)) {
                nodes[j][i] = Some(x);
                rebuilt[(j, i)] = flux.component(j, d + 2, x) * ii / top;
            }
        }
    }
    let reconstruction_error = (&a - (&wh + &rebuilt * scale)).norm();
    Ok(Factorization {
        wronskian: w,
        node_matrix: hm,
        remainder: r,
        scale,
        increments: a,
        remainder_nodes: nodes,
        reconstruction_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainRow {
    pub h: f64,
    pub lambda_norm: f64,
    pub product: f64,
    /// `||A lambda - a||` relative to `||a|| = 1`.
    pub residual: f64,
}

/// Growth of `||lambda||` along the direction `a_l`.
///
/// With `A = (W^T + s R H^{-1}) H`, the direction `a_l` is the normalized
/// column l of `W^T + s R H^{-1}` and `lambda = H^{-1} e_l / ||.||`.
pub fn directional_gain(flux: &FluxModel, v: f64, h_list: &[f64], ell: usize) -> Result<Vec<GainRow>> {
    let d = flux.dim();
    if ell == 0 || ell > d {
        return Err(Error::InvalidArgument(format!("direction index {ell} outside 1..={d}")));
    }
    h_list
        .par_iter()
        .map(|&h| {
            let fac = remainder_matrix(flux, v, h)?;
            let hinv = invert_h(&build_h(d, h)?)?;
            let p = fac.wronskian.transpose() + &fac.remainder * &hinv * fac.scale;
            let col: DVector<f64> = p.column(ell - 1).into_owned();
            let n = col.norm();
            if n == 0.0 {
                return Err(Error::InvalidArgument("degenerate direction".into()));
            }
            let lambda: DVector<f64> = hinv.column(ell - 1) / n;
            let a_dir = col / n;
            let residual = (&fac.increments * &lambda - a_dir).norm();
            let lambda_norm = lambda.norm();
            Ok(GainRow { h, lambda_norm, product: lambda_norm * h.powi(ell as i32), residual })
        })
        .collect()
}

/// `||(A + R)^{-1}|| <= ||A^{-1}|| / (1 - ||A^{-1} R||)` when `||A^{-1} R|| < 1`.
pub fn neumann_inverse_bound(a: &DMatrix<f64>, r: &DMatrix<f64>) -> Option<f64> {
    let inv = a.clone().try_inverse()?;
    let q = operator_norm(&(&inv * r));
    (q < 1.0).then(|| operator_norm(&inv) / (1.0 - q))
}
