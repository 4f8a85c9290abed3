use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{build_h, build_increment_matrix, check_interval, condition_number, invert_h, CONDITION_LIMIT};
use crate::error::{Error, Result};
use crate::flux_model::{min_singular_value, FluxModel};
use crate::stats::{compensated_dot, compensated_sum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionMethod {
    /// Equispaced nodes `v + i h / d`, coefficients `lambda` with `A lambda = a`.
    Improved,
    /// Searched nodes, zero-sum coefficients `a_i`.
    General,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub method: DecompositionMethod,
    pub nodes: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the re-substitution error.
    pub residual: f64,
    /// `||lambda|| h^d / ||a||` (improved) or `max |a_i| h^{d/alpha} / ||a||` (general).
    pub bound_ratio: f64,
    pub exponent: f64,
    pub condition: f64,
    /// Compensated `sum a_i` (general method only).
    pub coefficient_sum: Option<f64>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// True when every `f_j'` is a polynomial of degree at most `d`, so that the
/// increment matrix factors exactly as `W^T H`.
fn taylor_exact(flux: &FluxModel) -> bool {
    let d = flux.dim();
    (0..d).all(|j| flux.component_poly(j, 1).is_some_and(|p| p.degree() <= d))
}

/// Solve `A(v, h, d) lambda = a`.
pub fn decompose_improved(flux: &FluxModel, v: f64, h: f64, a: &[f64]) -> Result<Decomposition> {
    let d = flux.dim();
    if a.len() != d {
        return Err(Error::InvalidArgument(format!("a has length {}, expected {d}", a.len())));
    }
    check_interval(v, h)?;
    let am = build_increment_matrix(flux, v, h)?;
    let cond = condition_number(&am);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { lo: v, hi: v + h, cond });
    }
    let rhs = DVector::from_column_slice(a);
    let lambda = if taylor_exact(flux) {
        // lambda = H^{-1} W^{-T} a with W^T triangular and H^{-1} exact.
        let wt = flux.wronskian(v)?.transpose();
        let y = wt
            .lu()
            .solve(&rhs)
            .ok_or(Error::IllConditioned { lo: v, hi: v + h, cond })?;
        invert_h(&build_h(d, h)?)? * y
    } else {
        am.clone()
            .full_piv_lu()
            .solve(&rhs)
            .ok_or(Error::IllConditioned { lo: v, hi: v + h, cond })?
    };
    let lambda: Vec<f64> = lambda.iter().cloned().collect();
    let residual = norm(
        &(0..d)
            .map(|j| {
                let row: Vec<f64> = am.row(j).iter().cloned().collect();
                compensated_dot(&row, &lambda) - a[j]
            })
            .collect::<Vec<_>>(),
    );
    let an = norm(a);
    let bound_ratio = if an > 0.0 { norm(&lambda) * h.powi(d as i32) / an } else { 0.0 };
    Ok(Decomposition {
        method: DecompositionMethod::Improved,
        nodes: (0..=d).map(|i| v + i as f64 * h / d as f64).collect(),
        coefficients: lambda,
        residual,
        bound_ratio,
        exponent: d as f64,
        condition: cond,
        coefficient_sum: None,
    })
}

const POSITIONS: usize = 21;
const MAX_TUPLES: usize = 100_000;

/// Rows `(1, f'(v_i))`.
fn node_system(flux: &FluxModel, nodes: &[f64]) -> DMatrix<f64> {
    let d = flux.dim();
    DMatrix::from_fn(d + 1, d + 1, |r, c| if c == 0 { 1.0 } else { flux.component(c - 1, 1, nodes[r]) })
}

fn admissible(nodes: &[f64], lo: f64, hi: f64, gap: f64) -> bool {
    nodes.first().is_some_and(|&x| x >= lo)
        && nodes.last().is_some_and(|&x| x <= hi)
        && nodes.windows(2).all(|w| w[1] - w[0] >= gap)
}

fn enumerate_tuples(k: usize, min_step: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, left: usize, step: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if out.len() >= MAX_TUPLES {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        // room for the remaining nodes after this one
        let need = (left - 1) * step;
        for p in start..POSITIONS {
            if p + need >= POSITIONS {
                break;
            }
            cur.push(p);
            rec(p + step, left - 1, step, cur, out);
            cur.pop();
        }
    }
    rec(0, k, min_step, &mut Vec::new(), out);
}

/// Write `(0, a)` as `sum a_i (1, f'(v_i))` over `d + 1` well-separated nodes
/// in `[v, v + h]`.
///
/// Nodes come from a coarse search (21 positions per node) followed by a
/// pattern search, maximizing the smallest singular value of the node system.
pub fn decompose_general(flux: &FluxModel, v: f64, h: f64, a: &[f64], alpha: f64) -> Result<Decomposition> {
    let d = flux.dim();
    if a.len() != d {
        return Err(Error::InvalidArgument(format!("a has length {}, expected {d}", a.len())));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    check_interval(v, h)?;
    let (lo, hi) = (v, v + h);
    let gap = h / (2.0 * (d + 1) as f64);
    let spacing = h / (POSITIONS - 1) as f64;
    let min_step = ((gap / spacing) - 1e-9).ceil().max(1.0) as usize;

    let mut tuples = Vec::new();
    enumerate_tuples(d + 1, min_step, &mut tuples);
    let score = |nodes: &[f64]| min_singular_value(&node_system(flux, nodes));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for t in &tuples {
        let nodes: Vec<f64> = t.iter().map(|&p| lo + p as f64 * spacing).collect();
        let s = score(&nodes);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, nodes));
        }
    }
    let (mut best_score, mut nodes) = best.ok_or(Error::NoAdmissibleNodes { best: 0.0 })?;

    let mut step = spacing / 2.0;
    for _ in 0..4 {
        let mut improved = true;
        while improved {
            improved = false;
            for j in 0..=d {
                for dir in [-1.0, 1.0] {
                    let mut trial = nodes.clone();
                    trial[j] += dir * step;
                    if !admissible(&trial, lo, hi, gap) {
                        continue;
                    }
                    let s = score(&trial);
                    if s > best_score {
                        best_score = s;
                        nodes = trial;
                        improved = true;
                    }
                }
            }
        }
        step /= 2.0;
    }

    let system = node_system(flux, &nodes);
    let cond = condition_number(&system);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::NoAdmissibleNodes { best: best_score });
    }

    // Eliminate the zero-sum row: columns f'(v_i) - f'(v_{d+1}), i = 1..d.
    let last = flux.fprime(nodes[d]);
    let b = DMatrix::from_fn(d, d, |r, c| flux.component(r, 1, nodes[c]) - last[r]);
    let x = b
        .full_piv_lu()
        .solve(&DVector::from_column_slice(a))
        .ok_or(Error::NoAdmissibleNodes { best: best_score })?;
    let mut coeffs: Vec<f64> = x.iter().cloned().collect();
    coeffs.push(-compensated_sum(coeffs.iter().cloned()));

    let sum = compensated_sum(coeffs.iter().cloned());
    let mut res = vec![sum];
    for r in 0..d {
        let col: Vec<f64> = nodes.iter().map(|&n| flux.component(r, 1, n)).collect();
        res.push(compensated_dot(&col, &coeffs) - a[r]);
    }
    let an = norm(a);
    let max_coeff = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let exponent = d as f64 / alpha;
    Ok(Decomposition {
        method: DecompositionMethod::General,
        nodes,
        coefficients: coeffs,
        residual: norm(&res),
        bound_ratio: if an > 0.0 { max_coeff * h.powf(exponent) / an } else { 0.0 },
        exponent,
        condition: cond,
        coefficient_sum: Some(sum),
    })
}
