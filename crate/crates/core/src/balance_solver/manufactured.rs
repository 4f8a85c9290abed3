use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::data::InitialData;
use crate::error::{Error, Result};
use crate::flux_model::FluxModel;
use crate::kinetic_geometry::{GridSolution, GridSpec};

/// Exact solutions sampled at cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Manufactured {
    /// `clamp((x - x0)/t, 0, 1)` for one-dimensional Burgers.
    RiemannRarefaction { x0: f64 },
    /// `mean + amplitude sin(2π(Σ x_k - t))`; exact with the `sine_advect` source.
    SineAdvect { mean: f64, amplitude: f64 },
    /// Static `clamp(|x - x0|^γ, 0, 1)`, distance to the nearest periodic image.
    HolderProfile { gamma: f64, x0: Vec<f64> },
    /// Burgers family with constant source `g`, before characteristics cross:
    /// `u = w + g t` where `w = u0(x - Φ(w, t))`, `Φ_i = (f_i(w + g t) - f_i(w)) / g`.
    Characteristics { initial: InitialData, source: f64 },
}

fn periodic_distance(x: &[f64], x0: &[f64], extent: &[f64]) -> f64 {
    x.iter()
        .zip(x0)
        .zip(extent)
        .map(|((a, b), e)| {
            let r = (a - b).rem_euclid(*e);
            r.min(e - r).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn characteristic_value(flux: &FluxModel, u0: impl Fn(&[f64]) -> f64, bounds: (f64, f64), g: f64, t: f64, x: &[f64]) -> f64 {
    let d = x.len();
    let mut foot = vec![0.0; d];
    let mut residual = |w: f64| {
        for (i, y) in foot.iter_mut().enumerate() {
            let shift = if g == 0.0 {
                t * flux.component(i, 1, w)
            } else {
                (flux.component(i, 0, w + g * t) - flux.component(i, 0, w)) / g
            };
            *y = x[i] - shift;
        }
        w - u0(&foot)
    };
    let (mut lo, mut hi) = bounds;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if residual(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi) + g * t
}

pub fn manufactured(kind: &Manufactured, grid: &GridSpec, times: &[f64]) -> Result<GridSolution> {
    let d = grid.dim();
    match kind {
        Manufactured::RiemannRarefaction { x0 } => {
            if d != 1 {
                return Err(Error::InvalidArgument("the rarefaction fan is one-dimensional".into()));
            }
            if times.iter().any(|&t| !(t > 0.0)) {
                return Err(Error::InvalidArgument("rarefaction fan is undefined at t = 0".into()));
            }
            GridSolution::from_fn(grid, times, |t, x| ((x[0] - x0) / t).clamp(0.0, 1.0))
        }
        Manufactured::SineAdvect { mean, amplitude } => GridSolution::from_fn(grid, times, |t, x| {
            mean + amplitude * (2.0 * PI * (x.iter().sum::<f64>() - t)).sin()
        }),
        Manufactured::HolderProfile { gamma, x0 } => {
            if !(*gamma > 0.0 && *gamma <= 1.0) {
                return Err(Error::InvalidArgument(format!("Hölder exponent {gamma} not in (0, 1]")));
            }
            if x0.len() != d {
                return Err(Error::InvalidArgument(format!("profile center needs {d} coordinates")));
            }
            GridSolution::from_fn(grid, times, |_, x| periodic_distance(x, x0, &grid.extent).powf(*gamma).clamp(0.0, 1.0))
        }
        Manufactured::Characteristics { initial, source } => {
            if initial.eval(&vec![0.0; d]).is_none() {
                return Err(Error::InvalidArgument("characteristics need initial data defined off the grid".into()));
            }
            let flux = FluxModel::burgers(d)?;
            let bounds = initial.bounds();
            GridSolution::from_fn(grid, times, |t, x| {
                characteristic_value(&flux, |y| initial.eval(y).unwrap_or_default(), bounds, *source, t, x)
            })
        }
    }
}
