use serde::Serialize;

use super::grid::GridSolution;
use super::measures::{region_volume, superlevel_with, Geometry, KineticBox};
use super::recon::Reconstruction;
use crate::error::{Error, Result};
use crate::flux_model::FluxModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Relative grid allowance `10 Δx / r`.
    pub tolerance: f64,
    /// Absolute allowance for reconstruction error, `tolerance · Δx · ω · |Q_r|`.
    pub floor: f64,
    pub pass: bool,
}

/// `Σ_j Δv · L^d({z in Q_r(x + shift(v_j)) : u > v_j})`, midpoint levels in
/// `[v, v + ω]` with `Δv <= min(Δx, ω/64)`.
fn sheared_hypograph(rec: &Reconstruction, flux: &FluxModel, kbox: &KineticBox, s: f64, dx: f64) -> Result<f64> {
    let nv = (kbox.width / dx.min(kbox.width / 64.0)).ceil() as usize;
    let dv = kbox.width / nv as f64;
    let mut total = 0.0;
    for j in 0..nv {
        let v = kbox.v_lower + (j as f64 + 0.5) * dv;
        let speed = flux.fprime(v.clamp(0.0, 1.0));
        let y: Vec<f64> = kbox.center.iter().zip(&speed).map(|(c, a)| c + s * a).collect();
        total += dv * superlevel_with(rec, &y, kbox.radius, v, Geometry::Cube)?;
    }
    Ok(total)
}

/// Compare the hypograph mass in `R` at `t0` with the mass in `FT(R; T)` at
/// `t0 + T` against the source bound.
pub fn verify_transport_estimate(
    sol: &GridSolution,
    flux: &FluxModel,
    kbox: &KineticBox,
    t0_index: usize,
    horizon: f64,
    g_bound: f64,
) -> Result<TransportCheck> {
    let d = sol.dim();
    kbox.validate(d)?;
    if flux.dim() != d {
        return Err(Error::InvalidArgument("flux dimension differs from the grid".into()));
    }
    if !(horizon >= 0.0) || !(g_bound >= 0.0) {
        return Err(Error::InvalidArgument("horizon and source bound must be non-negative".into()));
    }
    let t0 = *sol
        .times()
        .get(t0_index)
        .ok_or_else(|| Error::IndexOutOfRange(format!("time index {t0_index}")))?;
    let t1_index = sol
        .time_index(t0 + horizon)
        .ok_or_else(|| Error::TimeSpan(format!("no slice at t = {}", t0 + horizon)))?;
    let dx = sol.dx();
    let r = kbox.radius;
    let (omega, f2) = (kbox.width, flux.sup_second_derivative());
    let lhs = if t1_index == t0_index {
        0.0
    } else {
        let before = sheared_hypograph(&Reconstruction::new(sol, t0_index)?, flux, kbox, 0.0, dx)?;
        let after = sheared_hypograph(&Reconstruction::new(sol, t1_index)?, flux, kbox, horizon, dx)?;
        (after - before).abs()
    };
    let t = horizon;
    let rhs = if d == 1 {
        g_bound * (2.0 * r * t + f2 * omega * t * t / 2.0)
    } else {
        t * g_bound * (2.0 * (r + t * omega * f2 / 2.0)).powi(d as i32)
    };
    let tolerance = 10.0 * dx / r;
    let floor = tolerance * dx * omega * region_volume(d, r, Geometry::Cube);
    Ok(TransportCheck { lhs, rhs, tolerance, floor, pass: lhs <= rhs * (1.0 + tolerance) + floor })
}
