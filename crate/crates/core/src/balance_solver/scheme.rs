use rayon::prelude::*;

use super::data::{Source, SolverConfig};
use crate::error::{Error, Result};
use crate::flux_model::FluxModel;
use crate::kinetic_geometry::{GridSolution, RANGE_TOL};

/// Engquist–Osher flux for one component:
/// `F(a, b) = f(0) + ∫_0^a max(f', 0) + ∫_0^b min(f', 0)`.
pub struct EngquistOsher<'a> {
    flux: &'a FluxModel,
    comp: usize,
    /// Breakpoints `0 = b_0 < ... < b_m = 1` where `f'` changes sign.
    breaks: Vec<f64>,
    increasing: Vec<bool>,
}

fn sign_changes(g: impl Fn(f64) -> f64) -> Vec<f64> {
    const SAMPLES: usize = 1024;
    let mut roots = Vec::new();
    let mut prev = g(0.0);
    for j in 1..=SAMPLES {
        let x1 = j as f64 / SAMPLES as f64;
        let cur = g(x1);
        if prev * cur < 0.0 {
            let (mut lo, mut hi) = ((j - 1) as f64 / SAMPLES as f64, x1);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if (g(m) < 0.0) == (g(lo) < 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    roots
}

impl<'a> EngquistOsher<'a> {
    pub fn new(flux: &'a FluxModel, comp: usize) -> Self {
        let interior = match flux.component_poly(comp, 1) {
            Some(p) => p.roots_in(0.0, 1.0),
            None => sign_changes(|v| flux.component(comp, 1, v)),
        };
        let mut breaks = vec![0.0];
        breaks.extend(interior.into_iter().filter(|r| *r > 1e-14 && *r < 1.0 - 1e-14));
        breaks.push(1.0);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let increasing = breaks.windows(2).map(|w| flux.component(comp, 1, 0.5 * (w[0] + w[1])) >= 0.0).collect();
        Self { flux, comp, breaks, increasing }
    }

    fn f(&self, v: f64) -> f64 {
        self.flux.component(self.comp, 0, v)
    }

    /// `∫_0^a max(f', 0)`.
    fn plus(&self, a: f64) -> f64 {
        let mut s = 0.0;
        for (w, &inc) in self.breaks.windows(2).zip(&self.increasing) {
            if a <= w[0] {
                break;
            }
            if inc {
                s += self.f(a.min(w[1])) - self.f(w[0]);
            }
        }
        s
    }

    pub fn numerical_flux(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.clamp(0.0, 1.0), b.clamp(0.0, 1.0));
        match self.increasing.as_slice() {
            [true] => return self.f(a),
            [false] => return self.f(b),
            _ => {}
        }
        self.plus(a) + self.f(b) - self.plus(b)
    }
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// One conservative sweep along `axis` with ratio `lambda = dt / dx`.
fn sweep(u: &mut Vec<f64>, shape: &[usize], axis: usize, lambda: f64, eo: &EngquistOsher) {
    let (n, st) = (shape[axis], strides(shape)[axis]);
    let neighbour = |lin: usize, offset: usize| {
        let i = (lin / st) % n;
        lin - i * st + ((i + offset) % n) * st
    };
    let old = &*u;
    // interface flux at the right face of each cell
    let right: Vec<f64> = (0..old.len()).into_par_iter().map(|lin| eo.numerical_flux(old[lin], old[neighbour(lin, 1)])).collect();
    let new: Vec<f64> = (0..old.len())
        .into_par_iter()
        .map(|lin| old[lin] - lambda * (right[lin] - right[neighbour(lin, n - 1)]))
        .collect();
    *u = new;
}

struct Stepper<'a> {
    flux: &'a FluxModel,
    source: &'a Source,
    shape: Vec<usize>,
    dx: f64,
    centers: Vec<Vec<f64>>,
    eo: Vec<EngquistOsher<'a>>,
}

impl Stepper<'_> {
    /// Explicit midpoint for `u' = g(t, x)` over `[t, t + tau]`.
    fn source_step(&self, u: &mut [f64], t: f64, tau: f64) {
        if self.source.is_zero() {
            return;
        }
        let tm = t + 0.5 * tau;
        u.par_iter_mut().zip(&self.centers).enumerate().for_each(|(lin, (ui, x))| {
            *ui += tau * self.source.eval(self.flux, tm, lin, x);
        });
    }

    fn step(&self, u: &mut Vec<f64>, t: f64, dt: f64, parity: bool) -> Result<()> {
        let d = self.shape.len();
        self.source_step(u, t, 0.5 * dt);
        for j in 0..d {
            let axis = if parity { d - 1 - j } else { j };
            sweep(u, &self.shape, axis, dt / self.dx, &self.eo[axis]);
        }
        self.source_step(u, t + 0.5 * dt, 0.5 * dt);
        let excess = u.iter().fold(0.0f64, |m, &v| m.max(-v).max(v - 1.0));
        if excess > RANGE_TOL || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::RangeEscape { excess, time: t + dt });
        }
        u.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        Ok(())
    }
}

/// Dimension-split Engquist–Osher scheme on the periodic box with Strang
/// source splitting. Returns the slices at the requested output times.
pub fn solve(config: &SolverConfig) -> Result<GridSolution> {
    let flux = FluxModel::from_spec(&config.flux)?;
    let times = config.validate(&flux)?;
    let grid = &config.grid;
    let d = grid.dim();
    let dx = grid.dx()?;
    let shape = grid.cells.clone();
    let n: usize = shape.iter().product();
    let axis_centers: Vec<Vec<f64>> = (0..d).map(|k| grid.centers(k)).collect::<Result<_>>()?;
    let centers: Vec<Vec<f64>> = (0..n)
        .map(|lin| {
            let mut x = vec![0.0; d];
            let mut rem = lin;
            for k in (0..d).rev() {
                x[k] = axis_centers[k][rem % shape[k]];
                rem /= shape[k];
            }
            x
        })
        .collect();
    let stepper = Stepper {
        flux: &flux,
        source: &config.source,
        shape: shape.clone(),
        dx,
        centers,
        eo: (0..d).map(|k| EngquistOsher::new(&flux, k)).collect(),
    };
    let speed = (0..d).map(|k| flux.max_speed(k)).fold(0.0, f64::max);
    let dt_max = if speed > 0.0 { config.cfl * dx / speed } else { f64::INFINITY };

    let mut u = config.initial.sample(grid)?;
    let mut t = 0.0;
    let mut parity = false;
    let mut slices = Vec::with_capacity(times.len());
    for &target in &times {
        while t < target {
            let remaining = target - t;
            // avoid a sliver step just before an output time
            let dt = if remaining <= dt_max {
                remaining
            } else if remaining < 2.0 * dt_max {
                0.5 * remaining
            } else {
                dt_max
            };
            stepper.step(&mut u, t, dt, parity)?;
            parity = !parity;
            t = if dt == remaining { target } else { t + dt };
        }
        slices.push(u.clone());
    }
    log::debug!("solved {n} cells to t = {} with dt <= {dt_max:.3e}", config.final_time);
    GridSolution::new(shape, grid.lower(), dx, times, slices)
}
