use serde::{Deserialize, Serialize};

use super::grid::GridSolution;
use super::recon::{cube_ramp_integral, Reconstruction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Euclidean ball; in one dimension the interval `(y - r, y + r)`.
    Ball,
    /// `∞`-norm cube.
    Cube,
}

/// `Q_r(center) x [v_lower, v_lower + width]`, optionally tagged with a time shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticBox {
    pub center: Vec<f64>,
    pub radius: f64,
    pub v_lower: f64,
    pub width: f64,
    #[serde(default)]
    pub time_shift: Option<f64>,
}

impl KineticBox {
    pub fn validate(&self, d: usize) -> Result<()> {
        if self.center.len() != d {
            return Err(Error::InvalidArgument(format!("box center has {} coordinates, expected {d}", self.center.len())));
        }
        if !(self.radius > 0.0) || !(self.width > 0.0) {
            return Err(Error::InvalidArgument("box radius and kinetic width must be positive".into()));
        }
        Ok(())
    }

    pub fn cube(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().map(|c| c - self.radius).collect(),
            self.center.iter().map(|c| c + self.radius).collect(),
        )
    }
}

/// Volume of the r-ball or r-cube in `R^d`.
pub fn region_volume(d: usize, r: f64, geometry: Geometry) -> f64 {
    match (geometry, d) {
        (Geometry::Cube, _) | (Geometry::Ball, 1) => (2.0 * r).powi(d as i32),
        (Geometry::Ball, _) => {
            // π^{d/2} / Γ(d/2 + 1), via the two-step recursion V_d = V_{d-2} 2π / d
            let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
            let mut k = if d % 2 == 0 { 2 } else { 3 };
            while k <= d {
                v *= 2.0 * std::f64::consts::PI / k as f64;
                k += 2;
            }
            v * r.powi(d as i32)
        }
    }
}

/// Kinetic indicator: 1 iff `0 < v <= u(t, x)`.
pub fn chi(sol: &GridSolution, t_index: usize, cell: &[usize], v: f64) -> Result<u8> {
    let u = sol.value(t_index, cell)?;
    Ok(u8::from(0.0 < v && v <= u))
}

fn check_region(sol: &GridSolution, r: f64) -> Result<()> {
    if !(r >= sol.dx()) {
        return Err(Error::RadiusTooSmall { r, min: sol.dx() });
    }
    let ext = sol.extents().into_iter().fold(f64::INFINITY, f64::min);
    if 2.0 * r > ext {
        return Err(Error::InvalidArgument(format!("region of radius {r} does not fit the box")));
    }
    Ok(())
}

/// Cells whose centers lie in the Euclidean ball, as wrapped linear indices.
pub(crate) fn ball_cells(sol: &GridSolution, y: &[f64], r: f64) -> Vec<usize> {
    let d = sol.dim();
    let dx = sol.dx();
    let ranges: Vec<(i64, i64)> = (0..d)
        .map(|k| {
            let a = ((y[k] - r - sol.lower()[k]) / dx - 0.5).floor() as i64;
            let b = ((y[k] + r - sol.lower()[k]) / dx - 0.5).ceil() as i64;
            (a, b)
        })
        .collect();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut out = Vec::new();
    loop {
        let dist2: f64 = (0..d)
            .map(|k| (sol.lower()[k] + (idx[k] as f64 + 0.5) * dx - y[k]).powi(2))
            .sum();
        if dist2 < r * r {
            out.push(sol.wrapped_index(&idx));
        }
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] <= ranges[k].1 {
                break;
            }
            idx[k] = ranges[k].0;
        }
    }
}

fn recon_cell_superlevel(rec: &Reconstruction, lin: usize, level: f64) -> f64 {
    let dx = rec.sol.dx();
    let d = rec.sol.dim();
    let a: Vec<f64> = (0..d).map(|k| rec.slopes[k][lin] * dx).collect();
    let c0 = rec.values[lin] - 0.5 * a.iter().sum::<f64>();
    cube_ramp_integral(0, c0 - level, &a)
}

/// `L^d({z in region : u(t, z) > v})`, exact for the reconstruction on cubes
/// (and on balls in one dimension); balls in `d >= 2` take whole cells by
/// center inclusion.
pub fn superlevel_measure(sol: &GridSolution, t_index: usize, y: &[f64], r: f64, v: f64, geometry: Geometry) -> Result<f64> {
    let rec = Reconstruction::new(sol, t_index)?;
    superlevel_with(&rec, y, r, v, geometry)
}

pub(crate) fn superlevel_with(rec: &Reconstruction, y: &[f64], r: f64, v: f64, geometry: Geometry) -> Result<f64> {
    let sol = rec.sol;
    if y.len() != sol.dim() {
        return Err(Error::InvalidArgument("center dimension mismatch".into()));
    }
    check_region(sol, r)?;
    if geometry == Geometry::Ball && sol.dim() > 1 {
        let cell_vol = sol.dx().powi(sol.dim() as i32);
        return Ok(ball_cells(sol, y, r).into_iter().map(|lin| recon_cell_superlevel(rec, lin, v)).sum::<f64>() * cell_vol);
    }
    let lo: Vec<f64> = y.iter().map(|c| c - r).collect();
    let hi: Vec<f64> = y.iter().map(|c| c + r).collect();
    Ok(rec.superlevel_volume(&lo, &hi, v))
}

/// `L^{d+1}(Q_r(x) x [v, v + w] ∩ hyp u(t))`.
pub fn hypograph_measure(sol: &GridSolution, t_index: usize, kbox: &KineticBox) -> Result<f64> {
    kbox.validate(sol.dim())?;
    let rec = Reconstruction::new(sol, t_index)?;
    let (lo, hi) = kbox.cube();
    Ok(rec.band_integral(&lo, &hi, kbox.v_lower, kbox.width))
}

/// Every level `v` on the grid `k Δv`, `Δv = min(Δx, h/64)`, `v + h <= 1`,
/// with `m(y1, v + h) - m(y2, v) > h |region|`.
pub fn mean_value_levels(
    sol: &GridSolution,
    t_index: usize,
    y1: &[f64],
    y2: &[f64],
    r: f64,
    h: f64,
    geometry: Geometry,
) -> Result<Vec<f64>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidArgument(format!("h must lie in (0, 1), got {h}")));
    }
    let rec = Reconstruction::new(sol, t_index)?;
    let dv = sol.dx().min(h / 64.0);
    let threshold = h * region_volume(sol.dim(), r, geometry);
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let v = k as f64 * dv;
        if v + h > 1.0 {
            break;
        }
        let m1 = superlevel_with(&rec, y1, r, v + h, geometry)?;
        let m2 = superlevel_with(&rec, y2, r, v, geometry)?;
        if m1 - m2 > threshold {
            out.push(v);
        }
        k += 1;
    }
    Ok(out)
}

/// First level of [`mean_value_levels`], or `None` when no grid level works.
pub fn mean_value_level(
    sol: &GridSolution,
    t_index: usize,
    y1: &[f64],
    y2: &[f64],
    r: f64,
    h: f64,
    geometry: Geometry,
) -> Result<Option<f64>> {
    Ok(mean_value_levels(sol, t_index, y1, y2, r, h, geometry)?.first().copied())
}
