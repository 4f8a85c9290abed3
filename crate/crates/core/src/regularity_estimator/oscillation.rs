use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetic_geometry::{ball_cells, BoxIntegrator, Geometry, GridSolution, Reconstruction};
use crate::stats::fit_power_law;

/// Oscillations below `RESOLUTION_FLOOR · Δx` are excluded from fits.
pub const RESOLUTION_FLOOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationProfile {
    pub time: f64,
    pub center: Vec<f64>,
    pub geometry: Geometry,
    /// Strictly decreasing.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Whether each radius entered the fit.
    pub used: Vec<bool>,
    pub gamma: Option<f64>,
    pub constant: Option<f64>,
}

impl OscillationProfile {
    pub fn inconclusive(&self) -> bool {
        self.gamma.is_none()
    }
}

/// Averages of one slice over cubes or balls, shared across centers and radii.
struct Averager<'a> {
    sol: &'a GridSolution,
    values: &'a [f64],
    sat: BoxIntegrator<'a>,
    geometry: Geometry,
}

impl Averager<'_> {
    fn average(&self, y: &[f64], r: f64) -> f64 {
        if self.geometry == Geometry::Ball && self.sol.dim() > 1 {
            let cells = ball_cells(self.sol, y, r);
            cells.iter().map(|&lin| self.values[lin]).sum::<f64>() / cells.len() as f64
        } else {
            self.sat.cube_average(y, r)
        }
    }

    fn check(&self, x: &[f64], r: f64) -> Result<()> {
        let dx = self.sol.dx();
        if x.len() != self.sol.dim() {
            return Err(Error::InvalidArgument("center dimension mismatch".into()));
        }
        if !(r >= 2.0 * dx) {
            return Err(Error::RadiusTooSmall { r, min: 2.0 * dx });
        }
        let ext = self.sol.extents().into_iter().fold(f64::INFINITY, f64::min);
        if 4.0 * r > ext {
            return Err(Error::InvalidArgument(format!("the 2r-neighbourhood of radius {r} does not fit the box")));
        }
        Ok(())
    }

    /// Half the spread of r-averages over candidate centers `x + o`, where
    /// each offset coordinate is `-r`, `r` or a lattice multiple `jΔx` with `|jΔx| < r`.
    fn h_r(&self, x: &[f64], r: f64) -> Result<f64> {
        self.check(x, r)?;
        let dx = self.sol.dx();
        let d = x.len();
        let m = ((r / dx) - 1e-9).ceil() as i64 - 1;
        let mut axis: Vec<f64> = vec![-r];
        axis.extend((-m..=m).map(|j| j as f64 * dx));
        axis.push(r);
        let ball = self.geometry == Geometry::Ball;
        let mut idx = vec![0usize; d];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = vec![0.0; d];
        loop {
            let mut norm2 = 0.0;
            for k in 0..d {
                y[k] = x[k] + axis[idx[k]];
                norm2 += axis[idx[k]].powi(2);
            }
            if !ball || norm2 <= r * r * (1.0 + 1e-12) {
                let a = self.average(&y, r);
                lo = lo.min(a);
                hi = hi.max(a);
            }
            let mut k = d;
            loop {
                if k == 0 {
                    return Ok(0.5 * (hi - lo).max(0.0));
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axis.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn averager<'a>(sol: &'a GridSolution, rec: &'a Reconstruction<'a>, t_index: usize, geometry: Geometry) -> Result<Averager<'a>> {
    Ok(Averager { sol, values: sol.slice(t_index)?, sat: BoxIntegrator::new(rec), geometry })
}

/// `h_r(t, x)`: half the largest difference between r-averages of `u(t)` over
/// centers within distance `r` of `x`.
pub fn h_r(sol: &GridSolution, t_index: usize, x: &[f64], r: f64, geometry: Geometry) -> Result<f64> {
    let rec = Reconstruction::new(sol, t_index)?;
    averager(sol, &rec, t_index, geometry)?.h_r(x, r)
}

fn sorted_radii(radii: &[f64]) -> Result<Vec<f64>> {
    let mut r = radii.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    if r.len() < 4 || r.windows(2).any(|w| !(w[0] > w[1])) || !(r[r.len() - 1] > 0.0) {
        return Err(Error::InvalidArgument("need at least 4 distinct positive radii".into()));
    }
    if (r[0] / r[r.len() - 1]).log10() < 1.5 - 1e-12 {
        return Err(Error::InvalidArgument("radii must span at least 1.5 decades".into()));
    }
    Ok(r)
}

/// Profiles at several centers of one slice; centers run in parallel.
pub fn oscillation_profiles(
    sol: &GridSolution,
    t_index: usize,
    centers: &[Vec<f64>],
    radii: &[f64],
    geometry: Geometry,
) -> Result<Vec<OscillationProfile>> {
    let radii = sorted_radii(radii)?;
    let rec = Reconstruction::new(sol, t_index)?;
    let avg = averager(sol, &rec, t_index, geometry)?;
    let time = sol.times()[t_index];
    let floor = RESOLUTION_FLOOR * sol.dx();
    centers
        .par_iter()
        .map(|x| {
            let values = radii.iter().map(|&r| avg.h_r(x, r)).collect::<Result<Vec<f64>>>()?;
            let used: Vec<bool> = values.iter().map(|&h| h >= floor).collect();
            let (rs, hs): (Vec<f64>, Vec<f64>) =
                radii.iter().zip(&values).zip(&used).filter(|(_, &u)| u).map(|((r, h), _)| (*r, *h)).unzip();
            let fit = if rs.len() >= 3 { fit_power_law(&rs, &hs) } else { None };
            Ok(OscillationProfile {
                time,
                center: x.clone(),
                geometry,
                radii: radii.clone(),
                values,
                used,
                gamma: fit.map(|f| f.0),
                constant: fit.map(|f| f.1),
            })
        })
        .collect()
}

/// Least-squares fit of `log h_r` against `log r`, dropping resolution-limited radii.
pub fn oscillation_profile(sol: &GridSolution, t_index: usize, x: &[f64], radii: &[f64], geometry: Geometry) -> Result<OscillationProfile> {
    Ok(oscillation_profiles(sol, t_index, &[x.to_vec()], radii, geometry)?.remove(0))
}
