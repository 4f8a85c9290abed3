use rayon::prelude::*;

use super::grid::GridSolution;
use super::measures::KineticBox;
use crate::error::{Error, Result};
use crate::flux_model::FluxModel;

/// Cell fractions of a set in `(x, v)` space: `nv` velocity slices of the
/// spatial grid, v-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    pub shape: Vec<usize>,
    pub lower: Vec<f64>,
    pub dx: f64,
    pub v_lower: f64,
    pub dv: f64,
    pub nv: usize,
    pub data: Vec<f64>,
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

impl KineticField {
    fn cells(&self) -> usize {
        self.shape.iter().product()
    }

    /// Exact cell fractions of `Q_r(center) x [v, v + w]` on the periodic box.
    pub fn from_box(shape: &[usize], lower: &[f64], dx: f64, v_lower: f64, dv: f64, nv: usize, kbox: &KineticBox) -> Result<Self> {
        let d = shape.len();
        kbox.validate(d)?;
        let axis_frac: Vec<Vec<f64>> = (0..d)
            .map(|k| {
                let ext = shape[k] as f64 * dx;
                (0..shape[k])
                    .map(|i| {
                        let c0 = lower[k] + i as f64 * dx;
                        // periodic images of the interval
                        (-2..=2)
                            .map(|m| {
                                let s = m as f64 * ext;
                                overlap(c0, c0 + dx, kbox.center[k] - kbox.radius + s, kbox.center[k] + kbox.radius + s)
                            })
                            .sum::<f64>()
                            / dx
                    })
                    .collect()
            })
            .collect();
        let n: usize = shape.iter().product();
        let mut data = vec![0.0; n * nv];
        for j in 0..nv {
            let vf = overlap(v_lower + j as f64 * dv, v_lower + (j + 1) as f64 * dv, kbox.v_lower, kbox.v_lower + kbox.width) / dv;
            if vf == 0.0 {
                continue;
            }
            for lin in 0..n {
                let mut rem = lin;
                let mut f = vf;
                for k in (0..d).rev() {
                    f *= axis_frac[k][rem % shape[k]];
                    rem /= shape[k];
                }
                data[j * n + lin] = f;
            }
        }
        Ok(Self { shape: shape.to_vec(), lower: lower.to_vec(), dx, v_lower, dv, nv, data })
    }

    /// Fractions of the hypograph `{0 < v <= u}` per cell and velocity slice.
    pub fn from_hypograph(sol: &GridSolution, t_index: usize, nv: usize) -> Result<Self> {
        let u = sol.slice(t_index)?;
        let dv = 1.0 / nv as f64;
        let n = u.len();
        let mut data = vec![0.0; n * nv];
        for j in 0..nv {
            for (lin, &ui) in u.iter().enumerate() {
                data[j * n + lin] = ((ui - j as f64 * dv) / dv).clamp(0.0, 1.0);
            }
        }
        Ok(Self { shape: sol.shape().to_vec(), lower: sol.lower().to_vec(), dx: sol.dx(), v_lower: 0.0, dv, nv, data })
    }

    pub fn measure(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.dx.powi(self.shape.len() as i32) * self.dv
    }

    /// `L^{d+1}` of the symmetric difference, for fractional sets.
    pub fn l1_distance(&self, other: &KineticField) -> Result<f64> {
        if self.shape != other.shape || self.nv != other.nv {
            return Err(Error::InvalidArgument("kinetic fields on different grids".into()));
        }
        let cell = self.dx.powi(self.shape.len() as i32) * self.dv;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).sum::<f64>() * cell)
    }
}

#[derive(Debug, Clone)]
pub struct Transported {
    pub field: KineticField,
    /// `Δv ||f''|| |s| <= Δx`; otherwise the shear is under-resolved in v.
    pub resolved: bool,
}

/// Shift one periodic axis by `shift` cells with linear interpolation.
fn shift_axis(data: &mut [f64], shape: &[usize], axis: usize, shift: f64) {
    if shift == 0.0 {
        return;
    }
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let m = shift.floor();
    let theta = shift - m;
    let m = (m as i64).rem_euclid(n as i64) as usize;
    let outer = data.len() / (n * stride);
    let mut line = vec![0.0; n];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            for (i, l) in line.iter_mut().enumerate() {
                *l = data[base + i * stride];
            }
            for i in 0..n {
                let a = line[(i + n - m) % n];
                let b = line[(i + 2 * n - m - 1) % n];
                data[base + i * stride] = (1.0 - theta) * a + theta * b;
            }
        }
    }
}

/// `FT(E; s) = {(z, v) : (z - s f'(v), v) in E}`, slice by slice.
pub fn free_transport(field: &KineticField, s: f64, flux: &FluxModel) -> Result<Transported> {
    let d = field.shape.len();
    if flux.dim() != d {
        return Err(Error::InvalidArgument("flux dimension differs from the grid".into()));
    }
    let resolved = field.dv * flux.sup_second_derivative() * s.abs() <= field.dx;
    if !resolved {
        log::warn!("free transport under-resolved: dv * |f''| * |s| exceeds dx");
    }
    let n = field.cells();
    let mut out = field.clone();
    out.data.par_chunks_mut(n).enumerate().for_each(|(j, slice)| {
        let v = (field.v_lower + (j as f64 + 0.5) * field.dv).clamp(0.0, 1.0);
        for k in 0..d {
            shift_axis(slice, &field.shape, k, s * flux.component(k, 1, v) / field.dx);
        }
    });
    Ok(Transported { field: out, resolved })
}
