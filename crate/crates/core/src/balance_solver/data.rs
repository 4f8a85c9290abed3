use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux_model::{FluxModel, FluxSpec};
use crate::kinetic_geometry::{GridSpec, RANGE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub amplitude: f64,
    pub wavevector: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

/// Initial data, sampled at cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant { value: f64 },
    /// `mean + Σ a_m sin(2π k_m·x + φ_m)`.
    Fourier { mean: f64, modes: Vec<Mode> },
    /// One value per cell, row-major.
    Table { values: Vec<f64> },
}

impl InitialData {
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(*value),
            Self::Fourier { mean, modes } => Some(
                mean + modes
                    .iter()
                    .map(|m| {
                        let kx: f64 = m.wavevector.iter().zip(x).map(|(k, x)| k * x).sum();
                        m.amplitude * (2.0 * PI * kx + m.phase).sin()
                    })
                    .sum::<f64>(),
            ),
            Self::Table { .. } => None,
        }
    }

    /// `[min, max]` bounds of the data.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Self::Constant { value } => (*value, *value),
            Self::Fourier { mean, modes } => {
                let a: f64 = modes.iter().map(|m| m.amplitude.abs()).sum();
                (mean - a, mean + a)
            }
            Self::Table { values } => values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        let d = grid.dim();
        let n: usize = grid.cells.iter().product();
        let values = match self {
            Self::Table { values } => {
                if values.len() != n {
                    return Err(Error::InvalidArgument(format!("initial table has {} values, grid has {n} cells", values.len())));
                }
                values.clone()
            }
            Self::Fourier { modes, .. } if modes.iter().any(|m| m.wavevector.len() != d) => {
                return Err(Error::InvalidArgument(format!("Fourier wavevectors must have {d} components")));
            }
            _ => {
                let centers: Vec<Vec<f64>> = (0..d).map(|k| grid.centers(k)).collect::<Result<_>>()?;
                let mut x = vec![0.0; d];
                (0..n)
                    .map(|lin| {
                        let mut rem = lin;
                        for k in (0..d).rev() {
                            x[k] = centers[k][rem % grid.cells[k]];
                            rem /= grid.cells[k];
                        }
                        self.eval(&x).unwrap_or_default()
                    })
                    .collect()
            }
        };
        if let Some(bad) = values.iter().find(|u| !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(*u)) {
            return Err(Error::RangeEscape { excess: if *bad < 0.0 { -bad } else { bad - 1.0 }, time: 0.0 });
        }
        Ok(values.into_iter().map(|u| u.clamp(0.0, 1.0)).collect())
    }
}

/// Source term `g(t, x)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    #[default]
    Zero,
    Constant { value: f64 },
    /// Time-independent, one value per cell.
    Table { values: Vec<f64> },
    /// Forcing that makes `mean + amplitude sin(2π(Σ x_k - t))` an exact solution.
    SineAdvect { mean: f64, amplitude: f64 },
}

impl Source {
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { value } => *value == 0.0,
            Self::Table { values } => values.iter().all(|v| *v == 0.0),
            Self::SineAdvect { amplitude, .. } => *amplitude == 0.0,
        }
    }

    /// `g(t, x)` at cell `lin` with center `x`.
    pub fn eval(&self, flux: &FluxModel, t: f64, lin: usize, x: &[f64]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::Table { values } => values[lin],
            Self::SineAdvect { mean, amplitude } => {
                let theta = 2.0 * PI * (x.iter().sum::<f64>() - t);
                let u = mean + amplitude * theta.sin();
                let speed: f64 = flux.fprime(u.clamp(0.0, 1.0)).iter().sum();
                2.0 * PI * amplitude * theta.cos() * (speed - 1.0)
            }
        }
    }

    /// `‖g‖_∞` (sampled for the sine forcing).
    pub fn sup_norm(&self, flux: &FluxModel) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => value.abs(),
            Self::Table { values } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Self::SineAdvect { mean, amplitude } => (0..=4096)
                .map(|j| {
                    let theta = 2.0 * PI * j as f64 / 4096.0;
                    let u = (mean + amplitude * theta.sin()).clamp(0.0, 1.0);
                    let speed: f64 = flux.fprime(u).iter().sum();
                    (2.0 * PI * amplitude * theta.cos() * (speed - 1.0)).abs()
                })
                .fold(0.0, f64::max),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            Self::Table { values } if values.len() != n => {
                Err(Error::InvalidArgument(format!("source table has {} values, grid has {n} cells", values.len())))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub flux: FluxSpec,
    #[serde(default)]
    pub source: Source,
    pub grid: GridSpec,
    pub cfl: f64,
    pub final_time: f64,
    /// Times at which slices are stored; defaults to `[0, final_time]`.
    #[serde(default)]
    pub output_times: Vec<f64>,
    pub initial: InitialData,
}

impl SolverConfig {
    pub(crate) fn validate(&self, flux: &FluxModel) -> Result<Vec<f64>> {
        let d = self.grid.dim();
        self.grid.dx()?;
        if flux.dim() != d {
            return Err(Error::InvalidArgument(format!("flux has {} components, grid has {d} axes", flux.dim())));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Cfl(format!("CFL number {} not in (0, 1]", self.cfl)));
        }
        if !(self.final_time >= 0.0) || !self.final_time.is_finite() {
            return Err(Error::InvalidArgument("final time must be finite and non-negative".into()));
        }
        self.source.check(self.grid.cells.iter().product())?;
        let times = if self.output_times.is_empty() {
            if self.final_time > 0.0 { vec![0.0, self.final_time] } else { vec![0.0] }
        } else {
            self.output_times.clone()
        };
        if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 || *times.last().unwrap() > self.final_time {
            return Err(Error::InvalidArgument("output times must increase within [0, final_time]".into()));
        }
        Ok(times)
    }
}
