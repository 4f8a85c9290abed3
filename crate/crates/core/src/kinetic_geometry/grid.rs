use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance within which out-of-range samples are clamped into `[0, 1]`.
pub const RANGE_TOL: f64 = 1e-12;

const MAGIC: &[u8; 8] = b"HLSOL1\0\0";

/// Uniform periodic grid: `cells[k]` cells of width `dx` starting at `lower[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cells: Vec<usize>,
    #[serde(default)]
    pub lower: Option<Vec<f64>>,
    pub extent: Vec<f64>,
}

impl GridSpec {
    pub fn uniform(d: usize, n: usize, extent: f64) -> Self {
        Self { cells: vec![n; d], lower: None, extent: vec![extent; d] }
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn lower(&self) -> Vec<f64> {
        self.lower.clone().unwrap_or_else(|| vec![0.0; self.dim()])
    }

    /// Common cell width; all axes must agree.
    pub fn dx(&self) -> Result<f64> {
        let d = self.dim();
        if d == 0 || self.extent.len() != d || self.lower().len() != d {
            return Err(Error::InvalidArgument("grid cells/extent/lower lengths disagree".into()));
        }
        if self.cells.iter().any(|&n| n == 0) || self.extent.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidArgument("grid needs positive cells and extents".into()));
        }
        let dx = self.extent[0] / self.cells[0] as f64;
        for k in 1..d {
            let dk = self.extent[k] / self.cells[k] as f64;
            if (dk - dx).abs() > 1e-12 * dx {
                return Err(Error::InvalidArgument("grid cells must be cubes (equal dx per axis)".into()));
            }
        }
        Ok(dx)
    }

    pub fn centers(&self, axis: usize) -> Result<Vec<f64>> {
        let dx = self.dx()?;
        let lo = self.lower()[axis];
        Ok((0..self.cells[axis]).map(|i| lo + (i as f64 + 0.5) * dx).collect())
    }
}

/// Time slices of `u` sampled at cell centers of a periodic box. Row-major
/// storage, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    shape: Vec<usize>,
    lower: Vec<f64>,
    dx: f64,
    times: Vec<f64>,
    slices: Vec<Vec<f64>>,
}

impl GridSolution {
    pub fn new(shape: Vec<usize>, lower: Vec<f64>, dx: f64, times: Vec<f64>, mut slices: Vec<Vec<f64>>) -> Result<Self> {
        let d = shape.len();
        if d == 0 || lower.len() != d || shape.iter().any(|&n| n == 0) {
            return Err(Error::InvalidArgument("inconsistent grid shape".into()));
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidArgument("dx must be positive".into()));
        }
        if times.len() != slices.len() || times.is_empty() {
            return Err(Error::InvalidArgument("need one time per slice and at least one slice".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        let n: usize = shape.iter().product();
        for (k, s) in slices.iter_mut().enumerate() {
            if s.len() != n {
                return Err(Error::InvalidArgument(format!("slice {k} has {} values, expected {n}", s.len())));
            }
            for u in s.iter_mut() {
                if !u.is_finite() || *u < -RANGE_TOL || *u > 1.0 + RANGE_TOL {
                    return Err(Error::InvalidArgument(format!("slice {k} has value {u} outside [0, 1]")));
                }
                *u = u.clamp(0.0, 1.0);
            }
        }
        Ok(Self { shape, lower, dx, times, slices })
    }

    /// Sample `f(t, x)` at cell centers.
    pub fn from_fn(grid: &GridSpec, times: &[f64], f: impl Fn(f64, &[f64]) -> f64) -> Result<Self> {
        let dx = grid.dx()?;
        let lower = grid.lower();
        let shape = grid.cells.clone();
        let n: usize = shape.iter().product();
        let mut x = vec![0.0; shape.len()];
        let slices = times
            .iter()
            .map(|&t| {
                (0..n)
                    .map(|lin| {
                        let mut rem = lin;
                        for k in (0..shape.len()).rev() {
                            x[k] = lower[k] + ((rem % shape[k]) as f64 + 0.5) * dx;
                            rem /= shape[k];
                        }
                        f(t, &x)
                    })
                    .collect()
            })
            .collect();
        Self::new(shape, lower, dx, times.to_vec(), slices)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn extents(&self) -> Vec<f64> {
        self.shape.iter().map(|&n| n as f64 * self.dx).collect()
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn n_slices(&self) -> usize {
        self.times.len()
    }
    pub fn n_cells(&self) -> usize {
        self.shape.iter().product()
    }
    pub fn slice(&self, t_index: usize) -> Result<&[f64]> {
        self.slices
            .get(t_index)
            .map(|s| s.as_slice())
            .ok_or_else(|| Error::IndexOutOfRange(format!("time index {t_index} of {}", self.n_slices())))
    }

    /// Mean time step, 0 for a single slice.
    pub fn dt(&self) -> f64 {
        let n = self.times.len();
        if n < 2 {
            0.0
        } else {
            (self.times[n - 1] - self.times[0]) / (n - 1) as f64
        }
    }

    /// Index of the slice at time `t`, within a relative tolerance.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times.iter().position(|&s| (s - t).abs() <= tol)
    }

    pub fn linear_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.dim() || idx.iter().zip(&self.shape).any(|(i, n)| i >= n) {
            return Err(Error::IndexOutOfRange(format!("cell {idx:?} in grid {:?}", self.shape)));
        }
        Ok(idx.iter().zip(&self.shape).fold(0, |acc, (i, n)| acc * n + i))
    }

    /// Linear index of a possibly out-of-range integer cell, wrapped periodically.
    pub fn wrapped_index(&self, idx: &[i64]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i.rem_euclid(n as i64) as usize)
    }

    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.lower).map(|(&i, lo)| lo + (i as f64 + 0.5) * self.dx).collect()
    }

    pub fn value(&self, t_index: usize, idx: &[usize]) -> Result<f64> {
        let lin = self.linear_index(idx)?;
        Ok(self.slice(t_index)?[lin])
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.dim();
        let mut out = Vec::with_capacity(64 + 8 * (self.n_cells() * self.n_slices() + 3 * d));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(d as u32).to_le_bytes());
        out.extend_from_slice(&(self.n_slices() as u32).to_le_bytes());
        for &n in &self.shape {
            out.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for x in self.lower.iter().chain(self.extents().iter()).chain([self.dx, self.dt()].iter()) {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for t in &self.times {
            out.extend_from_slice(&t.to_le_bytes());
        }
        for s in &self.slices {
            for u in s {
                out.extend_from_slice(&u.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let d = r.u32()? as usize;
        let ns = r.u32()? as usize;
        if d == 0 || d > 16 {
            return Err(Error::Format(format!("unsupported dimension {d}")));
        }
        let shape: Vec<usize> = (0..d).map(|_| r.u64().map(|n| n as usize)).collect::<Result<_>>()?;
        let lower: Vec<f64> = (0..d).map(|_| r.f64()).collect::<Result<_>>()?;
        let extents: Vec<f64> = (0..d).map(|_| r.f64()).collect::<Result<_>>()?;
        let dx = r.f64()?;
        let _dt = r.f64()?;
        for (e, &n) in extents.iter().zip(&shape) {
            if (e - n as f64 * dx).abs() > 1e-9 * e.abs().max(1.0) {
                return Err(Error::Format("extent disagrees with cells * dx".into()));
            }
        }
        let times: Vec<f64> = (0..ns).map(|_| r.f64()).collect::<Result<_>>()?;
        let n: usize = shape.iter().product();
        let slices = (0..ns)
            .map(|_| (0..n).map(|_| r.f64()).collect::<Result<Vec<f64>>>())
            .collect::<Result<_>>()?;
        if r.pos != bytes.len() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Self::new(shape, lower, dx, times, slices)
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn manifest(&self) -> SolutionManifest {
        SolutionManifest {
            format: "HLSOL1".into(),
            d: self.dim(),
            cells: self.shape.clone(),
            lower: self.lower.clone(),
            extents: self.extents(),
            dx: self.dx,
            dt: self.dt(),
            slices: self
                .times
                .iter()
                .zip(&self.slices)
                .enumerate()
                .map(|(index, (&time, s))| SliceSummary {
                    index,
                    time,
                    min: s.iter().cloned().fold(f64::INFINITY, f64::min),
                    max: s.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    mean: s.iter().sum::<f64>() / s.len() as f64,
                })
                .collect(),
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Format("truncated solution file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// JSON sidecar describing a stored solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionManifest {
    pub format: String,
    pub d: usize,
    pub cells: Vec<usize>,
    pub lower: Vec<f64>,
    pub extents: Vec<f64>,
    pub dx: f64,
    pub dt: f64,
    pub slices: Vec<SliceSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub index: usize,
    pub time: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}
