//! Fluxes `f : [0,1] -> R^d`, their derivatives, and nonlinearity diagnostics.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::stats::fit_power_law;

/// Flux description as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxSpec {
    BurgersFamily { d: usize },
    /// Monomial coefficients of each component `f_i`, lowest degree first.
    Polynomial { components: Vec<Vec<f64>> },
    /// Samples of each component on the uniform grid `k / (n - 1)`, `k = 0..n`.
    Tabulated { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxKind {
    BurgersFamily,
    Polynomial,
    Tabulated,
}

const TABLE_WINDOW: usize = 8;
const GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone)]
enum Repr {
    /// `derivs[i][k]` is the k-th derivative of component i, k = 0..=d+2.
    Poly { derivs: Vec<Vec<Polynomial>> },
    /// One local interpolant per window start; `pieces[i][s][k]` in the local
    /// variable `v - nodes[s]`.
    Table { n: usize, pieces: Vec<Vec<Vec<Polynomial>>> },
}

/// Immutable flux model. Cheap to clone and safe to share across threads.
#[derive(Debug, Clone)]
pub struct FluxModel {
    d: usize,
    kind: FluxKind,
    spec: FluxSpec,
    repr: Repr,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_unit(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfDomain(v));
    }
    Ok(())
}

/// Interpolating polynomial through `(x_j, y_j)` in monomial form, via Newton
/// divided differences.
fn interpolate(x: &[f64], y: &[f64]) -> Polynomial {
    let n = x.len();
    let mut c = y.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - j]);
        }
    }
    let mut p = Polynomial::new(vec![c[n - 1]]);
    for i in (0..n - 1).rev() {
        // p <- p * (v - x_i) + c_i
        let mut shifted = vec![0.0];
        shifted.extend_from_slice(p.coeffs());
        p = Polynomial::new(shifted).add(&p.scale(-x[i])).add_constant(c[i]);
    }
    p
}

impl FluxModel {
    pub fn from_spec(spec: &FluxSpec) -> Result<Self> {
        match spec {
            FluxSpec::BurgersFamily { d } => Self::burgers(*d),
            FluxSpec::Polynomial { components } => Self::polynomial(components.clone()),
            FluxSpec::Tabulated { values } => Self::tabulated(values.clone()),
        }
    }

    /// `f_i(u) = u^{i+1} / (i+1)`, i = 1..d.
    pub fn burgers(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let components: Vec<Vec<f64>> = (1..=d)
            .map(|i| {
                let mut c = vec![0.0; i + 2];
                c[i + 1] = 1.0 / (i + 1) as f64;
                c
            })
            .collect();
        let mut m = Self::polynomial(components)?;
        m.kind = FluxKind::BurgersFamily;
        m.spec = FluxSpec::BurgersFamily { d };
        Ok(m)
    }

    pub fn polynomial(components: Vec<Vec<f64>>) -> Result<Self> {
        let d = components.len();
        if d == 0 {
            return Err(Error::InvalidArgument("flux needs at least one component".into()));
        }
        if components.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite flux coefficient".into()));
        }
        let derivs = components
            .iter()
            .map(|c| {
                let mut ps = vec![Polynomial::new(c.clone())];
                for k in 1..=d + 2 {
                    ps.push(ps[k - 1].derivative());
                }
                ps
            })
            .collect();
        Ok(Self {
            d,
            kind: FluxKind::Polynomial,
            spec: FluxSpec::Polynomial { components },
            repr: Repr::Poly { derivs },
        })
    }

    /// Smooth tabulated flux. Derivatives come from a local degree-7
    /// interpolant over the 8 table nodes nearest to `v`.
    pub fn tabulated(values: Vec<Vec<f64>>) -> Result<Self> {
        let d = values.len();
        if d == 0 {
            return Err(Error::InvalidArgument("flux needs at least one component".into()));
        }
        let n = values[0].len();
        if n < TABLE_WINDOW || values.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "tabulated components need equal length >= {TABLE_WINDOW}"
            )));
        }
        if values.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite table entry".into()));
        }
        let step = 1.0 / (n - 1) as f64;
        let pieces = values
            .iter()
            .map(|col| {
                (0..=n - TABLE_WINDOW)
                    .map(|s| {
                        let x0 = s as f64 * step;
                        let x: Vec<f64> = (0..TABLE_WINDOW).map(|j| (s + j) as f64 * step - x0).collect();
                        let p = interpolate(&x, &col[s..s + TABLE_WINDOW]);
                        let mut ps = vec![p];
                        for k in 1..=d + 2 {
                            ps.push(ps[k - 1].derivative());
                        }
                        ps
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            d,
            kind: FluxKind::Tabulated,
            spec: FluxSpec::Tabulated { values },
            repr: Repr::Table { n, pieces },
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> FluxKind {
        self.kind
    }

    pub fn spec(&self) -> &FluxSpec {
        &self.spec
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.repr, Repr::Poly { .. })
    }

    /// Polynomial form of `f_i^{(k)}`, when the flux is polynomial.
    pub fn component_poly(&self, i: usize, k: usize) -> Option<&Polynomial> {
        match &self.repr {
            Repr::Poly { derivs } => derivs.get(i).and_then(|ps| ps.get(k)),
            Repr::Table { .. } => None,
        }
    }

    /// `f_i^{(k)}(v)` without domain checks; `k = 0` is the flux itself.
    pub fn component(&self, i: usize, k: usize, v: f64) -> f64 {
        match &self.repr {
            Repr::Poly { derivs } => derivs[i].get(k).map_or(0.0, |p| p.eval(v)),
            Repr::Table { n, pieces } => {
                let step = 1.0 / (*n - 1) as f64;
                let cell = ((v / step).floor().max(0.0) as usize).min(n - 2);
                let s = cell.saturating_sub(TABLE_WINDOW / 2 - 1).min(n - TABLE_WINDOW);
                pieces[i][s].get(k).map_or(0.0, |p| p.eval(v - s as f64 * step))
            }
        }
    }

    /// `f^{(k)}(v)` for `1 <= k <= d + 2`, `v` in `[0, 1]`.
    pub fn eval_deriv(&self, v: f64, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.d + 2 {
            return Err(Error::OrderOutOfRange { order: k, max: self.d + 2 });
        }
        check_unit(v)?;
        Ok((0..self.d).map(|i| self.component(i, k, v)).collect())
    }

    pub fn fprime(&self, v: f64) -> Vec<f64> {
        (0..self.d).map(|i| self.component(i, 1, v)).collect()
    }

    /// Sampled `max_v |f_i'(v)|` over `[0, 1]`.
    pub fn max_speed(&self, i: usize) -> f64 {
        sample_max(|v| self.component(i, 1, v).abs())
    }

    /// Sampled `max_v |f''(v)|` (Euclidean norm) over `[0, 1]`.
    pub fn sup_second_derivative(&self) -> f64 {
        sample_max(|v| (0..self.d).map(|i| self.component(i, 2, v).powi(2)).sum::<f64>().sqrt())
    }

    /// `L^1({v in [0,1] : |tau + f'(v) . xi| < delta})`.
    pub fn nonlinearity_measure(&self, tau: f64, xi: &[f64], delta: f64) -> Result<f64> {
        if xi.len() != self.d {
            return Err(Error::InvalidArgument(format!("xi has length {}, expected {}", xi.len(), self.d)));
        }
        let norm = (tau * tau + xi.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitDirection(norm));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        Ok(match &self.repr {
            Repr::Poly { .. } => self.symbol_poly(tau, xi).sublevel_measure(delta, 0.0, 1.0),
            Repr::Table { .. } => {
                let h = 1.0 / GRID_POINTS as f64;
                let hits = (0..GRID_POINTS)
                    .filter(|&j| {
                        let v = (j as f64 + 0.5) * h;
                        let q: f64 = tau + (0..self.d).map(|i| xi[i] * self.component(i, 1, v)).sum::<f64>();
                        q.abs() < delta
                    })
                    .count();
                hits as f64 * h
            }
        })
    }

    fn symbol_poly(&self, tau: f64, xi: &[f64]) -> Polynomial {
        let mut q = Polynomial::new(vec![tau]);
        for (i, &x) in xi.iter().enumerate() {
            q = q.add(&self.component_poly(i, 1).expect("polynomial flux").scale(x));
        }
        q
    }

    /// Fit the exponent of Assumption-type bounds `measure <= C delta^alpha`
    /// over signed axes plus `n_directions` random unit directions.
    pub fn fit_alpha(&self, n_directions: usize, deltas: &[f64], seed: u64) -> Result<NonlinearityReport> {
        let d = self.d;
        if n_directions < 8 * d {
            return Err(Error::InvalidArgument(format!("need at least {} directions", 8 * d)));
        }
        if deltas.len() < 3 || deltas.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidArgument("delta grid needs >= 3 positive values".into()));
        }
        let (lo, hi) = deltas.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        if hi / lo < 100.0 {
            return Err(Error::InvalidArgument("delta grid must span two decades".into()));
        }

        let mut directions: Vec<Vec<f64>> = Vec::new();
        for k in 0..=d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d + 1];
                e[k] = s;
                directions.push(e);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while directions.len() < 2 * (d + 1) + n_directions {
            let x: Vec<f64> = (0..=d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                directions.push(x.iter().map(|v| v / n).collect());
            }
        }

        let measures: Vec<Vec<f64>> = directions
            .iter()
            .map(|dir| {
                deltas
                    .iter()
                    .map(|&delta| self.nonlinearity_measure(dir[0], &dir[1..], delta))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;

        let f0 = self.fprime(0.0);
        let f1 = self.fprime(1.0);
        let slopes: Vec<Option<f64>> = directions
            .iter()
            .zip(&measures)
            .map(|(dir, ms)| {
                // Once delta exceeds the symbol's size at an endpoint, the
                // sub-level set is truncated by the interval and the measure
                // stops following the local power law.
                let at = |fp: &[f64]| (dir[0] + fp.iter().zip(&dir[1..]).map(|(a, b)| a * b).sum::<f64>()).abs();
                let edge = [at(&f0), at(&f1)]
                    .into_iter()
                    .filter(|&e| e > 0.0)
                    .fold(f64::INFINITY, f64::min);
                let (x, y): (Vec<f64>, Vec<f64>) = deltas
                    .iter()
                    .zip(ms)
                    .filter(|&(&delta, &m)| m > 0.0 && m < 1.0 && delta < edge)
                    .map(|(&delta, &m)| (delta, m))
                    .unzip();
                if x.len() >= 3 {
                    fit_power_law(&x, &y).map(|(p, _)| p)
                } else {
                    None
                }
            })
            .collect();

        let worst = slopes
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|s| (i, s)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let (alpha, worst_direction, inconclusive) = match worst {
            Some((i, s)) => (s.clamp(f64::MIN_POSITIVE, 1.0), Some(i), false),
            None => (1.0, None, true),
        };
        let constant = measures
            .iter()
            .flat_map(|ms| ms.iter().zip(deltas).map(|(m, delta)| m / delta.powf(alpha)))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        Ok(NonlinearityReport {
            directions,
            deltas: deltas.to_vec(),
            measures,
            direction_alpha: slopes,
            alpha,
            constant,
            worst_direction,
            inconclusive,
        })
    }

    /// Almost-Wronskian: row l, column i holds `f_i^{(1+l)}(v) / l!`, l = 1..d.
    pub fn wronskian(&self, v: f64) -> Result<DMatrix<f64>> {
        check_unit(v)?;
        let d = self.d;
        Ok(DMatrix::from_fn(d, d, |l, i| self.component(i, l + 2, v) / factorial(l + 1)))
    }

    /// Whether `f''(v), ..., f^{(d+1)}(v)` span `R^d`.
    pub fn spanning_check(&self, v: f64, tol: f64) -> Result<SpanningCheck> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        let w = self.wronskian(v)?;
        let sigma = min_singular_value(&w);
        let d = self.d;
        // Columns (1, f'(v)), (0, f''(v)), ..., (0, f^{(d+1)}(v)).
        let aug = DMatrix::from_fn(d + 1, d + 1, |r, c| match (r, c) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (r, c) => self.component(r - 1, c + 1, v),
        });
        let aug_sigma = min_singular_value(&aug);
        Ok(SpanningCheck { spans: sigma > tol, min_singular_value: sigma, augmented_spans: aug_sigma > tol })
    }
}

fn sample_max(g: impl Fn(f64) -> f64) -> f64 {
    const N: usize = 4096;
    (0..=N).map(|j| g(j as f64 / N as f64)).fold(0.0, f64::max)
}

pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpanningCheck {
    pub spans: bool,
    pub min_singular_value: f64,
    /// Same decision made on the `(1, f')`, `(0, f'')`, ... formulation.
    pub augmented_spans: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearityReport {
    /// Unit vectors `(tau, xi)`.
    pub directions: Vec<Vec<f64>>,
    pub deltas: Vec<f64>,
    /// `measures[direction][delta]`.
    pub measures: Vec<Vec<f64>>,
    pub direction_alpha: Vec<Option<f64>>,
    pub alpha: f64,
    pub constant: f64,
    pub worst_direction: Option<usize>,
    pub inconclusive: bool,
}

/// `count` log-spaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn burgers_derivatives() {
        let f = FluxModel::burgers(2).unwrap();
        assert_eq!(f.eval_deriv(0.5, 1).unwrap(), vec![0.5, 0.25]);
        assert_eq!(f.eval_deriv(0.3, 3).unwrap(), vec![0.0, 2.0]);
        let f = FluxModel::burgers(3).unwrap();
        assert_eq!(f.eval_deriv(0.0, 4).unwrap(), vec![0.0, 0.0, 6.0]);
    }

    #[test]
    fn eval_deriv_errors() {
        let f = FluxModel::burgers(2).unwrap();
        assert!(matches!(f.eval_deriv(0.5, 0), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(f.eval_deriv(0.5, 5), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(f.eval_deriv(1.5, 1), Err(Error::OutOfDomain(_))));
    }

    // Counting oracle on a 10^6 midpoint grid.
    fn grid_count(q: impl Fn(f64) -> f64, delta: f64) -> f64 {
        let n = 1_000_000;
        (0..n).filter(|&j| q((j as f64 + 0.5) / n as f64).abs() < delta).count() as f64 / n as f64
    }

    #[test]
    fn measure_matches_grid_count() {
        let f = FluxModel::burgers(1).unwrap();
        let m = f.nonlinearity_measure(0.0, &[1.0], 0.1).unwrap();
        assert_abs_diff_eq!(m, grid_count(|v| v, 0.1), epsilon = 2e-6);
        let f = FluxModel::burgers(2).unwrap();
        let m = f.nonlinearity_measure(0.0, &[0.0, 1.0], 0.01).unwrap();
        assert_abs_diff_eq!(m, grid_count(|v| v * v, 0.01), epsilon = 2e-6);
        assert_abs_diff_eq!(m, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn large_delta_gives_full_interval() {
        let f = FluxModel::burgers(3).unwrap();
        let dir = [0.5, 0.5, 0.5, 0.5];
        let m = f.nonlinearity_measure(dir[0], &dir[1..], 1.0 + 1.0 + 1e-9).unwrap();
        assert_eq!(m, 1.0);
    }

    #[test]
    fn non_unit_direction_rejected() {
        let f = FluxModel::burgers(1).unwrap();
        assert!(matches!(f.nonlinearity_measure(1.0, &[1.0], 0.1), Err(Error::NonUnitDirection(_))));
    }

    #[test]
    fn tabulated_matches_polynomial() {
        let n = 201;
        let values: Vec<Vec<f64>> = vec![
            (0..n).map(|k| (k as f64 / 200.0).powi(2) / 2.0).collect(),
            (0..n).map(|k| (k as f64 / 200.0).powi(3) / 3.0).collect(),
        ];
        let t = FluxModel::tabulated(values).unwrap();
        let b = FluxModel::burgers(2).unwrap();
        for &v in &[0.0, 0.013, 0.5, 0.77, 1.0] {
            for k in 1..=4 {
                let (x, y) = (t.eval_deriv(v, k).unwrap(), b.eval_deriv(v, k).unwrap());
                for (a, c) in x.iter().zip(&y) {
                    assert_abs_diff_eq!(a, c, epsilon = [0.0, 1e-9, 1e-7, 1e-5, 1e-4][k]);
                }
            }
        }
        let mt = t.nonlinearity_measure(0.0, &[0.0, 1.0], 0.01).unwrap();
        assert_abs_diff_eq!(mt, 0.1, epsilon = 1e-5);
    }

    #[test]
    fn wronskian_examples() {
        let f = FluxModel::burgers(2).unwrap();
        let w = f.wronskian(0.3).unwrap();
        assert_eq!(w, DMatrix::from_row_slice(2, 2, &[1.0, 0.6, 0.0, 1.0]));
        let f = FluxModel::burgers(3).unwrap();
        assert_eq!(f.wronskian(0.0).unwrap(), DMatrix::identity(3, 3));
        // f = (u^2/2, u^2): f''' = 0 gives a zero row.
        let g = FluxModel::polynomial(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(g.wronskian(0.4).unwrap().determinant(), 0.0);
    }

    #[test]
    fn spanning_examples() {
        let f = FluxModel::burgers(2).unwrap();
        let s = f.spanning_check(0.0, 1e-8).unwrap();
        assert!(s.spans && s.augmented_spans);
        assert_abs_diff_eq!(s.min_singular_value, 1.0, epsilon = 1e-14);
        let g = FluxModel::polynomial(vec![vec![0.0, 0.0, 0.5], vec![0.0, 0.0, 1.0]]).unwrap();
        let s = g.spanning_check(0.5, 1e-8).unwrap();
        assert!(!s.spans && !s.augmented_spans);
        assert!(s.min_singular_value < 1e-12);
        let f4 = FluxModel::burgers(4).unwrap();
        for j in 0..100 {
            let v = j as f64 / 99.0;
            assert!(f4.spanning_check(v, 1e-8).unwrap().spans);
        }
    }

    #[test]
    fn alpha_burgers() {
        let deltas = log_grid(1e-4, 1e-1, 13);
        for d in 1..=3 {
            let f = FluxModel::burgers(d).unwrap();
            let r = f.fit_alpha(64 * d, &deltas, 11).unwrap();
            assert!(!r.inconclusive);
            assert!((r.alpha - 1.0 / d as f64).abs() <= 0.05, "d={d} alpha={}", r.alpha);
            assert!(r.constant > 0.0);
            assert!(r.measures.iter().flatten().all(|m| (0.0..=1.0).contains(m)));
        }
    }

    #[test]
    fn alpha_preconditions() {
        let f = FluxModel::burgers(2).unwrap();
        assert!(f.fit_alpha(4, &log_grid(1e-4, 1e-1, 13), 0).is_err());
        assert!(f.fit_alpha(32, &log_grid(1e-2, 1e-1, 13), 0).is_err());
    }

    #[test]
    fn zero_flux_is_inconclusive() {
        let f = FluxModel::polynomial(vec![vec![0.3]]).unwrap();
        let r = f.fit_alpha(8, &log_grid(1e-4, 1e-1, 13), 0).unwrap();
        assert!(r.inconclusive);
    }

    fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-3).then(|| v.iter().map(|x| x / n).collect())
    }

    proptest! {
        #[test]
        fn measure_monotone_in_delta(
            raw in prop::collection::vec(-1.0f64..1.0, 3),
            d1 in 1e-5f64..0.5,
            d2 in 1e-5f64..0.5,
        ) {
            if let Some(dir) = unit(raw) {
                let f = FluxModel::burgers(2).unwrap();
                let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
                let a = f.nonlinearity_measure(dir[0], &dir[1..], lo).unwrap();
                let b = f.nonlinearity_measure(dir[0], &dir[1..], hi).unwrap();
                prop_assert!(a <= b + 1e-12);
                prop_assert!((0.0..=1.0).contains(&a));
            }
        }

        #[test]
        fn measure_direction_symmetric(
            raw in prop::collection::vec(-1.0f64..1.0, 4),
            delta in 1e-4f64..0.5,
        ) {
            if let Some(dir) = unit(raw) {
                let f = FluxModel::burgers(3).unwrap();
                let neg: Vec<f64> = dir.iter().map(|x| -x).collect();
                let a = f.nonlinearity_measure(dir[0], &dir[1..], delta).unwrap();
                let b = f.nonlinearity_measure(neg[0], &neg[1..], delta).unwrap();
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn burgers_spans_everywhere(v in 0.0f64..=1.0, d in 1usize..=5) {
            let f = FluxModel::burgers(d).unwrap();
            prop_assert!(f.spanning_check(v, 1e-8).unwrap().spans);
        }
    }
}
