use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// `2C(1 + 2/(2^γ - 1))`.
pub fn holder_constant(c: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!("Hölder exponent {gamma} not in (0, 1)")));
    }
    Ok(2.0 * c * (1.0 + 2.0 / (2f64.powf(gamma) - 1.0)))
}

/// The formula next to the stated cap `10 C`, which only holds for larger γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderConstantReport {
    pub formula: f64,
    pub stated_cap: f64,
    pub cap_holds: bool,
}

pub fn holder_constant_report(c: f64, gamma: f64) -> Result<HolderConstantReport> {
    let formula = holder_constant(c, gamma)?;
    let stated_cap = 10.0 * c;
    Ok(HolderConstantReport { formula, stated_cap, cap_holds: formula <= stated_cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "alpha_nonlinear")]
    AlphaNonlinear,
    #[serde(rename = "nondegenerate")]
    Nondegenerate,
    #[serde(rename = "burgers_1d")]
    Burgers1d,
}

/// `(1 + 2γ) / (2(1 + d/α))`.
pub fn bootstrap_map(gamma: f64, d: usize, alpha: f64) -> f64 {
    (1.0 + 2.0 * gamma) / (2.0 * (1.0 + d as f64 / alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSchedule {
    pub variant: Variant,
    pub d: usize,
    pub alpha: f64,
    pub g_norm: f64,
    /// Label of the first entry: the one-dimensional schedule starts at `γ_1 = 1/3`.
    pub first_index: usize,
    pub gammas: Vec<f64>,
    /// Companion constants `C_n`; explicit in one dimension, qualitative otherwise.
    pub constants: Vec<f64>,
    pub limit: f64,
    pub fixed_point: f64,
    pub converged: bool,
}

impl ExponentSchedule {
    pub fn gamma0(&self) -> f64 {
        self.gammas[0]
    }

    /// `(n, γ_n, C_n)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.gammas.iter().zip(&self.constants).enumerate().map(|(k, (g, c))| (k + self.first_index, *g, *c))
    }
}

/// Iterate the exponent recursion from its first proven exponent until
/// consecutive values differ by less than `tol` (at most 200 steps).
///
/// Constants: in one dimension `C_1 = (24‖g‖)^{1/3}`, `C_{n+1} = 10(2 C_n ‖g‖)^{1/3}`.
/// Otherwise `C_{n+1} = K C_n^{1/(1+d/α)}` with `K = 1 + ‖g‖`, which only
/// illustrates boundedness.
pub fn bootstrap_iterate(d: usize, alpha: f64, tol: f64, variant: Variant, g_norm: f64) -> Result<ExponentSchedule> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !(g_norm >= 0.0) {
        return Err(Error::InvalidArgument("source bound must be non-negative".into()));
    }
    let (d, alpha) = match variant {
        Variant::Burgers1d => (1, 1.0),
        _ if d == 0 => return Err(Error::InvalidArgument("dimension must be at least 1".into())),
        Variant::Nondegenerate => (d, 1.0),
        Variant::AlphaNonlinear if !(alpha > 0.0 && alpha <= 1.0) => {
            return Err(Error::InvalidArgument(format!("α = {alpha} not in (0, 1]")));
        }
        Variant::AlphaNonlinear => (d, alpha),
    };
    let ratio = d as f64 / alpha;
    let step = |g: f64| match variant {
        Variant::Burgers1d => (1.0 + g) / 3.0,
        _ => bootstrap_map(g, d, alpha),
    };
    let fixed_point = match variant {
        Variant::Burgers1d => 0.5,
        _ => alpha / (2.0 * d as f64),
    };
    let next_constant = |c: f64| match variant {
        Variant::Burgers1d => 10.0 * (2.0 * c * g_norm).cbrt(),
        _ => (1.0 + g_norm) * c.powf(1.0 / (1.0 + ratio)),
    };
    let (first_index, c0) = match variant {
        Variant::Burgers1d => (1, (24.0 * g_norm).cbrt()),
        _ => (0, 1.0 + g_norm),
    };
    let mut gammas = vec![step(0.0)];
    let mut constants = vec![c0];
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let g = *gammas.last().unwrap();
        let next = step(g);
        gammas.push(next);
        constants.push(next_constant(*constants.last().unwrap()));
        if (next - g).abs() < tol {
            converged = true;
            break;
        }
    }
    Ok(ExponentSchedule {
        variant,
        d,
        alpha,
        g_norm,
        first_index,
        limit: *gammas.last().unwrap(),
        gammas,
        constants,
        fixed_point,
        converged,
    })
}

/// Explicit one-dimensional constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryConstants {
    pub g_norm: f64,
    /// `h_r <= C_1 r^{1/3}` with `C_1 = (24‖g‖)^{1/3}`.
    pub c1: f64,
    pub gamma1: f64,
    /// Fixed point `√(2000‖g‖)` of the constant recursion.
    pub h_limit: f64,
    /// `10 √(2000‖g‖)`.
    pub holder_limit: f64,
    /// The same value written as `100 √(20‖g‖)`.
    pub holder_limit_stated: f64,
    /// `10√20 (1 ∨ C_1)(1 ∨ ‖g‖^{1/2})`.
    pub sequence_bound: f64,
}

pub fn corollary_constants(g_norm: f64) -> Result<TheoryConstants> {
    if !(g_norm >= 0.0) {
        return Err(Error::InvalidArgument("source bound must be non-negative".into()));
    }
    let c1 = (24.0 * g_norm).cbrt();
    let h_limit = (2000.0 * g_norm).sqrt();
    Ok(TheoryConstants {
        g_norm,
        c1,
        gamma1: 1.0 / 3.0,
        h_limit,
        holder_limit: 10.0 * h_limit,
        holder_limit_stated: 100.0 * (20.0 * g_norm).sqrt(),
        sequence_bound: 10.0 * 20f64.sqrt() * c1.max(1.0) * g_norm.sqrt().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn holder_constant_values() {
        let v = holder_constant(1.0, 1.0 / 3.0).unwrap();
        assert_relative_eq!(v, 2.0 + 4.0 / (2f64.cbrt() - 1.0), max_relative = 1e-15);
        assert!((v - 17.3893).abs() < 1e-4);
        assert!((holder_constant(1.0, 1.0 - 1e-12).unwrap() - 6.0).abs() < 1e-9);
        assert_eq!(holder_constant(0.0, 0.5).unwrap(), 0.0);
        assert!(holder_constant(1.0, 1.0).is_err());
        assert!(holder_constant(1.0, 0.0).is_err());
        let rep = holder_constant_report(1.0, 1.0 / 3.0).unwrap();
        assert!(!rep.cap_holds);
        assert_eq!(rep.stated_cap, 10.0);
    }

    #[test]
    fn map_examples() {
        assert_eq!(bootstrap_map(0.25, 1, 1.0), 0.375);
        assert_eq!(bootstrap_map(0.0, 1, 1.0), 0.25);
        for (d, a) in [(1, 1.0), (2, 0.5), (3, 1.0 / 3.0)] {
            let g = a / (2.0 * d as f64);
            assert!((bootstrap_map(g, d, a) - g).abs() < 1e-15);
        }
    }

    #[test]
    fn schedules() {
        let b = bootstrap_iterate(1, 1.0, 1e-15, Variant::Burgers1d, 1.0).unwrap();
        assert_eq!(b.first_index, 1);
        for (n, g, _) in b.rows().take(40) {
            assert!((g - 0.5 * (1.0 - 3f64.powi(-(n as i32)))).abs() <= 1e-14);
        }
        let a = bootstrap_iterate(2, 0.5, 1e-13, Variant::AlphaNonlinear, 0.0).unwrap();
        assert!(a.converged && (a.limit - 0.125).abs() < 1e-12);
        assert_eq!(a.gamma0(), 1.0 / (2.0 * 5.0));
        let n = bootstrap_iterate(2, 0.3, 1e-13, Variant::Nondegenerate, 0.0).unwrap();
        assert!((n.limit - 0.25).abs() < 1e-12);
        assert!(bootstrap_iterate(2, 1.5, 1e-3, Variant::AlphaNonlinear, 0.0).is_err());
        assert!(bootstrap_iterate(2, 0.5, 0.0, Variant::AlphaNonlinear, 0.0).is_err());
    }

    #[test]
    fn constants() {
        let z = corollary_constants(0.0).unwrap();
        assert_eq!((z.c1, z.h_limit, z.holder_limit, z.holder_limit_stated), (0.0, 0.0, 0.0, 0.0));
        let one = corollary_constants(1.0).unwrap();
        assert!((one.c1 - 2.8845).abs() < 1e-4);
        assert_relative_eq!(one.holder_limit, one.holder_limit_stated, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn contraction(g1 in 0.0f64..1.0, g2 in 0.0f64..1.0, d in 1usize..5, alpha in 0.01f64..=1.0) {
            let lhs = (bootstrap_map(g1, d, alpha) - bootstrap_map(g2, d, alpha)).abs();
            let q = 1.0 / (1.0 + d as f64 / alpha);
            prop_assert!((lhs - (g1 - g2).abs() * q).abs() <= 1e-15);
            prop_assert!(lhs <= 0.5 * (g1 - g2).abs() + 1e-15);
        }

        #[test]
        fn limits_and_monotonicity(d in 1usize..5, alpha in 0.05f64..=1.0, v in 0usize..3) {
            let variant = [Variant::AlphaNonlinear, Variant::Nondegenerate, Variant::Burgers1d][v];
            let s = bootstrap_iterate(d, alpha, 1e-12, variant, 0.5).unwrap();
            prop_assert!(s.converged);
            prop_assert!(s.gammas.len() <= MAX_ITERATIONS + 1);
            prop_assert!((s.limit - s.fixed_point).abs() <= 1e-12);
            prop_assert!(s.gammas.windows(2).all(|w| w[1] > w[0]));
            prop_assert!(s.constants.iter().all(|c| c.is_finite()));
        }

        #[test]
        fn one_dimensional_constants_bounded(g in 0.0f64..50.0) {
            let s = bootstrap_iterate(1, 1.0, 1e-14, Variant::Burgers1d, g).unwrap();
            let k = corollary_constants(g).unwrap();
            prop_assert!(s.constants.iter().all(|&c| c <= k.sequence_bound * (1.0 + 1e-12)));
            let mut c = s.constants[s.constants.len() - 1];
            for _ in 0..200 {
                c = 10.0 * (2.0 * c * g).cbrt();
            }
            prop_assert!((c - k.h_limit).abs() <= 1e-9 * (1.0 + k.h_limit));
        }
    }
}
