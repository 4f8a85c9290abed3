//! The acceptance checks behind `verify-all`. Each check recomputes its
//! reference values from closed forms or printed tables.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::balance_solver::{manufactured, solve, InitialData, Manufactured, Mode, SolverConfig, Source};
use crate::error::Result;
use crate::flux_model::{log_grid, FluxModel, FluxSpec};
use crate::kinetic_geometry::{free_transport, verify_transport_estimate, Geometry, GridSolution, GridSpec, KineticBox, KineticField};
use crate::matrix_decomp::{build_h, decompose_improved, directional_gain, invert_h};
use crate::regularity_estimator::{bootstrap_iterate, h_r, oscillation_profile, oscillation_profiles, Variant};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Printed inverse coefficients at `h = 1`; column `l` scales as `h^-(l+1)`.
const INV2: [[f64; 2]; 2] = [[4.0, -4.0], [-1.0, 2.0]];
const INV3: [[f64; 3]; 3] = [[9.0, -22.5, 13.5], [-4.5, 18.0, -13.5], [1.0, -4.5, 4.5]];
const INV4: [[f64; 4]; 4] = [
    [16.0, -208.0 / 3.0, 96.0, -128.0 / 3.0],
    [-12.0, 76.0, -128.0, 64.0],
    [16.0 / 3.0, -112.0 / 3.0, 224.0 / 3.0, -128.0 / 3.0],
    [-1.0, 22.0 / 3.0, -16.0, 32.0 / 3.0],
];

fn printed_inverse(d: usize, i: usize, l: usize) -> f64 {
    match d {
        2 => INV2[i][l],
        3 => INV3[i][l],
        _ => INV4[i][l],
    }
}

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 { got.abs() } else { ((got - want) / want).abs() }
}

fn node_matrices() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        for h in [1.0, 0.5] {
            let m = build_h(d, h)?;
            let inv = invert_h(&m)?;
            for a in 0..d {
                for b in 0..d {
                    let entry = ((b + 1) as f64 * h / d as f64).powi(a as i32 + 1);
                    worst = worst.max(rel(m.matrix[(a, b)], entry));
                    worst = worst.max(rel(inv[(a, b)], printed_inverse(d, a, b) / h.powi(b as i32 + 1)));
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.2e}")))
}

/// Closed-form Burgers coefficients in one, two and three dimensions.
pub fn burgers_lambda(v: f64, h: f64, a: &[f64]) -> Option<Vec<f64>> {
    Some(match *a {
        [ax] => vec![ax / h],
        [ax, ay] => vec![(4.0 * (h + 2.0 * v) * ax - 4.0 * ay) / (h * h), (2.0 * ay - (h + 4.0 * v) * ax) / (h * h)],
        [ax, ay, az] => {
            let den = 2.0 * h.powi(3);
            vec![
                9.0 * ((2.0 * h * h + 10.0 * h * v + 9.0 * v * v) * ax - (5.0 * h + 9.0 * v) * ay + 3.0 * az) / den,
                -9.0 * ((h * h + 8.0 * h * v + 9.0 * v * v) * ax - (4.0 * h + 9.0 * v) * ay + 3.0 * az) / den,
                ((2.0 * h * h + 18.0 * h * v + 27.0 * v * v) * ax - 9.0 * (h + 3.0 * v) * ay + 9.0 * az) / den,
            ]
        }
        _ => return None,
    })
}

fn coefficients(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let (mut res, mut coef): (f64, f64) = (0.0, 0.0);
    for d in 1..=3 {
        let f = FluxModel::burgers(d)?;
        for _ in 0..100 {
            let h = rng.random_range(0.05..1.0);
            let v = rng.random_range(0.0..1.0 - h);
            let a: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dec = decompose_improved(&f, v, h, &a)?;
            let want = burgers_lambda(v, h, &a).unwrap_or_default();
            let scale = want.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            res = res.max(dec.residual);
            coef = coef.max(dec.coefficients.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale);
        }
    }
    Ok((res <= 1e-10 && coef <= 1e-10, format!("residual {res:.2e}, coefficient mismatch {coef:.2e}")))
}

fn max_over_min(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.into_iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi / lo
}

fn certification() -> Result<(bool, String)> {
    let hs: Vec<f64> = (0..=12).map(|k| 0.5f64.powi(k)).collect();
    let (mut full, mut dir): (f64, f64) = (0.0, 0.0);
    for d in 1..=4 {
        let f = FluxModel::burgers(d)?;
        let mut table = Vec::new();
        for &h in &hs {
            let mut best: f64 = 0.0;
            for k in 0..d {
                let mut a = vec![0.0; d];
                a[k] = 1.0;
                best = best.max(decompose_improved(&f, 0.0, h, &a)?.bound_ratio);
            }
            table.push(best);
        }
        full = full.max(max_over_min(table));
        for ell in 1..=d {
            dir = dir.max(max_over_min(directional_gain(&f, 0.0, &hs, ell)?.iter().map(|r| r.product)));
        }
    }
    Ok((full <= 10.0 && dir <= 10.0, format!("table spread {full:.3}, directional spread {dir:.3}")))
}

fn exponents(seed: u64) -> Result<(bool, String)> {
    let deltas = log_grid(1e-4, 1e-1, 13);
    let mut pass = true;
    let mut out = Vec::new();
    for d in 1..=3 {
        let r = FluxModel::burgers(d)?.fit_alpha(64 * d, &deltas, seed)?;
        pass &= !r.inconclusive && (r.alpha - 1.0 / d as f64).abs() <= 0.05;
        out.push(format!("{:.4}", r.alpha));
    }
    Ok((pass, format!("alpha = {}", out.join(", "))))
}

fn fixed_points() -> Result<(bool, String)> {
    let mut pass = true;
    for d in 1..=4 {
        for alpha in [1.0, 0.5, 1.0 / d as f64] {
            let s = bootstrap_iterate(d, alpha, 1e-13, Variant::AlphaNonlinear, 1.0)?;
            pass &= s.converged && (s.limit - alpha / (2.0 * d as f64)).abs() <= 1e-12;
        }
        let s = bootstrap_iterate(d, 1.0, 1e-13, Variant::Nondegenerate, 1.0)?;
        pass &= s.converged && (s.limit - 1.0 / (2.0 * d as f64)).abs() <= 1e-12;
    }
    let b = bootstrap_iterate(1, 1.0, 1e-15, Variant::Burgers1d, 1.0)?;
    let closed = b
        .rows()
        .filter(|r| r.0 <= 40)
        .map(|(n, g, _)| (g - 0.5 * (1.0 - 3f64.powi(-(n as i32)))).abs())
        .fold(0.0, f64::max);
    let a = bootstrap_iterate(2, 0.5, 1e-13, Variant::AlphaNonlinear, 1.0)?.limit;
    let n = bootstrap_iterate(2, 1.0, 1e-13, Variant::Nondegenerate, 1.0)?.limit;
    pass &= b.converged && closed <= 1e-14 && (a - 0.125).abs() <= 1e-12 && (n - 0.25).abs() <= 1e-12;
    Ok((pass, format!("closed-form error {closed:.1e}, limits {a:.14} and {n:.14}")))
}

fn calibration() -> Result<(bool, String)> {
    let n = 1 << 16;
    let grid = GridSpec::uniform(1, n, 1.0);
    let radii = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002];
    let mut pass = true;
    let mut out = Vec::new();
    for gamma in [0.25, 0.5, 0.75] {
        let s = manufactured(&Manufactured::HolderProfile { gamma, x0: vec![0.5] }, &grid, &[0.0])?;
        let g = oscillation_profile(&s, 0, &[0.5], &radii, Geometry::Ball)?.gamma.unwrap_or(f64::NAN);
        pass &= (g - gamma).abs() <= 0.05;
        out.push(format!("{g:.4}"));
    }
    let step = GridSolution::from_fn(&grid, &[0.0], |_, x| if x[0] > 0.5 { 1.0 } else { 0.0 })?;
    let mut dev: f64 = 0.0;
    for &r in &radii {
        dev = dev.max((h_r(&step, 0, &[0.5], r, Geometry::Ball)? - 0.5).abs());
    }
    pass &= dev <= 1.0 / n as f64;
    Ok((pass, format!("fitted exponents {}, step deviation {dev:.1e}", out.join(", "))))
}

fn sine(mean: f64, amplitude: f64) -> InitialData {
    InitialData::Fourier { mean, modes: vec![Mode { amplitude, wavevector: vec![1.0], phase: 0.0 }] }
}

fn transport(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let n = 1 << 14;
    let g = 0.1;
    let times: Vec<f64> = (0..=10).map(|k| 0.05 * k as f64).collect();
    let sol = manufactured(&Manufactured::Characteristics { initial: sine(0.4, 0.15), source: g }, &GridSpec::uniform(1, n, 1.0), &times)?;
    let flux = FluxModel::burgers(1)?;
    let mut passed = 0;
    for _ in 0..10 {
        let t0 = rng.random_range(0..6usize);
        let t1 = rng.random_range(t0 + 1..=10);
        let kbox = KineticBox {
            center: vec![rng.random_range(0.0..1.0)],
            radius: rng.random_range(0.01..0.1),
            v_lower: rng.random_range(0.2..0.5),
            width: rng.random_range(0.02..0.2),
            time_shift: None,
        };
        passed += usize::from(verify_transport_estimate(&sol, &flux, &kbox, t0, times[t1] - times[t0], g)?.pass);
    }
    let field = KineticField::from_hypograph(&sol, 5, 256)?;
    let back = free_transport(&free_transport(&field, 0.3, &flux)?.field, -0.3, &flux)?.field;
    let err = back.l1_distance(&field)?;
    Ok((passed == 10 && err <= 2.0 / n as f64, format!("{passed}/10 rectangles, round trip {err:.2e}")))
}

fn burgers(d: usize, n: usize, initial: InitialData, source: Source, t: f64) -> SolverConfig {
    SolverConfig {
        flux: FluxSpec::BurgersFamily { d },
        source,
        grid: GridSpec::uniform(d, n, 1.0),
        cfl: 0.8,
        final_time: t,
        output_times: vec![],
        initial,
    }
}

fn l1(a: &GridSolution, b: &GridSolution) -> f64 {
    let cell = a.dx().powi(a.dim() as i32);
    a.slice(1).unwrap_or_default().iter().zip(b.slice(1).unwrap_or_default()).map(|(x, y)| (x - y).abs()).sum::<f64>() * cell
}

fn solver() -> Result<(bool, String)> {
    let t = 0.5;
    let mms = |n: usize| -> Result<f64> {
        let s = solve(&burgers(1, n, sine(0.5, 0.25), Source::SineAdvect { mean: 0.5, amplitude: 0.25 }, t))?;
        let exact = manufactured(&Manufactured::SineAdvect { mean: 0.5, amplitude: 0.25 }, &GridSpec::uniform(1, n, 1.0), &[0.0, t])?;
        Ok(l1(&s, &exact))
    };
    let order1 = (mms(1 << 10)? / mms(1 << 12)?).log2() / 2.0;
    let init = InitialData::Fourier {
        mean: 0.5,
        modes: vec![
            Mode { amplitude: 0.15, wavevector: vec![1.0, 0.0], phase: 0.0 },
            Mode { amplitude: 0.1, wavevector: vec![0.0, 1.0], phase: 0.0 },
        ],
    };
    let t2 = 0.25;
    let err2 = |n: usize| -> Result<(f64, GridSolution)> {
        let s = solve(&burgers(2, n, init.clone(), Source::Zero, t2))?;
        let exact = manufactured(&Manufactured::Characteristics { initial: init.clone(), source: 0.0 }, &GridSpec::uniform(2, n, 1.0), &[0.0, t2])?;
        Ok((l1(&s, &exact), s))
    };
    let ((e64, _), (e128, s)) = (err2(64)?, err2(128)?);
    let order2 = (e64 / e128).log2();
    let mean = |k: usize| s.slice(k).map(|u| u.iter().sum::<f64>() / u.len() as f64).unwrap_or(f64::NAN);
    let drift = (mean(1) - mean(0)).abs();
    let s0 = s.slice(0)?;
    let (lo, hi) = s0.iter().fold((1.0f64, 0.0f64), |(a, b), &u| (a.min(u), b.max(u)));
    let excess = s.slice(1)?.iter().map(|&u| (lo - u).max(u - hi)).fold(0.0, f64::max);
    let pass = order1 >= 0.8 && order2 >= 0.7 && drift <= 1e-12 && excess <= 1e-12;
    Ok((pass, format!("orders {order1:.3} (1D), {order2:.3} (2D); drift {drift:.1e}; excess {excess:.1e}")))
}

fn exponent_bound(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let (mut checked, mut below) = (0, 0);
    let g1 = bootstrap_iterate(1, 1.0, 1e-13, Variant::Burgers1d, 0.05)?.limit;
    let mut init = sine(0.45, 0.2);
    if let InitialData::Fourier { modes, .. } = &mut init {
        modes[0].phase = 0.3;
    }
    let s1 = solve(&burgers(1, 1 << 12, init, Source::Constant { value: 0.05 }, 0.4))?;
    let c1: Vec<Vec<f64>> = (0..16).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
    for p in oscillation_profiles(&s1, 1, &c1, &[0.2, 0.1, 0.05, 0.02, 0.01, 0.005], Geometry::Ball)? {
        if let Some(g) = p.gamma {
            checked += 1;
            below += usize::from(g < g1 - 0.1);
        }
    }
    let g2 = bootstrap_iterate(2, 1.0, 1e-13, Variant::Nondegenerate, 0.05)?.limit;
    let init = InitialData::Fourier {
        mean: 0.45,
        modes: vec![
            Mode { amplitude: 0.2, wavevector: vec![1.0, 0.0], phase: 0.0 },
            Mode { amplitude: 0.15, wavevector: vec![0.0, 1.0], phase: 1.0 },
        ],
    };
    let s2 = solve(&burgers(2, 512, init, Source::Constant { value: 0.05 }, 0.2))?;
    let c2: Vec<Vec<f64>> = (0..16).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    for p in oscillation_profiles(&s2, 1, &c2, &[0.25, 0.12, 0.06, 0.03, 0.015, 0.0078], Geometry::Cube)? {
        if let Some(g) = p.gamma {
            checked += 1;
            below += usize::from(g < g2 - 0.1);
        }
    }
    Ok((checked >= 20 && below == 0, format!("{checked} conclusive centers, {below} below the bound")))
}

/// Run every check; a check that errors counts as failed.
pub fn run_all(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut record = |name: &'static str, f: &mut dyn FnMut() -> Result<(bool, String)>| {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        log::info!("{name}: {}", if pass { "pass" } else { "FAIL" });
        out.push(Check { name, pass, detail, seconds: start.elapsed().as_secs_f64() });
    };
    record("node_matrices", &mut node_matrices);
    record("burgers_coefficients", &mut || coefficients(&mut rng));
    record("norm_certification", &mut certification);
    record("nonlinearity_exponents", &mut || exponents(seed));
    record("bootstrap_fixed_points", &mut fixed_points);
    record("oscillation_calibration", &mut calibration);
    record("transport_estimate", &mut || transport(&mut rng));
    record("solver_correctness", &mut solver);
    record("exponent_lower_bound", &mut || exponent_bound(&mut rng));
    out
}
