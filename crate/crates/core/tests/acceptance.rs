//! Acceptance criteria 1-9. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use holderlab::balance_solver::{manufactured, solve, InitialData, Manufactured, Mode, SolverConfig, Source};
use holderlab::flux_model::{log_grid, FluxModel, FluxSpec};
use holderlab::kinetic_geometry::{free_transport, verify_transport_estimate, Geometry, GridSolution, GridSpec, KineticBox, KineticField};
use holderlab::matrix_decomp::{build_h, decompose_improved, directional_gain, invert_h};
use holderlab::regularity_estimator::{bootstrap_iterate, h_r, oscillation_profile, oscillation_profiles, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

// ---------------------------------------------------------------- criterion 1

/// Printed coefficients: `H_d(h)[l][i] = num/den * h^(l+1)` and
/// `H_d^{-1}(h)[i][l] = num/den * h^-(l+1)`.
fn printed(d: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    match d {
        2 => (vec![vec![0.5, 1.0], vec![0.25, 1.0]], vec![vec![4.0, -4.0], vec![-1.0, 2.0]]),
        3 => (
            vec![vec![1.0 / 3.0, 2.0 / 3.0, 1.0], vec![1.0 / 9.0, 4.0 / 9.0, 1.0], vec![1.0 / 27.0, 8.0 / 27.0, 1.0]],
            vec![vec![9.0, -45.0 / 2.0, 27.0 / 2.0], vec![-9.0 / 2.0, 18.0, -27.0 / 2.0], vec![1.0, -9.0 / 2.0, 9.0 / 2.0]],
        ),
        4 => (
            vec![
                vec![0.25, 0.5, 0.75, 1.0],
                vec![1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0],
                vec![1.0 / 64.0, 1.0 / 8.0, 27.0 / 64.0, 1.0],
                vec![1.0 / 256.0, 1.0 / 16.0, 81.0 / 256.0, 1.0],
            ],
            vec![
                vec![16.0, -208.0 / 3.0, 96.0, -128.0 / 3.0],
                vec![-12.0, 76.0, -128.0, 64.0],
                vec![16.0 / 3.0, -112.0 / 3.0, 224.0 / 3.0, -128.0 / 3.0],
                vec![-1.0, 22.0 / 3.0, -16.0, 32.0 / 3.0],
            ],
        ),
        _ => unreachable!(),
    }
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let (hp, ip) = printed(d);
        for h in [1.0, 0.5] {
            let m = build_h(d, h).unwrap();
            let inv = invert_h(&m).unwrap();
            for a in 0..d {
                for b in 0..d {
                    // rows of H are powers, columns of H^{-1} scale as h^-(col+1)
                    worst = worst.max(rel_err(m.matrix[(a, b)], hp[a][b] * h.powi(a as i32 + 1)));
                    worst = worst.max(rel_err(inv[(a, b)], ip[a][b] / h.powi(b as i32 + 1)));
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max relative error {worst:.2e} (tol 1e-12)"))
}

// ---------------------------------------------------------------- criterion 2

fn closed_form(v: f64, h: f64, a: &[f64]) -> Vec<f64> {
    match a.len() {
        1 => vec![a[0] / h],
        2 => {
            let (ax, ay) = (a[0], a[1]);
            vec![(4.0 * (h + 2.0 * v) * ax - 4.0 * ay) / (h * h), (2.0 * ay - (h + 4.0 * v) * ax) / (h * h)]
        }
        3 => {
            let (ax, ay, az) = (a[0], a[1], a[2]);
            let h3 = 2.0 * h * h * h;
            vec![
                9.0 * ((2.0 * h * h + 10.0 * h * v + 9.0 * v * v) * ax - (5.0 * h + 9.0 * v) * ay + 3.0 * az) / h3,
                -9.0 * ((h * h + 8.0 * h * v + 9.0 * v * v) * ax - (4.0 * h + 9.0 * v) * ay + 3.0 * az) / h3,
                ((2.0 * h * h + 18.0 * h * v + 27.0 * v * v) * ax - 9.0 * (h + 3.0 * v) * ay + 9.0 * az) / h3,
            ]
        }
        _ => unreachable!(),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_res, mut worst_coef): (f64, f64) = (0.0, 0.0);
    for d in 1..=3 {
        let f = FluxModel::burgers(d).unwrap();
        for _ in 0..100 {
            let h = rng.random_range(0.05..1.0);
            let v = rng.random_range(0.0..1.0 - h);
            let a: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dec = decompose_improved(&f, v, h, &a).unwrap();
            let want = closed_form(v, h, &a);
            let scale = want.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            let diff = dec.coefficients.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst_res = worst_res.max(dec.residual);
            worst_coef = worst_coef.max(diff / scale);
        }
    }
    outcome(
        worst_res <= 1e-10 && worst_coef <= 1e-10,
        format!("300 samples: max residual {worst_res:.2e}, max coefficient mismatch {worst_coef:.2e} relative to |lambda| (tol 1e-10)"),
    )
}

// ---------------------------------------------------------------- criterion 3

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn criterion_3() -> Outcome {
    let hs: Vec<f64> = (0..=12).map(|k| 0.5f64.powi(k)).collect();
    let mut worst: f64 = 0.0;
    let mut worst_dir: f64 = 0.0;
    for d in 1..=4 {
        let f = FluxModel::burgers(d).unwrap();
        // sup over a of |lambda| h^d / |a|, estimated over the basis and fixed random directions
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut dirs: Vec<Vec<f64>> = (0..d).map(|k| (0..d).map(|j| f64::from(u8::from(j == k))).collect()).collect();
        dirs.extend((0..8).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()));
        let table: Vec<f64> = hs
            .iter()
            .map(|&h| dirs.iter().map(|a| decompose_improved(&f, 0.0, h, a).unwrap().bound_ratio).fold(0.0, f64::max))
            .collect();
        worst = worst.max(spread(&table));
        for ell in 1..=d {
            let rows = directional_gain(&f, 0.0, &hs, ell).unwrap();
            let p: Vec<f64> = rows.iter().map(|r| r.product).collect();
            worst_dir = worst_dir.max(spread(&p));
        }
    }
    outcome(
        worst <= 10.0 && worst_dir <= 10.0,
        format!("max/min of |lambda| h^d/|a|: {worst:.3}; of directional |lambda| h^l: {worst_dir:.3} (tol 10)"),
    )
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let deltas = log_grid(1e-4, 1e-1, 13);
    let mut alphas = Vec::new();
    let mut pass = true;
    for d in 1..=3 {
        let r = FluxModel::burgers(d).unwrap().fit_alpha(64 * d, &deltas, 4).unwrap();
        pass &= !r.inconclusive && (r.alpha - 1.0 / d as f64).abs() <= 0.05;
        alphas.push(format!("d={d}: {:.4}", r.alpha));
    }
    outcome(pass, format!("alpha {} (tol 0.05 around 1/d)", alphas.join(", ")))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for d in 1..=4 {
        for alpha in [1.0, 0.5, 1.0 / d as f64] {
            let s = bootstrap_iterate(d, alpha, 1e-13, Variant::AlphaNonlinear, 1.0).unwrap();
            pass &= s.gammas.len() <= 201 && (s.limit - alpha / (2.0 * d as f64)).abs() <= 1e-12;
        }
        let s = bootstrap_iterate(d, 1.0, 1e-13, Variant::Nondegenerate, 1.0).unwrap();
        pass &= s.gammas.len() <= 201 && (s.limit - 1.0 / (2.0 * d as f64)).abs() <= 1e-12;
    }
    let b = bootstrap_iterate(1, 1.0, 1e-15, Variant::Burgers1d, 1.0).unwrap();
    pass &= (b.limit - 0.5).abs() <= 1e-12 && b.gammas.len() <= 201;
    let closed = b
        .rows()
        .filter(|(n, _, _)| *n <= 40)
        .map(|(n, g, _)| (g - 0.5 * (1.0 - 3f64.powi(-(n as i32)))).abs())
        .fold(0.0, f64::max);
    pass &= closed <= 1e-14;
    notes.push(format!("closed-form mismatch {closed:.1e}"));
    let a = bootstrap_iterate(2, 0.5, 1e-13, Variant::AlphaNonlinear, 1.0).unwrap();
    let n = bootstrap_iterate(2, 1.0, 1e-13, Variant::Nondegenerate, 1.0).unwrap();
    pass &= (a.limit - 0.125).abs() <= 1e-12 && (n.limit - 0.25).abs() <= 1e-12;
    notes.push(format!("d=2 alpha=1/2 limit {:.15}, nondegenerate d=2 limit {:.15}", a.limit, n.limit));
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 6

fn line(n: usize, f: impl Fn(f64) -> f64) -> GridSolution {
    GridSolution::from_fn(&GridSpec::uniform(1, n, 1.0), &[0.0], |_, x| f(x[0])).unwrap()
}

fn criterion_6() -> Outcome {
    let n = 1 << 16;
    let dx = 1.0 / n as f64;
    let radii = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002];
    let mut pass = true;
    let mut notes = Vec::new();
    for gamma in [0.25, 0.5, 0.75] {
        let s = line(n, |x| (x - 0.5).abs().powf(gamma));
        let p = oscillation_profile(&s, 0, &[0.5], &radii, Geometry::Ball).unwrap();
        let g = p.gamma.unwrap_or(f64::NAN);
        pass &= (g - gamma).abs() <= 0.05;
        notes.push(format!("gamma {gamma}: {g:.4}"));
    }
    let step = line(n, |x| if x > 0.5 { 1.0 } else { 0.0 });
    let dev = radii
        .iter()
        .map(|&r| (h_r(&step, 0, &[0.5], r, Geometry::Ball).unwrap() - 0.5).abs())
        .fold(0.0, f64::max);
    pass &= dev <= dx;
    notes.push(format!("step |h_r - 1/2| max {dev:.1e} (tol dx = {dx:.1e})"));
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let n = 1 << 14;
    let dx = 1.0 / n as f64;
    let g = 0.1;
    let initial = InitialData::Fourier { mean: 0.4, modes: vec![Mode { amplitude: 0.15, wavevector: vec![1.0], phase: 0.0 }] };
    let times: Vec<f64> = (0..=10).map(|k| 0.05 * k as f64).collect();
    let grid = GridSpec::uniform(1, n, 1.0);
    let sol = manufactured(&Manufactured::Characteristics { initial, source: g }, &grid, &times).unwrap();
    let flux = FluxModel::burgers(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut passed = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..10 {
        let t0 = rng.random_range(0..6usize);
        let steps = rng.random_range(1..=(10 - t0));
        let kbox = KineticBox {
            center: vec![rng.random_range(0.0..1.0)],
            radius: rng.random_range(0.01..0.1),
            v_lower: rng.random_range(0.2..0.5),
            width: rng.random_range(0.02..0.2),
            time_shift: None,
        };
        let c = verify_transport_estimate(&sol, &flux, &kbox, t0, times[t0 + steps] - times[t0], g).unwrap();
        passed += usize::from(c.pass);
        worst_ratio = worst_ratio.max(c.lhs / (c.rhs * (1.0 + c.tolerance) + c.floor));
    }
    // free transport round trip of the hypograph at t = 0.25
    let field = KineticField::from_hypograph(&sol, 5, 256).unwrap();
    let fwd = free_transport(&field, 0.3, &flux).unwrap().field;
    let back = free_transport(&fwd, -0.3, &flux).unwrap().field;
    let round_trip = back.l1_distance(&field).unwrap();
    outcome(
        passed == 10 && round_trip <= 2.0 * dx,
        format!("{passed}/10 rectangles pass (max lhs/bound {worst_ratio:.3}); round trip {round_trip:.2e} (tol 2dx = {:.2e})", 2.0 * dx),
    )
}

// ---------------------------------------------------------------- criterion 8

fn burgers_config(d: usize, n: usize, initial: InitialData, source: Source, t: f64) -> SolverConfig {
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

fn l1_error(sol: &GridSolution, k: usize, exact: impl Fn(&[f64]) -> f64) -> f64 {
    let d = sol.dim();
    let n = sol.shape()[0];
    let cell = sol.dx().powi(d as i32);
    sol.slice(k)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(lin, u)| {
            let x: Vec<f64> = (0..d).map(|a| ((lin / n.pow((d - 1 - a) as u32)) % n) as f64 + 0.5).map(|i| i * sol.dx()).collect();
            (u - exact(&x)).abs() * cell
        })
        .sum()
}

/// Newton on `w = u0(x - t f'(w))` for `f' = (w, w^2)`.
fn characteristics_2d(x: &[f64], t: f64) -> f64 {
    let u0 = |p: f64, q: f64| 0.5 + 0.15 * (2.0 * PI * p).sin() + 0.1 * (2.0 * PI * q).sin();
    let grad = |p: f64, q: f64| (0.3 * PI * (2.0 * PI * p).cos(), 0.2 * PI * (2.0 * PI * q).cos());
    let mut w = u0(x[0], x[1]);
    for _ in 0..60 {
        let (p, q) = (x[0] - t * w, x[1] - t * w * w);
        let (gx, gy) = grad(p, q);
        let r = w - u0(p, q);
        w -= r / (1.0 + t * gx + 2.0 * t * w * gy);
    }
    w
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    // manufactured travelling sine
    let t = 0.5;
    let mms = |n: usize| {
        let c = burgers_config(1, n, InitialData::Fourier { mean: 0.5, modes: vec![Mode { amplitude: 0.25, wavevector: vec![1.0], phase: 0.0 }] }, Source::SineAdvect { mean: 0.5, amplitude: 0.25 }, t);
        let s = solve(&c).unwrap();
        l1_error(&s, 1, |x| 0.5 + 0.25 * (2.0 * PI * (x[0] - t)).sin())
    };
    let (e1, e2) = (mms(1 << 10), mms(1 << 12));
    let order_1d = (e1 / e2).log2() / 2.0;
    notes.push(format!("1D order {order_1d:.3}"));
    // two-dimensional smooth data against characteristics
    let t2 = 0.25;
    let init2 = InitialData::Fourier {
        mean: 0.5,
        modes: vec![
            Mode { amplitude: 0.15, wavevector: vec![1.0, 0.0], phase: 0.0 },
            Mode { amplitude: 0.1, wavevector: vec![0.0, 1.0], phase: 0.0 },
        ],
    };
    let run2 = |n: usize| solve(&burgers_config(2, n, init2.clone(), Source::Zero, t2)).unwrap();
    let (s64, s128) = (run2(64), run2(128));
    let (f1, f2) = (l1_error(&s64, 1, |x| characteristics_2d(x, t2)), l1_error(&s128, 1, |x| characteristics_2d(x, t2)));
    let order_2d = (f1 / f2).log2();
    notes.push(format!("2D order {order_2d:.3}"));
    // invariants
    let mean = |s: &GridSolution, k: usize| s.slice(k).unwrap().iter().sum::<f64>() / s.n_cells() as f64;
    let drift = (mean(&s128, 1) - mean(&s128, 0)).abs();
    let (lo0, hi0) = s128.slice(0).unwrap().iter().fold((1.0f64, 0.0f64), |(a, b), &u| (a.min(u), b.max(u)));
    let escape = s128.slice(1).unwrap().iter().map(|&u| (lo0 - u).max(u - hi0)).fold(0.0, f64::max);
    let src = burgers_config(1, 512, InitialData::Fourier { mean: 0.4, modes: vec![Mode { amplitude: 0.15, wavevector: vec![1.0], phase: 0.0 }] }, Source::Constant { value: 0.1 }, 0.5);
    let s = solve(&src).unwrap();
    let (lo, hi) = (0.25 - 0.05, 0.55 + 0.05);
    let escape_src = s.slice(1).unwrap().iter().map(|&u| (lo - u).max(u - hi)).fold(0.0, f64::max);
    notes.push(format!("mean drift {drift:.1e}, max-principle excess {:.1e}", escape.max(escape_src)));
    outcome(order_1d >= 0.8 && order_2d >= 0.7 && drift <= 1e-12 && escape.max(escape_src) <= 1e-12, notes.join("; "))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    let mut failures = 0;
    let mut inconclusive = 0;
    let mut min_margin = f64::INFINITY;
    // one dimension, gamma_bar = 1/2
    let gbar_1d = bootstrap_iterate(1, 1.0, 1e-13, Variant::Burgers1d, 0.05).unwrap().limit;
    let c1 = burgers_config(1, 1 << 12, InitialData::Fourier { mean: 0.45, modes: vec![Mode { amplitude: 0.2, wavevector: vec![1.0], phase: 0.3 }] }, Source::Constant { value: 0.05 }, 0.4);
    let s1 = solve(&c1).unwrap();
    let centers: Vec<Vec<f64>> = (0..16).map(|_| vec![rng.random_range(0.0..1.0)]).collect();
    let radii = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005];
    for p in oscillation_profiles(&s1, 1, &centers, &radii, Geometry::Ball).unwrap() {
        match p.gamma {
            Some(g) => {
                checked += 1;
                failures += usize::from(g < gbar_1d - 0.1);
                min_margin = min_margin.min(g - (gbar_1d - 0.1));
            }
            None => inconclusive += 1,
        }
    }
    // two dimensions, nondegenerate flux, gamma_bar = 1/4
    let gbar_2d = bootstrap_iterate(2, 1.0, 1e-13, Variant::Nondegenerate, 0.05).unwrap().limit;
    let init = InitialData::Fourier {
        mean: 0.45,
        modes: vec![
            Mode { amplitude: 0.2, wavevector: vec![1.0, 0.0], phase: 0.0 },
            Mode { amplitude: 0.15, wavevector: vec![0.0, 1.0], phase: 1.0 },
        ],
    };
    let s2 = solve(&burgers_config(2, 512, init, Source::Constant { value: 0.05 }, 0.2)).unwrap();
    let centers: Vec<Vec<f64>> = (0..16).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    let radii = [0.25, 0.12, 0.06, 0.03, 0.015, 0.0078];
    for p in oscillation_profiles(&s2, 1, &centers, &radii, Geometry::Cube).unwrap() {
        match p.gamma {
            Some(g) => {
                checked += 1;
                failures += usize::from(g < gbar_2d - 0.1);
                min_margin = min_margin.min(g - (gbar_2d - 0.1));
            }
            None => inconclusive += 1,
        }
    }
    outcome(
        checked >= 20 && failures == 0,
        format!("{checked} conclusive centers ({inconclusive} inconclusive), {failures} below gamma_bar - 0.1, min margin {min_margin:.3}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("node matrices H_d and inverses", criterion_1, Duration::from_secs(1)),
        ("closed-form decomposition coefficients", criterion_2, Duration::from_secs(1)),
        ("norm-bound certification", criterion_3, Duration::from_secs(10)),
        ("nonlinearity exponents", criterion_4, Duration::from_secs(30)),
        ("bootstrap fixed points", criterion_5, Duration::from_secs(1)),
        ("oscillation estimator calibration", criterion_6, Duration::from_secs(30)),
        ("transport estimate", criterion_7, Duration::from_secs(60)),
        ("solver correctness", criterion_8, Duration::from_secs(300)),
        ("exponent lower bound on solver output", criterion_9, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.pass && took <= *budget;
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} | {name}: {} | {:.2}s (budget {}s)",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
