//! Piecewise-linear reconstruction of a slice and exact integrals of
//! threshold functions of it over boxes.

use super::grid::GridSolution;
use crate::error::Result;

/// `(t)_+^n / n!`, with `F_0` the indicator of `t > 0`.
fn ramp(n: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mut v = 1.0;
    for k in 1..=n {
        v *= t / k as f64;
    }
    v
}

/// `∫_{[0,1]^k} F_n(c + a·s) ds` by repeated divided differences.
pub(crate) fn cube_ramp_integral(n: usize, c: f64, a: &[f64]) -> f64 {
    let spread: f64 = a.iter().map(|x| x.abs()).sum();
    let lo = c - a.iter().map(|x| (-x).max(0.0)).sum::<f64>();
    let hi = lo + spread;
    if hi <= 0.0 {
        return 0.0;
    }
    if lo > 0.0 {
        match n {
            0 => return 1.0,
            1 => return c + 0.5 * a.iter().sum::<f64>(),
            _ => {}
        }
    }
    let Some((&last, rest)) = a.split_last() else {
        return ramp(n, c);
    };
    if last.abs() <= 1e-6 * spread {
        return cube_ramp_integral(n, c + 0.5 * last, rest);
    }
    (cube_ramp_integral(n + 1, c + last, rest) - cube_ramp_integral(n + 1, c, rest)) / last
}

/// Monotonized-central limited slope.
fn mc_slope(left: f64, mid: f64, right: f64) -> f64 {
    let (dl, dr) = (mid - left, right - mid);
    if dl * dr <= 0.0 {
        return 0.0;
    }
    let s = dl.signum();
    s * (2.0 * dl.abs()).min(2.0 * dr.abs()).min(0.5 * (dl + dr).abs())
}

/// Limited slopes per axis; the reconstruction never leaves the range of the
/// neighbouring cell values, so it stays in `[0, 1]`.
pub struct Reconstruction<'a> {
    pub(crate) sol: &'a GridSolution,
    pub(crate) values: &'a [f64],
    /// `slopes[k][cell]` in units of u per unit length.
    pub(crate) slopes: Vec<Vec<f64>>,
}

impl<'a> Reconstruction<'a> {
    pub fn new(sol: &'a GridSolution, t_index: usize) -> Result<Self> {
        let values = sol.slice(t_index)?;
        let d = sol.dim();
        let shape = sol.shape();
        let mut strides = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * shape[k + 1];
        }
        let slopes = (0..d)
            .map(|k| {
                let (n, st) = (shape[k], strides[k]);
                (0..values.len())
                    .map(|lin| {
                        let i = (lin / st) % n;
                        let base = lin - i * st;
                        let l = base + ((i + n - 1) % n) * st;
                        let r = base + ((i + 1) % n) * st;
                        mc_slope(values[l], values[lin], values[r]) / sol.dx()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { sol, values, slopes })
    }

    /// Visit every (cell, sub-box) overlap of the box `[lo, hi]`; the closure
    /// receives the wrapped linear index, the sub-box volume, and the linear
    /// function on the unit cube `c0 + a·s` describing u there.
    pub(crate) fn for_each_piece(&self, lo: &[f64], hi: &[f64], mut visit: impl FnMut(usize, f64, f64, &[f64])) {
        let sol = self.sol;
        let d = sol.dim();
        let dx = sol.dx();
        let ranges: Vec<(i64, i64)> = (0..d)
            .map(|k| {
                let a = ((lo[k] - sol.lower()[k]) / dx).floor() as i64;
                let b = ((hi[k] - sol.lower()[k]) / dx).ceil() as i64;
                (a, b.max(a + 1))
            })
            .collect();
        let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        let mut a = vec![0.0; d];
        loop {
            let lin = sol.wrapped_index(&idx);
            let mut vol = 1.0;
            let mut c0 = self.values[lin];
            let mut empty = false;
            for k in 0..d {
                let cell_lo = sol.lower()[k] + idx[k] as f64 * dx;
                let center = cell_lo + 0.5 * dx;
                let s = lo[k].max(cell_lo);
                let e = hi[k].min(cell_lo + dx);
                if e <= s {
                    empty = true;
                    break;
                }
                vol *= e - s;
                let g = self.slopes[k][lin];
                c0 += g * (s - center);
                a[k] = g * (e - s);
            }
            if !empty {
                visit(lin, vol, c0, &a);
            }
            // odometer
            let mut k = d;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < ranges[k].1 {
                    break;
                }
                idx[k] = ranges[k].0;
            }
        }
    }

    /// `L^d({x in [lo, hi] : u(x) > level})`.
    pub fn superlevel_volume(&self, lo: &[f64], hi: &[f64], level: f64) -> f64 {
        let mut total = 0.0;
        self.for_each_piece(lo, hi, |_, vol, c0, a| total += vol * cube_ramp_integral(0, c0 - level, a));
        total
    }

    /// `∫_{[lo, hi]} clamp(u - level, 0, width) dx`.
    pub fn band_integral(&self, lo: &[f64], hi: &[f64], level: f64, width: f64) -> f64 {
        let mut total = 0.0;
        self.for_each_piece(lo, hi, |_, vol, c0, a| {
            total += vol * (cube_ramp_integral(1, c0 - level, a) - cube_ramp_integral(1, c0 - level - width, a));
        });
        total
    }

    /// `∫_{[lo, hi]} u dx`.
    pub fn integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let mut total = 0.0;
        self.for_each_piece(lo, hi, |_, vol, c0, a| total += vol * (c0 + 0.5 * a.iter().sum::<f64>()));
        total
    }

    /// Reconstructed value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let sol = self.sol;
        let dx = sol.dx();
        let idx: Vec<i64> = x.iter().zip(sol.lower()).map(|(xi, lo)| ((xi - lo) / dx).floor() as i64).collect();
        let lin = sol.wrapped_index(&idx);
        let mut u = self.values[lin];
        for k in 0..sol.dim() {
            let center = sol.lower()[k] + (idx[k] as f64 + 0.5) * dx;
            u += self.slopes[k][lin] * (x[k] - center);
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic_geometry::grid::GridSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // Midpoint-rule oracle on a fine lattice of the unit cube.
    fn brute(n: usize, c: f64, a: &[f64]) -> f64 {
        let m = 200usize;
        let k = a.len();
        let total = m.pow(k as u32);
        let mut sum = 0.0;
        for lin in 0..total {
            let mut rem = lin;
            let mut t = c;
            for ak in a {
                t += ak * ((rem % m) as f64 + 0.5) / m as f64;
                rem /= m;
            }
            sum += ramp(n, t);
        }
        sum / total as f64
    }

    #[test]
    fn ramp_integral_matches_quadrature() {
        let cases: [(usize, f64, &[f64]); 5] = [
            (0, -0.2, &[0.5]),
            (1, -0.2, &[0.5]),
            (0, -0.3, &[0.4, 0.2]),
            (1, 0.1, &[-0.4, 0.25]),
            (0, -0.1, &[0.2, -0.1, 0.3]),
        ];
        for (n, c, a) in cases {
            let m = if a.len() == 3 { 2e-3 } else { 1e-4 };
            assert_abs_diff_eq!(cube_ramp_integral(n, c, a), brute(n, c, a), epsilon = m);
        }
        assert_eq!(cube_ramp_integral(0, 0.5, &[0.1, -0.2]), 1.0);
        assert_eq!(cube_ramp_integral(1, -0.5, &[0.1, 0.2]), 0.0);
    }

    #[test]
    fn linear_profile_is_exact() {
        let g = GridSpec::uniform(1, 64, 1.0);
        let s = GridSolution::from_fn(&g, &[0.0], |_, x| 0.2 + 0.5 * x[0]).unwrap();
        let r = Reconstruction::new(&s, 0).unwrap();
        // interior cells recover the exact line
        assert_abs_diff_eq!(r.eval(&[0.4]), 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(r.integral(&[0.25], &[0.75]), 0.2 * 0.5 + 0.25 * (0.5625 - 0.0625), epsilon = 1e-14);
        // {0.2 + x/2 > 0.4} on (0.25, 0.75) is (0.4, 0.75)
        assert_abs_diff_eq!(r.superlevel_volume(&[0.25], &[0.75], 0.4), 0.35, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn ramp_monotone_in_offset(c in -1.0f64..1.0, dc in 0.0f64..0.5, a in prop::collection::vec(-1.0f64..1.0, 1..4)) {
            let lo = cube_ramp_integral(0, c, &a);
            let hi = cube_ramp_integral(0, c + dc, &a);
            prop_assert!(lo <= hi + 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&lo));
        }
    }
}
