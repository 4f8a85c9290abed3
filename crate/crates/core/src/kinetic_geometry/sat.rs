//! Summed-area tables for O(2^d) box integrals of the reconstruction.

use super::recon::Reconstruction;

pub struct BoxIntegrator<'a> {
    recon: &'a Reconstruction<'a>,
    /// Prefix sums of cell values, then of each slope field.
    tables: Vec<Vec<f64>>,
    dims: Vec<usize>,
}

struct Segment {
    pieces: Vec<(usize, usize)>,
    width: f64,
    offset: f64,
}

fn wrap_range(s: i64, e: i64, n: usize) -> Vec<(usize, usize)> {
    let n = n as i64;
    if e - s >= n {
        return vec![(0, n as usize)];
    }
    let a = s.rem_euclid(n);
    let b = a + (e - s);
    if b <= n {
        vec![(a as usize, b as usize)]
    } else {
        vec![(a as usize, n as usize), (0, (b - n) as usize)]
    }
}

impl<'a> BoxIntegrator<'a> {
    pub fn new(recon: &'a Reconstruction<'a>) -> Self {
        let shape = recon.sol.shape().to_vec();
        let d = shape.len();
        let dims: Vec<usize> = shape.iter().map(|n| n + 1).collect();
        let mut tables = Vec::with_capacity(d + 1);
        let fields = std::iter::once(recon.values).chain(recon.slopes.iter().map(|s| s.as_slice()));
        for field in fields {
            let total: usize = dims.iter().product();
            let mut p = vec![0.0; total];
            // scatter the field into the shifted table, then accumulate axis by axis
            let mut idx = vec![0usize; d];
            for &v in field.iter() {
                let lin = idx.iter().zip(&dims).fold(0, |acc, (i, m)| acc * m + i + 1);
                p[lin] = v;
                for k in (0..d).rev() {
                    idx[k] += 1;
                    if idx[k] < shape[k] {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            let mut stride = 1;
            for k in (0..d).rev() {
                for lin in 0..total {
                    if (lin / stride) % dims[k] != 0 {
                        p[lin] += p[lin - stride];
                    }
                }
                stride *= dims[k];
            }
            tables.push(p);
        }
        Self { recon, tables, dims }
    }

    fn range_sum(&self, table: usize, ranges: &[(usize, usize)]) -> f64 {
        let d = ranges.len();
        let p = &self.tables[table];
        let mut sum = 0.0;
        for corner in 0..(1usize << d) {
            let mut lin = 0;
            let mut sign = 1.0;
            for k in 0..d {
                let hi = corner >> k & 1 == 1;
                let i = if hi { ranges[k].1 } else { ranges[k].0 };
                if !hi {
                    sign = -sign;
                }
                lin = lin * self.dims[k] + i;
            }
            sum += sign * p[lin];
        }
        sum
    }

    /// `∫_{[lo, hi]} u dx` over a box no wider than the domain.
    pub fn integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let sol = self.recon.sol;
        let d = sol.dim();
        let dx = sol.dx();
        let segments: Vec<Vec<Segment>> = (0..d)
            .map(|k| {
                let n = sol.shape()[k];
                let x0 = sol.lower()[k];
                let a = ((lo[k] - x0) / dx).floor() as i64;
                let b = (((hi[k] - x0) / dx).ceil() as i64 - 1).max(a);
                let cell = |i: i64| x0 + i as f64 * dx;
                let part = |i: i64| {
                    let s = lo[k].max(cell(i));
                    let e = hi[k].min(cell(i + 1));
                    Segment {
                        pieces: wrap_range(i, i + 1, n),
                        width: (e - s).max(0.0),
                        offset: 0.5 * (s + e) - (cell(i) + 0.5 * dx),
                    }
                };
                let mut segs = vec![part(a)];
                if b > a {
                    if b > a + 1 {
                        segs.push(Segment { pieces: wrap_range(a + 1, b, n), width: dx, offset: 0.0 });
                    }
                    segs.push(part(b));
                }
                segs
            })
            .collect();

        let mut total = 0.0;
        let mut choice = vec![0usize; d];
        loop {
            let segs: Vec<&Segment> = (0..d).map(|k| &segments[k][choice[k]]).collect();
            let weight: f64 = segs.iter().map(|s| s.width).product();
            if weight > 0.0 {
                // all combinations of wrapped pieces
                let mut pc = vec![0usize; d];
                loop {
                    let ranges: Vec<(usize, usize)> = (0..d).map(|k| segs[k].pieces[pc[k]]).collect();
                    let mut v = self.range_sum(0, &ranges);
                    for k in 0..d {
                        if segs[k].offset != 0.0 {
                            v += segs[k].offset * self.range_sum(k + 1, &ranges);
                        }
                    }
                    total += weight * v;
                    if !advance(&mut pc, |k| segs[k].pieces.len()) {
                        break;
                    }
                }
            }
            if !advance(&mut choice, |k| segments[k].len()) {
                break;
            }
        }
        total
    }

    /// Average of u over the cube `Q_r(y)`.
    pub fn cube_average(&self, y: &[f64], r: f64) -> f64 {
        let lo: Vec<f64> = y.iter().map(|c| c - r).collect();
        let hi: Vec<f64> = y.iter().map(|c| c + r).collect();
        self.integral(&lo, &hi) / (2.0 * r).powi(y.len() as i32)
    }
}

fn advance(counter: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for k in (0..counter.len()).rev() {
        counter[k] += 1;
        if counter[k] < len(k) {
            return true;
        }
        counter[k] = 0;
    }
    false
}
