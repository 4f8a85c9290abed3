//! Dense univariate polynomials on an interval, with real-root isolation.

/// Coefficients in the monomial basis, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

const ROOT_TOL: f64 = 1e-12;

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        let c = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (i + 1) as f64)
            .collect();
        Polynomial::new(c)
    }

    pub fn nth_derivative(&self, k: usize) -> Polynomial {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
            .collect();
        Polynomial::new(c)
    }

    pub fn add_constant(&self, c: f64) -> Polynomial {
        let mut out = self.coeffs.clone();
        out[0] += c;
        Polynomial::new(out)
    }

    /// Real roots in `[a, b]`, sorted, located to within `1e-12`.
    ///
    /// Monotone pieces come from the roots of the derivative, so every sign
    /// change is bracketed and bisected. Identically zero input yields no roots.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if self.is_zero() || a > b {
            return Vec::new();
        }
        match self.degree() {
            0 => Vec::new(),
            1 => {
                let r = -self.coeffs[0] / self.coeffs[1];
                if r >= a && r <= b {
                    vec![r]
                } else {
                    Vec::new()
                }
            }
            _ => {
                let mut knots = vec![a];
                knots.extend(self.derivative().roots_in(a, b).into_iter().filter(|&c| c > a && c < b));
                knots.push(b);
                let mut roots: Vec<f64> = Vec::new();
                for w in knots.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let (plo, phi) = (self.eval(lo), self.eval(hi));
                    let r = if plo == 0.0 {
                        Some(lo)
                    } else if phi == 0.0 {
                        Some(hi)
                    } else if plo.signum() != phi.signum() {
                        Some(self.bisect(lo, hi, plo))
                    } else {
                        None
                    };
                    if let Some(r) = r {
                        if roots.last().is_none_or(|&last| (r - last).abs() > ROOT_TOL) {
                            roots.push(r);
                        }
                    }
                }
                roots
            }
        }
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, plo: f64) -> f64 {
        let slo = plo.signum();
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let pm = self.eval(mid);
            if pm == 0.0 {
                return mid;
            }
            if pm.signum() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lebesgue measure of `{x in [a, b] : |p(x)| < delta}`.
    pub fn sublevel_measure(&self, delta: f64, a: f64, b: f64) -> f64 {
        let mut knots = vec![a, b];
        knots.extend(self.add_constant(-delta).roots_in(a, b));
        knots.extend(self.add_constant(delta).roots_in(a, b));
        knots.sort_by(f64::total_cmp);
        knots
            .windows(2)
            .filter(|w| w[1] > w[0] && self.eval(0.5 * (w[0] + w[1])).abs() < delta)
            .map(|w| w[1] - w[0])
            .sum()
    }
}
