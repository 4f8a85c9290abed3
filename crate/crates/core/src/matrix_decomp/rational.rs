//! Exact rational arithmetic for the node matrix at unit length.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type RatMatrix = Vec<Vec<BigRational>>;

/// Largest dimension handled by the exact path.
pub const EXACT_MAX_DIM: usize = 6;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `H_d(1)` with entries `(i/d)^l`, rows l = 1..d, columns i = 1..d.
pub fn node_matrix_unit(d: usize) -> RatMatrix {
    (1..=d)
        .map(|l| (1..=d).map(|i| num_traits::pow(rat(i as i64, d as i64), l)).collect())
        .collect()
}

/// Determinant by fraction elimination with row pivoting on nonzero entries.
pub fn determinant(m: &RatMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

fn minor(m: &RatMatrix, skip_r: usize, skip_c: usize) -> RatMatrix {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != skip_r)
        .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != skip_c).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Inverse as adjugate over determinant; `None` when singular.
pub fn inverse_adjugate(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let det = determinant(m);
    if det.is_zero() {
        return None;
    }
    if n == 1 {
        return Some(vec![vec![BigRational::one() / &m[0][0]]]);
    }
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            let cof = determinant(&minor(m, r, c));
            let signed = if (r + c) % 2 == 0 { cof } else { -cof };
            // adj = transpose of cofactors
            inv[c][r] = signed / &det;
        }
    }
    Some(inv)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` or `p` rendering, e.g. `-45/2`.
pub fn render(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `det[i^l]_{l,i=1..d}` computed exactly.
pub fn integer_vandermonde_det(d: usize) -> BigInt {
    let m: RatMatrix = (1..=d)
        .map(|l| (1..=d).map(|i| BigRational::from_integer(BigInt::from(i).pow(l as u32))).collect())
        .collect();
    let det = determinant(&m);
    debug_assert!(det.denom().is_one());
    if det.is_negative() {
        -det.to_integer()
    } else {
        det.to_integer()
    }
}
