use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kinetic_geometry::GridSolution;

pub const MIN_PAIRS: usize = 1000;

/// `max |u(x) - u(y)| / |x - y|^γ` over sampled axis-aligned pairs with
/// dyadic separations `2^j Δx`. Anchors are stratified over the cells at
/// every scale, so `sample_pairs >= cells · scales` visits every cell.
pub fn empirical_holder(sol: &GridSolution, t_index: usize, gamma: f64, sample_pairs: usize, seed: u64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("Hölder exponent {gamma} not in (0, 1]")));
    }
    if sample_pairs < MIN_PAIRS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_PAIRS} pairs")));
    }
    let u = sol.slice(t_index)?;
    let d = sol.dim();
    let shape = sol.shape();
    let dx = sol.dx();
    let n = u.len();
    // (axis, log2 separation)
    let scales: Vec<(usize, u32)> = (0..d)
        .flat_map(|k| {
            let top = (shape[k] / 2).max(1).ilog2();
            (0..=top).map(move |j| (k, j))
        })
        .collect();
    let per_scale = sample_pairs.div_ceil(scales.len());
    let stratum = n as f64 / per_scale as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strides = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let mut best: f64 = 0.0;
    for &(k, j) in &scales {
        let sep = 1usize << j;
        let dist = (sep as f64 * dx).powf(gamma);
        for m in 0..per_scale {
            let lin = (((m as f64 + rng.random::<f64>()) * stratum) as usize).min(n - 1);
            let i = (lin / strides[k]) % shape[k];
            let shifted = if rng.random::<bool>() { (i + sep) % shape[k] } else { (i + shape[k] - sep % shape[k]) % shape[k] };
            let other = lin - i * strides[k] + shifted * strides[k];
            best = best.max((u[lin] - u[other]).abs() / dist);
        }
    }
    Ok(best)
}
