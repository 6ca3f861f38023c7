//! Operator norm estimates for Mellin convolutions on L_p(R+, t^gamma).

use super::mellin_op::{apply_mellin_kernel, log_grid_function, weighted_norm};
use crate::error::Result;
use crate::kernel::{require_admissible, MeromorphicKernel, SpaceParams};
use crate::mellin::mellin_symbol;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const XI_MAX: f64 = 60.0;
const XI_STEP: f64 = 0.01;
const TRIAL_GRID: usize = 1 << 12;

/// sup over real xi of |symbol|: a scan of [-60, 60] followed by golden-section
/// refinement around the best sample.
pub fn symbol_sup(k: &MeromorphicKernel, beta: f64) -> Result<f64> {
    let f = |xi: f64| mellin_symbol(k, beta, xi).map(|v| v.norm());
    let steps = (2.0 * XI_MAX / XI_STEP).round() as usize;
    let (mut best_x, mut best) = (0.0, f(0.0)?);
    for j in 0..=steps {
        let x = -XI_MAX + j as f64 * XI_STEP;
        let v = f(x)?;
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_x - XI_STEP, best_x + XI_STEP);
    let mut x1 = b - invphi * (b - a);
    let mut x2 = a + invphi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(best.max(f1).max(f2))
}

/// At p = 2 the exact norm sup |symbol at beta|; otherwise the largest
/// Rayleigh quotient over `trials` random smooth trial functions.
pub fn estimate_operator_norm(k: &MeromorphicKernel, sp: &SpaceParams, trials: usize, seed: u64) -> Result<f64> {
    require_admissible(k)?;
    if k.terms.is_empty() {
        return Ok(0.0);
    }
    if sp.p == 2.0 {
        return symbol_sup(k, sp.beta);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let bumps: Vec<(C64, f64, f64)> = (0..3)
            .map(|_| {
                let a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                (a, rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0))
            })
            .collect();
        let f = log_grid_function(TRIAL_GRID, |t| {
            let x = t.ln();
            bumps.iter().map(|&(a, mu, s)| a * (-((x - mu) / s).powi(2)).exp()).sum()
        })?;
        let g = apply_mellin_kernel(&f, k)?;
        let q = weighted_norm(&g, sp.p, sp.gamma_weight) / weighted_norm(&f, sp.p, sp.gamma_weight);
        best = best.max(q);
    }
    Ok(best)
}
