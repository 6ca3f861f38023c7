//! Mellin convolutions on a logarithmic grid, directly and through Z_beta.

use super::fourier::apply_symbol;
use super::grid::{rel_residual, Axis, GridFunction};
use super::identities::{Identity, IdentityCheckResult};
use crate::error::{Error, Result};
use crate::kernel::{is_positive_real, require_admissible, MeromorphicKernel};
use crate::mellin::mellin_symbol;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

/// Default log window x = ln t in [-20, 20).
pub const LOG_WINDOW: f64 = 20.0;
/// Zero padding factor of the Z_beta path.
const PAD: usize = 8;

pub fn log_grid_function(n: usize, f: impl Fn(f64) -> C64) -> Result<GridFunction> {
    GridFunction::from_fn(n, -LOG_WINDOW, LOG_WINDOW, Axis::LogHalfline, |x| f(x.exp()))
}

fn require_log(f: &GridFunction) -> Result<()> {
    if f.axis != Axis::LogHalfline {
        return Err(Error::InvalidParameter("Mellin convolution acts on a log_halfline grid".into()));
    }
    Ok(())
}

/// Linear convolution c_i = sum_j a_{i-j} b_j for i < n, with a indexed
/// from -(n-1) at position 0.
fn convolve(kd: &[C64], b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let m = (4 * n).next_power_of_two();
    let mut pa = vec![C64::new(0.0, 0.0); m];
    let mut pb = vec![C64::new(0.0, 0.0); m];
    pa[..kd.len()].copy_from_slice(kd);
    pb[..n].copy_from_slice(b);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    fwd.process(&mut pa);
    fwd.process(&mut pb);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= *y / m as f64;
    }
    inv.process(&mut pa);
    pa[n - 1..2 * n - 1].to_vec()
}

/// Trapezoid rule for int K(e^{x - y}) phi(e^y) dy on the grid. Positive-real
/// poles need ln c on the grid; they are taken as principal values by the
/// punctured sum plus the h R'(a) correction of the missing node.
pub fn apply_mellin_kernel(f: &GridFunction, k: &MeromorphicKernel) -> Result<GridFunction> {
    require_log(f)?;
    require_admissible(k)?;
    let n = f.n;
    let h = f.h();
    let mut singular: Vec<(i64, C64, C64)> = Vec::new();
    let mut regular = MeromorphicKernel::empty();
    for t in &k.terms {
        if is_positive_real(t.c) {
            let d0 = t.c.re.ln() / h;
            if (d0 - d0.round()).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "ln c = {} is not a multiple of the grid step {h}",
                    t.c.re.ln()
                )));
            }
            singular.push((d0.round() as i64, t.c, t.d));
        } else {
            regular.push(*t);
        }
    }
    let kd: Vec<C64> = (0..2 * n - 1)
        .map(|idx| {
            let d = idx as i64 - (n as i64 - 1);
            let t = (d as f64 * h).exp();
            let mut v = regular.eval_complex(C64::new(t, 0.0));
            for &(d0, c, dd) in &singular {
                if d != d0 {
                    v += dd / (C64::new(t, 0.0) - c);
                }
            }
            v * h
        })
        .collect();
    let mut out = convolve(&kd, &f.samples);
    if !singular.is_empty() {
        let dphi: Vec<C64> = (0..n)
            .map(|j| {
                let lo = f.samples[j.saturating_sub(1)];
                let hi = f.samples[(j + 1).min(n - 1)];
                let span = ((j + 1).min(n - 1) - j.saturating_sub(1)) as f64 * h;
                (hi - lo) / span
            })
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            for &(d0, c, dd) in &singular {
                let j = i as i64 - d0;
                if j >= 0 && (j as usize) < n {
                    let j = j as usize;
                    *o += -h * dd / c * (0.5 * f.samples[j] + dphi[j]);
                }
            }
        }
    }
    Ok(f.with_samples(out))
}

/// e^{-beta x} W e^{beta x} phi with the symbol of k, evaluated by zero-padded FFT.
pub fn apply_mellin_kernel_zbeta(f: &GridFunction, k: &MeromorphicKernel, beta: f64) -> Result<GridFunction> {
    require_log(f)?;
    require_admissible(k)?;
    let n = f.n;
    let h = f.h();
    let mut padded = vec![C64::new(0.0, 0.0); PAD * n];
    for j in 0..n {
        padded[j] = f.samples[j] * (beta * f.coord(j)).exp();
    }
    let g = GridFunction::new(padded, f.t_min, f.t_min + (PAD * n) as f64 * h, Axis::LinearFullline)?;
    let mut err = None;
    let w = apply_symbol(&g, |x| match mellin_symbol(k, beta, -x) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let out = (0..n).map(|j| w.samples[j] * (-beta * f.coord(j)).exp()).collect();
    Ok(f.with_samples(out))
}

/// Relative L2 distance (in x) between the direct and Z_beta paths.
pub fn check_zbeta(k: &MeromorphicKernel, beta: f64, f: &GridFunction) -> Result<IdentityCheckResult> {
    let a = apply_mellin_kernel(f, k)?;
    let b = apply_mellin_kernel_zbeta(f, k, beta)?;
    Ok(IdentityCheckResult {
        identity: Identity::MellinVsZbeta,
        rel_residual: rel_residual(&a.samples, &b.samples, |_| true),
        grid: f.meta(),
        remainder_norm: None,
    })
}

/// (int |phi(t)|^p t^gamma dt)^{1/p} for samples on a log grid.
pub fn weighted_norm(f: &GridFunction, p: f64, gamma: f64) -> f64 {
    let h = f.h();
    let s: f64 = (0..f.n)
        .map(|j| f.samples[j].norm().powf(p) * ((1.0 + gamma) * f.coord(j)).exp())
        .sum();
    (h * s).powf(1.0 / p)
}
