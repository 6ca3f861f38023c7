//! FFT Fourier multipliers, Bessel potentials and the Fourier image of the
//! Mellin convolutions K^m_c, with F phi(xi) = int e^{i xi x} phi(x) dx.

use super::grid::{Axis, GridFunction};
use crate::error::{Error, Result};
use crate::multiplier::Multiplier;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative size allowed at the window ends.
pub const LEAKAGE_TOL: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(n)
        } else {
            p.plan_fft_inverse(n)
        }
    })
}

/// Signed frequencies 2 pi k/(n h).
pub fn xi_grid(n: usize, h: f64) -> Vec<f64> {
    let dxi = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|k| if k < n / 2 { k as f64 * dxi } else { (k as f64 - n as f64) * dxi })
        .collect()
}

/// Samples of F f at the dual grid (trapezoid).
pub fn spectrum(f: &GridFunction) -> Vec<C64> {
    let h = f.h();
    let mut buf = f.samples.clone();
    plan(f.n, false).process(&mut buf);
    let xi = xi_grid(f.n, h);
    buf.iter().zip(&xi).map(|(v, &x)| *v * h * (I * x * f.t_min).exp()).collect()
}

/// Inverse of [`spectrum`] onto the grid of `like`.
pub fn from_spectrum(spec: &[C64], like: &GridFunction) -> GridFunction {
    let h = like.h();
    let n = like.n;
    let xi = xi_grid(n, h);
    let mut buf: Vec<C64> = spec.iter().zip(&xi).map(|(v, &x)| *v * (-I * x * like.t_min).exp()).collect();
    plan(n, true).process(&mut buf);
    let scale = 1.0 / (n as f64 * h);
    like.with_samples(buf.into_iter().map(|v| v * scale).collect())
}

pub fn check_window(f: &GridFunction) -> Result<()> {
    let sup = f.sup();
    let ends = f.samples[0].norm().max(f.samples[f.n - 1].norm());
    if sup > 0.0 && ends > LEAKAGE_TOL * sup {
        return Err(Error::WindowLeakage(ends / sup));
    }
    Ok(())
}

/// W_a f for a multiplier given pointwise, no window checks.
pub fn apply_symbol(f: &GridFunction, mut a: impl FnMut(f64) -> C64) -> GridFunction {
    let h = f.h();
    let mut buf = f.samples.clone();
    plan(f.n, false).process(&mut buf);
    for (v, x) in buf.iter_mut().zip(xi_grid(f.n, h)) {
        *v *= a(x);
    }
    plan(f.n, true).process(&mut buf);
    let scale = 1.0 / f.n as f64;
    f.with_samples(buf.into_iter().map(|v| v * scale).collect())
}

pub fn apply_fourier_multiplier(f: &GridFunction, a: &Multiplier) -> Result<GridFunction> {
    if f.axis != Axis::LinearFullline {
        return Err(Error::InvalidParameter("Fourier multipliers act on a linear_fullline grid".into()));
    }
    check_window(f)?;
    Ok(apply_symbol(f, |x| a.eval(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselSign {
    /// (xi - gamma)^s
    MinusGamma,
    /// (xi + gamma)^s
    PlusGamma,
}

/// (xi -+ gamma)^s on the principal branch.
pub fn bessel_symbol(s: f64, gamma: C64, sign: BesselSign) -> impl Fn(f64) -> C64 {
    move |x: f64| {
        let w = match sign {
            BesselSign::MinusGamma => C64::new(x, 0.0) - gamma,
            BesselSign::PlusGamma => C64::new(x, 0.0) + gamma,
        };
        (s * w.ln()).exp()
    }
}

pub fn apply_bessel_potential(f: &GridFunction, s: f64, gamma: C64, sign: BesselSign) -> Result<GridFunction> {
    if !(gamma.im > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} needs Im > 0")));
    }
    if f.axis != Axis::LinearFullline {
        return Err(Error::InvalidParameter("Bessel potentials act on a linear_fullline grid".into()));
    }
    check_window(f)?;
    Ok(apply_symbol(f, bessel_symbol(s, gamma, sign)))
}

/// F[K^m_c chi](xi) on the dual grid, for chi sampled on a full-line grid and
/// integrated over its positive part.
///
/// The Fourier image of t -> 1/(pi (t - w)) is 2i H(xi) e^{i xi w} for Im w > 0,
/// -2i H(-xi) e^{i xi w} for Im w < 0 and i sign(xi) e^{i xi w} (principal
/// value) for real w.
pub fn mellin_pole_spectrum(chi: &GridFunction, c: C64, m: u32) -> Result<Vec<C64>> {
    if crate::kernel::is_positive_real(c) {
        return Err(Error::ConstraintViolation("arg c != 0 required".into()));
    }
    if m == 0 {
        return Err(Error::InvalidPole("multiplicity 0".into()));
    }
    let h = chi.h();
    let j0 = (0..chi.n).find(|&j| chi.coord(j) > 0.0).unwrap_or(chi.n);
    let taus: Vec<f64> = (j0..chi.n).map(|j| chi.coord(j)).collect();
    let weights: Vec<C64> = (j0..chi.n)
        .map(|j| chi.samples[j] * chi.coord(j).powi(m as i32 - 1) * h)
        .collect();
    let fact: f64 = (1..m).map(|k| k as f64).product();
    let xi = xi_grid(chi.n, h);
    let out = xi
        .par_iter()
        .map(|&x| {
            let kappa = if c.im > 0.0 {
                if x > 0.0 {
                    2.0 * I
                } else if x == 0.0 {
                    I
                } else {
                    return C64::new(0.0, 0.0);
                }
            } else if c.im < 0.0 {
                if x < 0.0 {
                    -2.0 * I
                } else if x == 0.0 {
                    -I
                } else {
                    return C64::new(0.0, 0.0);
                }
            } else {
                I * x.signum()
            };
            if x == 0.0 && m > 1 {
                return C64::new(0.0, 0.0);
            }
            kappa * (I * x).powi(m as i32 - 1) / fact * exp_sum(&weights, &taus, I * c * x)
        })
        .collect();
    Ok(out)
}

/// sum_j w_j e^{q tau_j} for uniformly spaced tau, by a chunked recurrence.
fn exp_sum(w: &[C64], tau: &[f64], q: C64) -> C64 {
    const CHUNK: usize = 64;
    if tau.is_empty() {
        return C64::new(0.0, 0.0);
    }
    let step = if tau.len() > 1 { (q * (tau[1] - tau[0])).exp() } else { C64::new(1.0, 0.0) };
    let mut acc = C64::new(0.0, 0.0);
    for (cw, ct) in w.chunks(CHUNK).zip(tau.chunks(CHUNK)) {
        let mut e = (q * ct[0]).exp();
        for &wj in cw {
            acc += wj * e;
            e *= step;
        }
    }
    acc
}

/// Applies K^m_c and returns the result on the grid of `chi`.
pub fn apply_mellin_pole(chi: &GridFunction, c: C64, m: u32) -> Result<GridFunction> {
    Ok(from_spectrum(&mellin_pole_spectrum(chi, c, m)?, chi))
}
