//! Mellin transforms of admissible kernels: closed form per pole, a
//! quadrature oracle, and the full symbol c0 - i c1 cot + M K.

use crate::error::{Error, Result};
use crate::kernel::{is_positive_real, require_admissible, MeromorphicKernel};
use crate::quad::{integrate_breaks, QuadOptions};
use crate::special::{binom, cot_pi, ln_inv_sin_pi};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Oracle failure threshold on the quadrature error estimate.
pub const ORACLE_MAX_ERROR: f64 = 1e-9;
/// Analytic truncation bound per tail of the oracle window.
pub const ORACLE_TAIL: f64 = 5e-13;
const PV_INNER: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolValue {
    pub value: C64,
    pub xi: f64,
    pub beta: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1)")))
    }
}

/// Transform of K^m_c(t) = 1/(pi (t-c)^m) at z = beta - i xi.
///
/// Off the positive axis: binom(z-1, m-1) (-1)^{m-1} (-c)^{z-m} / sin(pi z)
/// with the principal branch of log(-c). On the positive axis (m = 1) the
/// principal value -c^{z-1} cot(pi z).
pub fn mellin_symbol_pole(c: C64, m: u32, beta: f64, xi: f64) -> Result<C64> {
    if c == C64::new(0.0, 0.0) {
        return Err(Error::InvalidPole("c = 0".into()));
    }
    if m == 0 {
        return Err(Error::InvalidPole("multiplicity 0".into()));
    }
    check_beta(beta)?;
    if is_positive_real(c) {
        if m > 1 {
            return Err(Error::InvalidPole(format!("positive-real pole c = {} needs m = 1", c.re)));
        }
        if xi.is_infinite() {
            if c.re != 1.0 {
                return Err(Error::UnsupportedKernel(format!(
                    "symbol of a positive-real pole c = {} has no limit at infinity",
                    c.re
                )));
            }
            return Ok(if xi > 0.0 { -I } else { I });
        }
        let z = C64::new(beta, -xi);
        let lc = c.re.ln();
        return Ok(-((z - 1.0) * lc).exp() * cot_pi(z));
    }
    mellin_symbol_pole_offaxis(c, m, beta, xi)
}

/// The off-axis closed form without routing; rejects the branch cut.
pub fn mellin_symbol_pole_offaxis(c: C64, m: u32, beta: f64, xi: f64) -> Result<C64> {
    let minus_c = -c;
    let arg = minus_c.arg();
    if arg.abs() >= PI {
        return Err(Error::BranchViolation(format!("{c}")));
    }
    if xi.is_infinite() {
        return Ok(C64::new(0.0, 0.0));
    }
    let z = C64::new(beta, -xi);
    let log_mc = C64::new(minus_c.norm().ln(), arg);
    let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mag = ((z - m as f64) * log_mc + ln_inv_sin_pi(z)).exp();
    Ok(binom(z - 1.0, m - 1) * sign * mag)
}

/// Transform of the raw kernel sum d_j (t - c_j)^{-m_j}.
pub fn mellin_symbol(k: &MeromorphicKernel, beta: f64, xi: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for t in &k.terms {
        acc += PI * t.d * mellin_symbol_pole(t.c, t.m, beta, xi)?;
    }
    Ok(acc)
}

/// c0 - i c1 cot(pi(beta - i xi)) + M_beta K(xi).
pub fn full_symbol_a_beta(c0: C64, c1: C64, k: &MeromorphicKernel, beta: f64, xi: f64) -> Result<C64> {
    check_beta(beta)?;
    let cot = crate::special::cot_strip(beta, xi);
    Ok(c0 - I * c1 * cot + mellin_symbol(k, beta, xi)?)
}

/// Window [-x_lo, x_hi] in x = ln t beyond which each tail is below `tail`.
fn oracle_window(k: &MeromorphicKernel, beta: f64, tail: f64) -> (f64, f64) {
    let cmin = k.terms.iter().map(|t| t.c.norm()).fold(f64::INFINITY, f64::min);
    let cmax = k.terms.iter().map(|t| t.c.norm()).fold(0.0, f64::max);
    // t <= cmin/2: |t - c| >= |c|/2
    let m0: f64 = k.terms.iter().map(|t| t.d.norm() * (2.0 / t.c.norm()).powi(t.m as i32)).sum();
    let x_lo = (-(cmin / 2.0).ln()).max((m0 / (beta * tail)).ln() / beta).max(1.0);
    // t >= max(2 cmax, 1): |K| <= sum |d| 2^m t^{-1}
    let m1: f64 = k.terms.iter().map(|t| t.d.norm() * 2f64.powi(t.m as i32)).sum();
    let x_hi = (2.0 * cmax).max(1.0).ln().max((m1 / ((1.0 - beta) * tail)).ln() / (1.0 - beta)).max(1.0);
    (x_lo, x_hi)
}

/// Quadrature of int_0^inf t^{beta - i xi - 1} K(t) dt after t = e^x.
/// Positive-real poles are taken as principal values by pairing x0 +- u.
pub fn mellin_symbol_oracle(k: &MeromorphicKernel, beta: f64, xi: f64) -> Result<C64> {
    mellin_symbol_oracle_detail(k, beta, xi).map(|(v, _)| v)
}

/// As [`mellin_symbol_oracle`], also returning the error estimate.
pub fn mellin_symbol_oracle_detail(k: &MeromorphicKernel, beta: f64, xi: f64) -> Result<(C64, f64)> {
    require_admissible(k)?;
    check_beta(beta)?;
    if k.terms.is_empty() {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let z = C64::new(beta, -xi);
    let f = |x: f64| -> C64 {
        let t = C64::new(x.exp(), 0.0);
        (z * x).exp() * k.eval_complex(t)
    };
    let (x_lo, x_hi) = oracle_window(k, beta, ORACLE_TAIL);

    let mut real_logs: Vec<f64> = k
        .terms
        .iter()
        .filter(|t| is_positive_real(t.c))
        .map(|t| t.c.re.ln())
        .collect();
    real_logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    real_logs.dedup();
    let mut delta: f64 = 0.5;
    for w in real_logs.windows(2) {
        delta = delta.min(0.45 * (w[1] - w[0]));
    }

    // breakpoints every unit, plus pole features
    let mut breaks: Vec<f64> = Vec::new();
    let step = 1.0f64.min(2.0 * PI / xi.abs().max(1e-12));
    let nstep = ((x_lo + x_hi) / step).ceil() as usize;
    for j in 0..=nstep {
        breaks.push((-x_lo + j as f64 * step).min(x_hi));
    }
    for t in &k.terms {
        let x = t.c.norm().ln();
        if x > -x_lo && x < x_hi {
            breaks.push(x);
        }
    }
    let mut excluded = Vec::new();
    for &x0 in &real_logs {
        breaks.push(x0 - delta);
        breaks.push(x0 + delta);
        excluded.push((x0 - delta, x0 + delta));
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let opt = QuadOptions { max_intervals: 200_000, ..QuadOptions::default() };
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    // regular pieces between PV windows
    let mut segment: Vec<f64> = Vec::new();
    let flush = |seg: &mut Vec<f64>, value: &mut C64, error: &mut f64| {
        if seg.len() >= 2 {
            let r = integrate_breaks(f, seg, opt);
            *value += r.value;
            *error += r.error;
        }
        seg.clear();
    };
    for &b in &breaks {
        segment.push(b);
        if excluded.iter().any(|&(lo, _)| (b - lo).abs() < 1e-12) {
            flush(&mut segment, &mut value, &mut error);
        }
        if excluded.iter().any(|&(_, hi)| (b - hi).abs() < 1e-12) {
            segment.clear();
            segment.push(b);
        }
    }
    flush(&mut segment, &mut value, &mut error);

    for &x0 in &real_logs {
        // the pair sum is bounded near u = 0 but loses digits like eps/u;
        // the innermost sliver is taken as one rectangle
        let g = |u: f64| f(x0 + u) + f(x0 - u);
        let r = integrate_breaks(g, &[PV_INNER, delta / 4.0, delta / 2.0, delta], opt);
        value += r.value + PV_INNER * g(PV_INNER);
        error += r.error;
    }
    if !(error <= ORACLE_MAX_ERROR) || !value.is_finite() {
        return Err(Error::QuadratureFailure { estimate: error, limit: ORACLE_MAX_ERROR });
    }
    Ok((value, error))
}
