//! Numerical checks of the commutation and lifting identities for K^m_c.

use super::fourier::{apply_symbol, from_spectrum, mellin_pole_spectrum, xi_grid};
use super::grid::{log_gaussian, rel_residual, Axis, GridFunction, GridMeta};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Commutation,
    LiftingK1,
    LiftingK2,
    MellinVsZbeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheckResult {
    pub identity: Identity,
    pub rel_residual: f64,
    pub grid: GridMeta,
    /// Relative size of the extra lower-order term in the K^2 lifting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_norm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    K1,
    K2,
}

/// Default full-line window half-width.
pub const WINDOW: f64 = 40.0;

/// exp(-(ln t)^2 / 0.25) on [-40, 40) with n samples.
pub fn standard_test_function(n: usize) -> Result<GridFunction> {
    GridFunction::from_fn(n, -WINDOW, WINDOW, Axis::LinearFullline, log_gaussian(0.0, 0.5))
}

/// |c|^{-s} e^{-i s arg c} with arg c in (0, 2 pi).
pub fn c_pow_neg_s(c: C64, s: f64) -> C64 {
    let mut arg = c.arg();
    if arg <= 0.0 {
        arg += 2.0 * PI;
    }
    (-s * C64::new(c.norm().ln(), arg)).exp()
}

/// Preconditions shared by all checks: 0 < arg c < 2 pi, Im gamma > 0 and
/// 0 < arg(-c gamma) < pi.
pub fn check_constraints(c: C64, gamma: C64) -> Result<()> {
    if c.norm() == 0.0 || !c.is_finite() {
        return Err(Error::ConstraintViolation("c != 0 required".into()));
    }
    if crate::kernel::is_positive_real(c) {
        return Err(Error::ConstraintViolation("arg c != 0 required".into()));
    }
    if !(gamma.im > 0.0) {
        return Err(Error::ConstraintViolation(format!("Im gamma > 0 required, gamma = {gamma}")));
    }
    let a = (-c * gamma).arg();
    if !(a > 0.0 && a < PI) {
        return Err(Error::ConstraintViolation(format!("0 < arg(-c gamma) < pi required, arg(-c gamma) = {a}")));
    }
    Ok(())
}

fn pow(w: C64, s: f64) -> C64 {
    if s == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        (s * w.ln()).exp()
    }
}

fn positive_part(f: &GridFunction) -> impl Fn(usize) -> bool + '_ {
    move |j| f.coord(j) > 0.0
}

/// (xi - gamma)^s K^1_c phi against c^{-s} K^1_c (xi - c gamma)^s phi.
pub fn check_commutation(c: C64, s: f64, gamma: C64, phi: &GridFunction) -> Result<IdentityCheckResult> {
    check_constraints(c, gamma)?;
    let xi = xi_grid(phi.n, phi.h());
    let k = mellin_pole_spectrum(phi, c, 1)?;
    let lhs: Vec<C64> = k.iter().zip(&xi).map(|(v, &x)| *v * pow(C64::new(x, 0.0) - gamma, s)).collect();
    let psi = apply_symbol(phi, |x| pow(C64::new(x, 0.0) - c * gamma, s));
    let cs = c_pow_neg_s(c, s);
    let rhs: Vec<C64> = mellin_pole_spectrum(&psi, c, 1)?.into_iter().map(|v| v * cs).collect();
    let l = from_spectrum(&lhs, phi);
    let r = from_spectrum(&rhs, phi);
    Ok(IdentityCheckResult {
        identity: Identity::Commutation,
        rel_residual: rel_residual(&l.samples, &r.samples, positive_part(phi)),
        grid: phi.meta(),
        remainder_norm: None,
    })
}

/// Lifted K^1_c (or K^2_c) against its Fourier-multiplier form.
pub fn check_lifting(kind: LiftKind, c: C64, s: f64, gamma: C64, phi: &GridFunction) -> Result<IdentityCheckResult> {
    check_constraints(c, gamma)?;
    let xi = xi_grid(phi.n, phi.h());
    let m = match kind {
        LiftKind::K1 => 1,
        LiftKind::K2 => 2,
    };
    let chi1 = apply_symbol(phi, |x| pow(C64::new(x, 0.0) + gamma, -s));
    let lhs: Vec<C64> = mellin_pole_spectrum(&chi1, c, m)?
        .iter()
        .zip(&xi)
        .map(|(v, &x)| *v * pow(C64::new(x, 0.0) - gamma, s))
        .collect();
    let chi2 = apply_symbol(phi, |x| pow(C64::new(x, 0.0) - c * gamma, s) * pow(C64::new(x, 0.0) + gamma, -s));
    let cs = c_pow_neg_s(c, s);
    let k1 = mellin_pole_spectrum(&chi2, c, 1)?;
    let (rhs, remainder) = match kind {
        LiftKind::K1 => (k1.iter().map(|v| *v * cs).collect::<Vec<_>>(), None),
        LiftKind::K2 => {
            let k2 = mellin_pole_spectrum(&chi2, c, 2)?;
            let chi3 = apply_symbol(phi, |x| {
                pow(C64::new(x, 0.0) - c * gamma, s - 1.0) * pow(C64::new(x, 0.0) + gamma, -s)
            });
            let k3 = mellin_pole_spectrum(&chi3, c, 1)?;
            let main: Vec<C64> = k2.iter().zip(&k1).map(|(a, b)| cs * (*a - s / c * *b)).collect();
            let extra: Vec<C64> = k3.iter().map(|v| -s * gamma * cs * *v).collect();
            let main_x = from_spectrum(&main, phi);
            let extra_x = from_spectrum(&extra, phi);
            let keep = positive_part(phi);
            let size = (0..phi.n).filter(|&j| keep(j)).map(|j| extra_x.samples[j].norm_sqr()).sum::<f64>().sqrt()
                / (0..phi.n).filter(|&j| keep(j)).map(|j| main_x.samples[j].norm_sqr()).sum::<f64>().sqrt();
            let sum: Vec<C64> = main.iter().zip(&extra).map(|(a, b)| a + b).collect();
            (sum, Some(size))
        }
    };
    let l = from_spectrum(&lhs, phi);
    let r = from_spectrum(&rhs, phi);
    Ok(IdentityCheckResult {
        identity: match kind {
            LiftKind::K1 => Identity::LiftingK1,
            LiftKind::K2 => Identity::LiftingK2,
        },
        rel_residual: rel_residual(&l.samples, &r.samples, positive_part(phi)),
        grid: phi.meta(),
        remainder_norm: remainder,
    })
}
