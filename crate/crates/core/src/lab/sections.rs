//! Finite sections: piecewise-constant Galerkin matrices on [0, T].

use super::grid::{Axis, GridFunction};
use crate::error::{Error, Result};
use crate::kernel::{is_positive_real, require_admissible, MeromorphicKernel, SpaceParams};
use crate::multiplier::Multiplier;
use crate::symbol::OperatorExpression;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };
/// sigma_min / sigma_max below this is treated as rank deficiency.
pub const RANK_TOL: f64 = 1e-13;

/// w Log w, continuous at w = 0; Log is ln|w| for real w.
fn wlogw(w: C64, real: bool) -> C64 {
    if w.norm() == 0.0 {
        ZERO
    } else if real {
        w * w.re.abs().ln()
    } else {
        w * w.ln()
    }
}

fn log0(w: C64, real: bool) -> C64 {
    if w.norm() == 0.0 {
        ZERO
    } else if real {
        C64::new(w.re.abs().ln(), 0.0)
    } else {
        w.ln()
    }
}

/// Antiderivative F(u, v) with d^2F/du dv = tau^{m-1}/(t - c tau)^m at (t, tau) = (u, v).
fn antiderivative(c: C64, m: u32, u: f64, v: f64) -> C64 {
    let real = is_positive_real(c);
    let w = C64::new(u, 0.0) - c * v;
    match m {
        1 => -wlogw(w, real) / c,
        _ => wlogw(w, real) / (c * c) + v / c * log0(w, real),
    }
}

/// (1/h) int_{I_i} int_{I_j} tau^{m-1}/(t - c tau)^m dtau dt on cells of width h.
fn pole_block(c: C64, m: u32, n: usize, h: f64) -> DMatrix<C64> {
    let f: Vec<Vec<C64>> = (0..=n)
        .map(|i| (0..=n).map(|j| antiderivative(c, m, i as f64 * h, j as f64 * h)).collect())
        .collect();
    DMatrix::from_fn(n, n, |i, j| (f[i + 1][j + 1] - f[i + 1][j] - f[i][j + 1] + f[i][j]) / h)
}

fn mellin_block(k: &MeromorphicKernel, n: usize, h: f64) -> Result<DMatrix<C64>> {
    require_admissible(k)?;
    let mut a = DMatrix::zeros(n, n);
    for t in &k.terms {
        if t.m > 2 {
            return Err(Error::UnsupportedMultiplicity(t.m));
        }
        a += pole_block(t.c, t.m, n, h) * t.d;
    }
    Ok(a)
}

/// Galerkin block of W_a: constant, -sign (Cauchy kernel i/(pi z)) and a
/// decaying remainder integrated in xi.
fn fourier_block(a: &Multiplier, n: usize, h: f64) -> DMatrix<C64> {
    let l = a.limits();
    let alpha = 0.5 * (l.plus_inf + l.minus_inf);
    let beta = 0.5 * (l.minus_inf - l.plus_inf);
    let s = pole_block(C64::new(1.0, 0.0), 1, n, h) * (I / PI);
    let mut m = DMatrix::identity(n, n) * alpha + s * beta;
    // remainder r = a - alpha + beta sign, folded onto one period of e^{-i xi d h}
    let r = |x: f64| {
        if x == 0.0 {
            0.5 * (l.zero_plus + l.zero_minus) - alpha
        } else {
            a.eval(x) - alpha + beta * x.signum()
        }
    };
    let nodes = 1 << 13;
    let period = 2.0 * PI / h;
    let dx = period / nodes as f64;
    let images = 200i64;
    let folded: Vec<C64> = (0..nodes)
        .map(|k| {
            let x0 = -0.5 * period + k as f64 * dx;
            let mut acc = ZERO;
            for q in -images..=images {
                let x = x0 + q as f64 * period;
                let sinc = if x == 0.0 { 1.0 } else { (0.5 * x * h).sin() / (0.5 * x * h) };
                acc += r(x) * sinc * sinc;
            }
            acc
        })
        .collect();
    if folded.iter().all(|v| v.norm() < 1e-300) {
        return m;
    }
    let toeplitz: Vec<C64> = (-(n as i64 - 1)..n as i64)
        .map(|d| {
            let mut acc = ZERO;
            for (k, v) in folded.iter().enumerate() {
                let x = -0.5 * period + k as f64 * dx;
                acc += *v * (-I * x * d as f64 * h).exp();
            }
            acc * dx * h / (2.0 * PI)
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += toeplitz[(i as i64 - j as i64 + n as i64 - 1) as usize];
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct SectionSolution {
    pub solution: GridFunction,
    pub cond: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Section matrix of a scalar expression on n cells of [0, t_max].
pub fn section_matrix(expr: &OperatorExpression, n: usize, t_max: f64) -> Result<DMatrix<C64>> {
    if expr.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: expr.dim() });
    }
    let h = t_max / n as f64;
    let mut a = DMatrix::identity(n, n) * expr.d0.0[(0, 0)];
    if let Some(a0) = &expr.a0 {
        a += fourier_block(a0, n, h);
    }
    for t in &expr.terms {
        let coeff = t.coeff.as_ref().map_or(C64::new(1.0, 0.0), |c| c.0[(0, 0)]);
        let mut b = mellin_block(&t.kernel.build()?, n, h)?;
        if let Some(m) = &t.a {
            b = fourier_block(m, n, h) * b;
        }
        if let Some(m) = &t.b {
            b *= fourier_block(m, n, h);
        }
        a += b * coeff;
    }
    Ok(a)
}

/// Least-squares solution of the n x n section and its 2-norm condition number.
/// Only unweighted L_2 is discretised.
pub fn finite_section_solve(
    expr: &OperatorExpression,
    sp: &SpaceParams,
    rhs: &GridFunction,
    n: usize,
) -> Result<SectionSolution> {
    if sp.p != 2.0 || sp.gamma_weight != 0.0 {
        return Err(Error::InvalidParameter("finite sections are implemented for unweighted L_2 only".into()));
    }
    if rhs.axis != Axis::LinearHalfline || rhs.t_min != 0.0 {
        return Err(Error::InvalidParameter("rhs must live on a linear_halfline grid starting at 0".into()));
    }
    if rhs.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.n });
    }
    let a = section_matrix(expr, n, rhs.t_max)?;
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    if !(sigma_min > RANK_TOL * sigma_max) {
        return Err(Error::SingularSection(sigma_min / sigma_max));
    }
    let b = DVector::from_vec(rhs.samples.clone());
    let x = svd
        .solve(&b, RANK_TOL * sigma_max)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(SectionSolution {
        solution: rhs.with_samples(x.iter().copied().collect()),
        cond: sigma_max / sigma_min,
        sigma_min,
        sigma_max,
    })
}
