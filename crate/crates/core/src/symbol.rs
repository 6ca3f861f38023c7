//! Operator expressions and their symbols on the rectangle.

use crate::error::{Error, Result};
use crate::io::{CMatrix, KernelSpec};
use crate::kernel::{is_positive_real, require_admissible, MeromorphicKernel};
use crate::mellin::{mellin_symbol, mellin_symbol_pole};
use crate::multiplier::{connecting_function, g_power, Limits, Multiplier};
use crate::rectangle::{Leg, RectanglePoint};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprTerm {
    /// N x N coefficient; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<CMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Multiplier>,
    pub kernel: KernelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Multiplier>,
}

/// d0 I + W_{a0} + sum coeff_j W_{a_j} M_{K_j} W_{b_j}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorExpression {
    pub d0: CMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Multiplier>,
    #[serde(default)]
    pub terms: Vec<ExprTerm>,
}

impl OperatorExpression {
    pub fn scalar(d0: C64) -> Self {
        OperatorExpression { d0: CMatrix::scalar(d0), a0: None, terms: Vec::new() }
    }

    pub fn with_a0(mut self, a0: Multiplier) -> Self {
        self.a0 = Some(a0);
        self
    }

    pub fn with_term(mut self, a: Option<Multiplier>, kernel: MeromorphicKernel, b: Option<Multiplier>) -> Self {
        self.terms.push(ExprTerm { coeff: None, a, kernel: kernel.into(), b });
        self
    }

    pub fn dim(&self) -> usize {
        self.d0.dim()
    }
}

struct Term {
    coeff: DMatrix<C64>,
    a: Option<Multiplier>,
    kernel: MeromorphicKernel,
    b: Option<Multiplier>,
}

struct Compiled {
    n: usize,
    d0: DMatrix<C64>,
    a0: Option<Multiplier>,
    terms: Vec<Term>,
}

fn compile(expr: &OperatorExpression) -> Result<Compiled> {
    let n = expr.dim();
    if n > MAX_DIM {
        return Err(Error::InvalidParameter(format!("matrix dimension {n} exceeds {MAX_DIM}")));
    }
    let mut terms = Vec::new();
    for t in &expr.terms {
        let coeff = match &t.coeff {
            Some(c) if c.dim() != n => return Err(Error::DimensionMismatch { expected: n, found: c.dim() }),
            Some(c) => c.0.clone(),
            None => DMatrix::identity(n, n),
        };
        let kernel = t.kernel.build()?;
        require_admissible(&kernel)?;
        terms.push(Term { coeff, a: t.a.clone(), kernel, b: t.b.clone() });
    }
    Ok(Compiled { n, d0: expr.d0.0.clone(), a0: expr.a0.clone(), terms })
}

/// Symbol of W_b on the rectangle for a multiplier given pointwise plus limits.
pub fn fourier_leg(eval: &dyn Fn(f64) -> C64, lim: &Limits, p: f64, pt: &RectanglePoint) -> C64 {
    let x = pt.coord;
    match pt.leg {
        Leg::Gamma1 => connecting_function(lim.plus_inf, lim.minus_inf, p, x),
        Leg::Gamma3 => connecting_function(lim.zero_plus, lim.zero_minus, p, x),
        Leg::Gamma2Plus => {
            if x.is_infinite() {
                lim.minus_inf
            } else if x == 0.0 {
                lim.zero_minus
            } else {
                eval(-x)
            }
        }
        Leg::Gamma2Minus => {
            if x.is_infinite() {
                lim.plus_inf
            } else if x == 0.0 {
                lim.zero_plus
            } else {
                eval(x)
            }
        }
    }
}

pub fn multiplier_leg(m: &Multiplier, p: f64, pt: &RectanglePoint) -> C64 {
    fourier_leg(&|x| m.eval(x), &m.limits(), p, pt)
}

fn opt_leg(m: &Option<Multiplier>, p: f64, pt: &RectanglePoint) -> C64 {
    m.as_ref().map_or(ONE, |m| multiplier_leg(m, p, pt))
}

/// Mellin symbol on the rectangle: a(xi) on Gamma1 and Gamma3, a(+-inf) on Gamma2+-.
pub fn mellin_leg(k: &MeromorphicKernel, beta: f64, pt: &RectanglePoint) -> Result<C64> {
    let xi = match pt.leg {
        Leg::Gamma1 | Leg::Gamma3 => pt.coord,
        Leg::Gamma2Plus => f64::INFINITY,
        Leg::Gamma2Minus => f64::NEG_INFINITY,
    };
    mellin_symbol(k, beta, xi)
}

/// Symbol of the L_p operator at one point.
fn eval_lp(e: &Compiled, p: f64, pt: &RectanglePoint) -> Result<DMatrix<C64>> {
    let beta = 1.0 / p;
    let mut m = e.d0.clone();
    if let Some(a0) = &e.a0 {
        let v = multiplier_leg(a0, p, pt);
        for i in 0..e.n {
            m[(i, i)] += v;
        }
    }
    for t in &e.terms {
        let v = opt_leg(&t.a, p, pt) * mellin_leg(&t.kernel, beta, pt)? * opt_leg(&t.b, p, pt);
        m += &t.coeff * v;
    }
    Ok(m)
}

/// Bessel-scale lifting data: order s, space p, potential parameter gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    pub p: f64,
    pub s: f64,
    pub gamma: C64,
}

impl Lift {
    /// Symbol of the lifted identity, W_g with g = ((xi - gamma)/(xi + gamma))^s.
    pub fn identity_symbol(&self, pt: &RectanglePoint) -> C64 {
        let g = Multiplier::g_power(self.s, self.gamma, self.gamma);
        multiplier_leg(&g, self.p, pt)
    }

    /// c^{-s} with arg c in (-2 pi, 0), the phase matching [`Lift::identity_symbol`].
    pub fn c_pow_neg_s(&self, c: C64) -> C64 {
        let mut arg = c.arg();
        if arg <= 0.0 {
            arg += 2.0 * PI;
        }
        arg -= 2.0 * PI;
        (-self.s * C64::new(c.norm().ln(), arg)).exp()
    }

    /// (-c)^s on the branch arg(-c gamma) - arg(gamma).
    pub fn minus_c_pow_s(&self, c: C64) -> C64 {
        let arg = (-c * self.gamma).arg() - self.gamma.arg();
        (self.s * C64::new(c.norm().ln(), arg)).exp()
    }

    /// Lifted symbol of one pole term d (t - c)^{-m}, m in {1, 2}.
    pub fn pole_symbol(&self, c: C64, m: u32, d: C64, pt: &RectanglePoint) -> Result<C64> {
        let beta = 1.0 / self.p;
        if m > 2 {
            return Err(Error::UnsupportedMultiplicity(m));
        }
        if is_positive_real(c) {
            if (c.re - 1.0).abs() > 1e-14 || m != 1 {
                return Err(Error::UnsupportedKernel(format!(
                    "positive-real pole c = {} has no lifted symbol; only c = 1 is supported",
                    c.re
                )));
            }
            return Ok(PI * d * (-I) * cauchy_symbol(self.p, pt));
        }
        let xi = match pt.leg {
            Leg::Gamma2Plus | Leg::Gamma2Minus => return Ok(ZERO),
            _ => pt.coord,
        };
        let k1 = PI * d * mellin_symbol_pole(c, 1, beta, xi)?;
        let pre = self.c_pow_neg_s(c);
        match (m, pt.leg) {
            (1, Leg::Gamma1) => Ok(pre * k1),
            (1, _) => Ok(pre * self.minus_c_pow_s(c) * k1),
            (_, Leg::Gamma1) => {
                let k2 = PI * d * mellin_symbol_pole(c, 2, beta, xi)?;
                Ok(pre * (k2 - self.s / c * k1))
            }
            _ => {
                let k2 = PI * d * mellin_symbol_pole(c, 2, beta, xi)?;
                Ok(pre * self.minus_c_pow_s(c) * k2)
            }
        }
    }
}

/// Symbol of the half-line Cauchy singular integral operator.
pub fn cauchy_symbol(p: f64, pt: &RectanglePoint) -> C64 {
    match pt.leg {
        Leg::Gamma1 | Leg::Gamma3 => -I * crate::special::cot_strip(1.0 / p, pt.coord),
        Leg::Gamma2Plus => ONE,
        Leg::Gamma2Minus => -ONE,
    }
}

fn eval_bessel(e: &Compiled, lift: &Lift, pt: &RectanglePoint) -> Result<DMatrix<C64>> {
    let p = lift.p;
    let mut m = &e.d0 * lift.identity_symbol(pt);
    if let Some(a0) = &e.a0 {
        let (s, g) = (lift.s, lift.gamma);
        let l = a0.limits();
        let g0 = g_power(s, g, g, 0.0);
        let gl = Multiplier::g_power(s, g, g).limits();
        let lim = Limits {
            minus_inf: l.minus_inf * gl.minus_inf,
            plus_inf: l.plus_inf * gl.plus_inf,
            zero_minus: l.zero_minus * g0,
            zero_plus: l.zero_plus * g0,
        };
        let v = fourier_leg(&|x| a0.eval(x) * g_power(s, g, g, x), &lim, p, pt);
        for i in 0..e.n {
            m[(i, i)] += v;
        }
    }
    for t in &e.terms {
        let mut k = ZERO;
        for pole in &t.kernel.terms {
            k += lift.pole_symbol(pole.c, pole.m, pole.d, pt)?;
        }
        let v = opt_leg(&t.a, p, pt) * k * opt_leg(&t.b, p, pt);
        m += &t.coeff * v;
    }
    Ok(m)
}

type Evaluator = Arc<dyn Fn(&RectanglePoint) -> Result<DMatrix<C64>> + Send + Sync>;

/// Sampled symbol; keeps its evaluator so that analyses can refine.
#[derive(Clone)]
pub struct SymbolField {
    pub samples: Vec<(RectanglePoint, DMatrix<C64>)>,
    pub n: usize,
    pub closed: bool,
    evaluator: Option<Evaluator>,
}

impl std::fmt::Debug for SymbolField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolField").field("n", &self.n).field("samples", &self.samples.len()).finish()
    }
}

pub fn det(m: &DMatrix<C64>) -> C64 {
    if m.nrows() == 1 {
        m[(0, 0)]
    } else {
        m.clone().determinant()
    }
}

impl SymbolField {
    /// Samples `f` on `grid` in parallel.
    pub fn from_evaluator<F>(grid: &[RectanglePoint], n: usize, f: F) -> Result<Self>
    where
        F: Fn(&RectanglePoint) -> Result<DMatrix<C64>> + Send + Sync + 'static,
    {
        let f: Evaluator = Arc::new(f);
        let mut pts = grid.to_vec();
        pts.sort_by(|a, b| a.arclen.partial_cmp(&b.arclen).unwrap());
        let samples = pts
            .par_iter()
            .map(|pt| f(pt).map(|m| (*pt, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymbolField { samples, n, closed: true, evaluator: Some(f) })
    }

    /// Scalar field from a closure.
    pub fn scalar<F>(grid: &[RectanglePoint], f: F) -> Self
    where
        F: Fn(&RectanglePoint) -> C64 + Send + Sync + 'static,
    {
        Self::from_evaluator(grid, 1, move |pt| Ok(DMatrix::from_element(1, 1, f(pt)))).unwrap()
    }

    /// Field from fixed samples only; no refinement possible.
    pub fn from_samples(mut samples: Vec<(RectanglePoint, DMatrix<C64>)>, closed: bool) -> Self {
        samples.sort_by(|a, b| a.0.arclen.partial_cmp(&b.0.arclen).unwrap());
        let n = samples.first().map_or(1, |s| s.1.nrows());
        SymbolField { samples, n, closed, evaluator: None }
    }

    pub fn eval_at(&self, arclen: f64) -> Option<Result<DMatrix<C64>>> {
        self.evaluator.as_ref().map(|f| f(&crate::rectangle::point_at(arclen)))
    }

    pub fn det_at(&self, arclen: f64) -> Option<Result<C64>> {
        self.eval_at(arclen).map(|r| r.map(|m| det(&m)))
    }

    pub fn dets(&self) -> Vec<C64> {
        self.samples.iter().map(|(_, m)| det(m)).collect()
    }

    /// The field traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .enumerate()
            .map(|(i, (pt, m))| (RectanglePoint { arclen: i as f64, ..*pt }, m.clone()))
            .collect();
        SymbolField { samples, n: self.n, closed: self.closed, evaluator: None }
    }
}

pub fn assemble_symbol_lp(expr: &OperatorExpression, p: f64, grid: &[RectanglePoint]) -> Result<SymbolField> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p}: p must lie in (1, inf)")));
    }
    let e = Arc::new(compile(expr)?);
    let n = e.n;
    SymbolField::from_evaluator(grid, n, move |pt| eval_lp(&e, p, pt))
}

/// Bessel-scale symbol with potential parameter gamma = i.
pub fn assemble_symbol_bessel(expr: &OperatorExpression, p: f64, s: f64, grid: &[RectanglePoint]) -> Result<SymbolField> {
    assemble_symbol_bessel_with(expr, Lift { p, s, gamma: I }, grid)
}

pub fn assemble_symbol_bessel_with(expr: &OperatorExpression, lift: Lift, grid: &[RectanglePoint]) -> Result<SymbolField> {
    let p = lift.p;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p}: p must lie in (1, inf)")));
    }
    if !(lift.gamma.im > 0.0) {
        return Err(Error::InvalidParameter(format!("bessel gamma = {} needs Im > 0", lift.gamma)));
    }
    let e = compile(expr)?;
    let s = lift.s;
    if !(s > 1.0 / p - 1.0 && s < 1.0 / p) {
        for (j, t) in e.terms.iter().enumerate() {
            if t.a.as_ref().is_some_and(|a| !a.analytic_lower) {
                return Err(Error::AnalyticityViolation(format!(
                    "term {j}: a must extend analytically to the lower half-plane for s = {s} outside (1/p - 1, 1/p)"
                )));
            }
            if t.b.as_ref().is_some_and(|b| !b.analytic_upper) {
                return Err(Error::AnalyticityViolation(format!(
                    "term {j}: b must extend analytically to the upper half-plane for s = {s} outside (1/p - 1, 1/p)"
                )));
            }
        }
    }
    for t in &e.terms {
        for pole in &t.kernel.terms {
            if pole.m > 2 {
                return Err(Error::UnsupportedMultiplicity(pole.m));
            }
        }
    }
    let e = Arc::new(e);
    let n = e.n;
    SymbolField::from_evaluator(grid, n, move |pt| eval_bessel(&e, &lift, pt))
}
