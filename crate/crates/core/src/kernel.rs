//! Admissible meromorphic kernels K(t) = sum d_j (t - c_j)^{-m_j}.

use crate::error::{Error, Result};
use crate::special::binom;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default radius for detecting evaluation on a real pole.
pub const EPS_POLE: f64 = 1e-12;
/// Relative size of Im c below which a pole counts as lying on the positive axis.
pub const AXIS_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub c: C64,
    pub m: u32,
    pub d: C64,
}

impl PoleTerm {
    pub fn new(c: C64, m: u32, d: C64) -> Self {
        Self { c, m, d }
    }

    pub fn on_positive_axis(&self) -> bool {
        is_positive_real(self.c)
    }

    pub fn conj(&self) -> Self {
        Self { c: self.c.conj(), m: self.m, d: self.d.conj() }
    }
}

pub fn is_positive_real(c: C64) -> bool {
    c.re > 0.0 && c.im.abs() <= AXIS_TOL * c.norm()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeromorphicKernel {
    pub terms: Vec<PoleTerm>,
}

impl MeromorphicKernel {
    pub fn new(terms: Vec<PoleTerm>) -> Self {
        Self { terms }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(PoleTerm::conj).collect() }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            terms: self.terms.iter().map(|t| PoleTerm { d: t.d * s, ..*t }).collect(),
        }
    }

    pub fn push(&mut self, t: PoleTerm) {
        self.terms.push(t);
    }

    pub fn has_positive_real_pole(&self) -> Option<usize> {
        self.terms.iter().position(PoleTerm::on_positive_axis)
    }

    /// Evaluate at a complex point with no pole checks.
    pub fn eval_complex(&self, t: C64) -> C64 {
        self.terms.iter().map(|p| p.d * (t - p.c).powi(-(p.m as i32))).sum()
    }
}

/// (p, gamma, beta, s) indexing L_p(R+, t^gamma) and its Bessel scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceParams {
    pub p: f64,
    pub gamma_weight: f64,
    pub beta: f64,
    pub s: f64,
}

impl SpaceParams {
    pub fn new(p: f64, gamma_weight: f64, s: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p = {p}: p must lie in (1, inf)")));
        }
        if !(gamma_weight > -1.0 && gamma_weight < p - 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_weight = {gamma_weight}: must lie in (-1, p-1) = (-1, {})",
                p - 1.0
            )));
        }
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("s = {s} must be finite")));
        }
        Ok(Self { p, gamma_weight, beta: (1.0 + gamma_weight) / p, s })
    }

    /// Unweighted L_p.
    pub fn lp(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0)
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

impl<'de> Deserialize<'de> for SpaceParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: f64,
            #[serde(default)]
            gamma_weight: f64,
            #[serde(default)]
            s: f64,
        }
        let r = Raw::deserialize(de)?;
        SpaceParams::new(r.p, r.gamma_weight, r.s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub real_axis_poles: Vec<usize>,
    pub violations: Vec<String>,
    pub sup_re: f64,
}

pub fn validate_admissible(k: &MeromorphicKernel) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let mut real_axis_poles = Vec::new();
    let mut sup_re = f64::NEG_INFINITY;
    for (j, t) in k.terms.iter().enumerate() {
        sup_re = sup_re.max(t.c.re);
        if t.c == C64::new(0.0, 0.0) {
            violations.push(format!("term {j}: pole at c = 0"));
            continue;
        }
        if t.m == 0 {
            violations.push(format!("term {j}: multiplicity must be >= 1"));
        }
        if !(t.c.is_finite() && t.d.is_finite()) {
            violations.push(format!("term {j}: non-finite pole data"));
        }
        if t.on_positive_axis() {
            real_axis_poles.push(j);
            if t.m > 1 {
                violations.push(format!(
                    "term {j}: positive-real pole c = {} has multiplicity {} (must be 1)",
                    t.c.re, t.m
                ));
            }
        }
    }
    AdmissibilityReport { admissible: violations.is_empty(), real_axis_poles, violations, sup_re }
}

pub(crate) fn require_admissible(k: &MeromorphicKernel) -> Result<()> {
    let r = validate_admissible(k);
    if r.admissible {
        Ok(())
    } else {
        Err(Error::Inadmissible(r.violations.join("; ")))
    }
}

pub fn eval_kernel(k: &MeromorphicKernel, t: f64) -> Result<C64> {
    eval_kernel_eps(k, t, EPS_POLE)
}

pub fn eval_kernel_eps(k: &MeromorphicKernel, t: f64, eps_pole: f64) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
    }
    for p in &k.terms {
        if p.on_positive_axis() && (t - p.c.re).abs() < eps_pole {
            return Err(Error::PoleHit { t, c: p.c.re });
        }
    }
    Ok(k.eval_complex(C64::new(t, 0.0)))
}

pub fn make_power_pole(c: C64, m: u32) -> Result<MeromorphicKernel> {
    if c == C64::new(0.0, 0.0) {
        return Err(Error::InvalidPole("c = 0".into()));
    }
    if m == 0 {
        return Err(Error::InvalidPole("multiplicity 0".into()));
    }
    if is_positive_real(c) && m > 1 {
        return Err(Error::InvalidPole(format!(
            "positive-real pole c = {} needs m = 1, got {m}",
            c.re
        )));
    }
    Ok(MeromorphicKernel::new(vec![PoleTerm::new(c, m, C64::new(1.0 / PI, 0.0))]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classical {
    NAlpha,
    NAlphaStar,
    MAlpha,
}

/// The rational kernel in closed form, used to check the partial fractions.
pub fn classical_closed_form(name: Classical, alpha: f64, t: f64) -> f64 {
    let den = t * t + 1.0 - 2.0 * t * alpha.cos();
    match name {
        Classical::NAlpha => alpha.sin() / PI * t / den,
        Classical::NAlphaStar => alpha.sin() / PI / den,
        Classical::MAlpha => (alpha.cos() - t) / (2.0 * PI * den),
    }
}

pub fn make_classical(name: Classical, alpha: f64) -> Result<MeromorphicKernel> {
    if !(alpha > -PI && alpha < PI) || alpha == 0.0 {
        return Err(Error::InvalidAngle(alpha));
    }
    let e = C64::from_polar(1.0, alpha);
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let (dp, dm) = match name {
        Classical::NAlpha => (e / two_pi_i, -e.conj() / two_pi_i),
        Classical::NAlphaStar => (1.0 / two_pi_i, -1.0 / two_pi_i),
        Classical::MAlpha => (C64::new(-0.25 / PI, 0.0), C64::new(-0.25 / PI, 0.0)),
    };
    Ok(MeromorphicKernel::new(vec![PoleTerm::new(e, 1, dp), PoleTerm::new(e.conj(), 1, dm)]))
}

/// (1/(pi i)) t^k (t+1)^{-(m+1)} as a pole sum at c = -1.
pub fn make_n_mk(m: u32, k: u32) -> Result<MeromorphicKernel> {
    if k > m {
        return Err(Error::IndexRange { m, k });
    }
    let pref = 1.0 / C64::new(0.0, PI);
    let terms = (0..=k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let coef = binom(C64::new(k as f64, 0.0), j).re * sign;
            PoleTerm::new(C64::new(-1.0, 0.0), m + 1 - k + j, pref * coef)
        })
        .collect();
    Ok(MeromorphicKernel::new(terms))
}

fn binom_real(x: f64, k: u32) -> f64 {
    binom(C64::new(x, 0.0), k).re
}

/// Upper bound for the L_p(R+, t^gamma) norm of the Mellin convolution with kernel k.
pub fn norm_bound(k: &MeromorphicKernel, sp: &SpaceParams) -> Result<f64> {
    require_admissible(k)?;
    if let Some(j) = k.has_positive_real_pole() {
        return Err(Error::RealPolePresent(j));
    }
    let b = sp.beta;
    let sum: f64 = k
        .terms
        .iter()
        .map(|t| {
            let m = t.m as f64;
            let e = if t.c.re < 0.0 { m / 2.0 } else { m };
            2f64.powf(e) * t.d.norm() * binom_real(b - 1.0, t.m - 1).abs() * t.c.norm().powf(b - m)
        })
        .sum();
    Ok(PI / (PI * b).sin() * sum)
}

/// Taylor coefficients of K at t = 0 and of K(1/u) at u = 0, up to order n.
fn series_orders(k: &MeromorphicKernel) -> (Option<usize>, Option<usize>) {
    let nmax: usize = k.terms.iter().map(|t| t.m as usize).sum::<usize>() + 1;
    let first_nonzero = |start: usize, coef: &dyn Fn(&PoleTerm, usize) -> C64| {
        (start..=nmax).find(|&n| {
            let parts: Vec<C64> = k.terms.iter().map(|t| coef(t, n)).collect();
            let scale: f64 = parts.iter().map(|z| z.norm()).sum();
            let sum: C64 = parts.iter().sum();
            scale > 0.0 && sum.norm() > 1e-12 * scale
        })
    };
    // (t - c)^{-m} = (-c)^{-m} sum_n binom(m+n-1, n) (t/c)^n
    let v0 = first_nonzero(0, &|t, n| {
        t.d * (-t.c).powi(-(t.m as i32))
            * binom_real((t.m as usize + n - 1) as f64, n as u32)
            * t.c.powi(-(n as i32))
    });
    // (t - c)^{-m} = sum_{n >= m} binom(n-1, m-1) c^{n-m} t^{-n}
    let qinf = first_nonzero(1, &|t, n| {
        if (t.m as usize) > n {
            C64::new(0.0, 0.0)
        } else {
            t.d * binom_real((n - 1) as f64, t.m - 1) * t.c.powi((n - t.m as usize) as i32)
        }
    });
    (v0, qinf)
}

/// Finiteness of int_0^1 t^{1/p-m-1}|K| and int_1^inf t^{1/p-1}|K|.
pub fn check_classical_condition(k: &MeromorphicKernel, p: f64, m: u32) -> Result<bool> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p}: p must lie in (1, inf)")));
    }
    if let Some(j) = k.has_positive_real_pole() {
        return Err(Error::RealPolePresent(j));
    }
    if k.terms.is_empty() {
        return Ok(true);
    }
    let (v0, qinf) = series_orders(k);
    let (v0, qinf) = match (v0, qinf) {
        (Some(v), Some(q)) => (v as f64, q as f64),
        // identically zero
        _ => return Ok(true),
    };
    let near_zero = 1.0 / p - m as f64 + v0 > 0.0;
    let at_inf = 1.0 / p - qinf < 0.0;
    Ok(near_zero && at_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn admissibility_examples() {
        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(-1.0, 0.0), 1, c(1.0 / PI, 0.0))]);
        let r = validate_admissible(&k);
        assert!(r.admissible && r.real_axis_poles.is_empty());
        assert_eq!(r.sup_re, -1.0);

        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(2.0, 0.0), 2, c(1.0, 0.0))]);
        assert!(!validate_admissible(&k).admissible);

        let k = MeromorphicKernel::new(vec![
            PoleTerm::new(c(2.0, 0.0), 1, c(1.0, 0.0)),
            PoleTerm::new(c(0.0, 1.0), 3, c(-2.0, 0.0)),
        ]);
        let r = validate_admissible(&k);
        assert!(r.admissible);
        assert_eq!(r.real_axis_poles, vec![0]);
        assert!(validate_admissible(&MeromorphicKernel::empty()).sup_re == f64::NEG_INFINITY);

        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(0.0, 0.0), 1, c(1.0, 0.0))]);
        assert!(!validate_admissible(&k).admissible);
    }

    #[test]
    fn eval_examples() {
        let k = make_power_pole(c(-1.0, 0.0), 1).unwrap();
        assert!((eval_kernel(&k, 1.0).unwrap() - 1.0 / (2.0 * PI)).norm() < 1e-16);
        let k1 = make_power_pole(c(1.0, 0.0), 1).unwrap();
        assert!(matches!(eval_kernel(&k1, 1.0), Err(Error::PoleHit { .. })));
        let n = make_classical(Classical::NAlpha, PI / 2.0).unwrap();
        assert!((eval_kernel(&n, 1.0).unwrap() - 1.0 / (2.0 * PI)).norm() < 1e-15);
        let m = make_classical(Classical::MAlpha, PI / 3.0).unwrap();
        let want = ((PI / 3.0).cos() - 2.0) / (2.0 * PI * (4.0 + 1.0 - 4.0 * (PI / 3.0).cos()));
        assert!((eval_kernel(&m, 2.0).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn constructors() {
        assert!(matches!(make_power_pole(c(1.0, 0.0), 2), Err(Error::InvalidPole(_))));
        assert!(matches!(make_power_pole(c(0.0, 0.0), 1), Err(Error::InvalidPole(_))));
        assert_eq!(make_power_pole(c(1.0, 0.0), 1).unwrap().terms[0].d, c(1.0 / PI, 0.0));
        assert!(matches!(make_classical(Classical::NAlpha, 0.0), Err(Error::InvalidAngle(_))));
        assert!(matches!(make_classical(Classical::NAlpha, PI), Err(Error::InvalidAngle(_))));
        let n = make_classical(Classical::NAlpha, 0.7).unwrap();
        assert_eq!(n.terms.len(), 2);
        assert!((n.terms[0].c - C64::from_polar(1.0, 0.7)).norm() < 1e-16);
        assert!((n.terms[1].c - C64::from_polar(1.0, -0.7)).norm() < 1e-16);
        assert!(n.terms.iter().all(|t| t.m == 1));

        let pi_i = C64::new(0.0, PI);
        let k = make_n_mk(0, 0).unwrap();
        assert_eq!(k.terms, vec![PoleTerm::new(c(-1.0, 0.0), 1, 1.0 / pi_i)]);
        let k = make_n_mk(1, 1).unwrap();
        assert_eq!(k.terms, vec![PoleTerm::new(c(-1.0, 0.0), 1, 1.0 / pi_i), PoleTerm::new(c(-1.0, 0.0), 2, -1.0 / pi_i)]);
        let k = make_n_mk(1, 0).unwrap();
        assert_eq!(k.terms, vec![PoleTerm::new(c(-1.0, 0.0), 2, 1.0 / pi_i)]);
        assert!(matches!(make_n_mk(1, 2), Err(Error::IndexRange { .. })));
    }

    #[test]
    fn norm_bound_examples() {
        let sp = SpaceParams::lp(2.0).unwrap();
        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(-1.0, 0.0), 1, c(1.0 / PI, 0.0))]);
        assert!((norm_bound(&k, &sp).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(0.0, 1.0), 1, c(1.0, 0.0))]);
        assert!((norm_bound(&k, &sp).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert_eq!(norm_bound(&MeromorphicKernel::empty(), &sp).unwrap(), 0.0);
        let k = make_power_pole(c(1.0, 0.0), 1).unwrap();
        assert!(matches!(norm_bound(&k, &sp), Err(Error::RealPolePresent(0))));
    }

    #[test]
    fn classical_condition_examples() {
        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(-1.0, 0.0), 1, c(1.0 / PI, 0.0))]);
        assert!(!check_classical_condition(&k, 2.0, 1).unwrap());
        let k = MeromorphicKernel::new(vec![PoleTerm::new(c(-1.0, 0.0), 2, 1.0 / C64::new(0.0, PI))]);
        assert!(check_classical_condition(&k, 2.0, 0).unwrap());
        assert!(check_classical_condition(&MeromorphicKernel::empty(), 3.0, 4).unwrap());
        // N_{m,k} vanishes to order k at 0: the condition holds for m <= k
        let k = make_n_mk(2, 2).unwrap();
        assert!(check_classical_condition(&k, 2.0, 2).unwrap());
        let k = make_n_mk(2, 1).unwrap();
        assert!(!check_classical_condition(&k, 2.0, 2).unwrap());
        let k = make_power_pole(c(3.0, 0.0), 1).unwrap();
        assert!(matches!(check_classical_condition(&k, 2.0, 0), Err(Error::RealPolePresent(0))));
    }

    #[test]
    fn space_params() {
        let sp = SpaceParams::new(3.0, 0.5, 1.0).unwrap();
        assert!((sp.beta - 0.5).abs() < 1e-16);
        assert!(SpaceParams::new(0.5, 0.0, 0.0).is_err());
        assert!(SpaceParams::new(2.0, 1.0, 0.0).is_err());
        assert!(SpaceParams::new(2.0, -1.0, 0.0).is_err());
        let back: SpaceParams = serde_json::from_str(r#"{"p":3.0,"gamma_weight":0.5,"s":1.0}"#).unwrap();
        assert_eq!(back, sp);
    }
}
