//! Piecewise-continuous Fourier multipliers with declared limits at 0 and infinity.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// One-sided limits a(-inf), a(+inf), a(0-), a(0+).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub minus_inf: C64,
    pub plus_inf: C64,
    pub zero_minus: C64,
    pub zero_plus: C64,
}

impl Limits {
    pub fn constant(v: C64) -> Self {
        Limits { minus_inf: v, plus_inf: v, zero_minus: v, zero_plus: v }
    }

    fn map2(self, o: Limits, f: impl Fn(C64, C64) -> C64) -> Self {
        Limits {
            minus_inf: f(self.minus_inf, o.minus_inf),
            plus_inf: f(self.plus_inf, o.plus_inf),
            zero_minus: f(self.zero_minus, o.zero_minus),
            zero_plus: f(self.zero_plus, o.zero_plus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierKind {
    Constant { value: C64 },
    /// ((xi - i)/(xi + i))^n
    BlaschkePower { n: i32 },
    /// coeff * sign(xi)
    Sign { coeff: C64 },
    /// ((xi - gamma1)/(xi + gamma2))^s
    GPower { s: f64, gamma1: C64, gamma2: C64 },
    /// Linear interpolation in xi; outside the table the declared limits apply.
    Table { xi: Vec<f64>, values: Vec<C64>, limits: Limits },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    #[serde(flatten)]
    pub kind: MultiplierKind,
    #[serde(default)]
    pub analytic_lower: bool,
    #[serde(default)]
    pub analytic_upper: bool,
}

/// ((xi - g1)/(xi + g2))^s from principal logarithms, shifted by 2 pi when
/// both g1 and g2 lie in the upper half-plane.
pub fn g_power(s: f64, g1: C64, g2: C64, xi: f64) -> C64 {
    let x = C64::new(xi, 0.0);
    (s * g_power_arg(g1, g2, (x - g1).ln() - (x + g2).ln())).exp()
}

fn g_power_arg(g1: C64, g2: C64, log_ratio: C64) -> C64 {
    if g1.im > 0.0 && g2.im > 0.0 {
        log_ratio + 2.0 * PI * I
    } else {
        log_ratio
    }
}

fn g_power_limit(s: f64, g1: C64, g2: C64, minus: bool) -> C64 {
    if !minus {
        return (s * g_power_arg(g1, g2, C64::new(0.0, 0.0))).exp();
    }
    let a1 = if g1.im > 0.0 { -PI } else { PI };
    let a2 = if g2.im < 0.0 { -PI } else { PI };
    (s * g_power_arg(g1, g2, C64::new(0.0, a1 - a2))).exp()
}

impl Multiplier {
    pub fn new(kind: MultiplierKind) -> Self {
        Multiplier { kind, analytic_lower: false, analytic_upper: false }
    }

    pub fn constant(v: C64) -> Self {
        Self::new(MultiplierKind::Constant { value: v })
    }

    pub fn blaschke(n: i32) -> Self {
        Self::new(MultiplierKind::BlaschkePower { n })
    }

    pub fn sign(coeff: C64) -> Self {
        Self::new(MultiplierKind::Sign { coeff })
    }

    pub fn g_power(s: f64, gamma1: C64, gamma2: C64) -> Self {
        Self::new(MultiplierKind::GPower { s, gamma1, gamma2 })
    }

    pub fn table(xi: Vec<f64>, values: Vec<C64>, limits: Limits) -> Result<Self> {
        if xi.len() != values.len() || xi.len() < 2 {
            return Err(Error::InvalidParameter("table needs matching xi/values of length >= 2".into()));
        }
        if xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("table xi must be strictly increasing".into()));
        }
        Ok(Self::new(MultiplierKind::Table { xi, values, limits }))
    }

    pub fn with_analytic(mut self, lower: bool, upper: bool) -> Self {
        self.analytic_lower = lower;
        self.analytic_upper = upper;
        self
    }

    /// Pointwise value; at xi = 0 a jump is reported as its midpoint.
    pub fn eval(&self, xi: f64) -> C64 {
        if xi.is_infinite() {
            let l = self.limits();
            return if xi > 0.0 { l.plus_inf } else { l.minus_inf };
        }
        match &self.kind {
            MultiplierKind::Constant { value } => *value,
            MultiplierKind::BlaschkePower { n } => ((C64::new(xi, -1.0)) / C64::new(xi, 1.0)).powi(*n),
            MultiplierKind::Sign { coeff } => *coeff * xi.signum() * if xi == 0.0 { 0.0 } else { 1.0 },
            MultiplierKind::GPower { s, gamma1, gamma2 } => g_power(*s, *gamma1, *gamma2, xi),
            MultiplierKind::Table { xi: xs, values, limits } => {
                if xi < xs[0] {
                    return if xi < 0.0 { limits.minus_inf } else { limits.zero_plus };
                }
                if xi > xs[xs.len() - 1] {
                    return if xi > 0.0 { limits.plus_inf } else { limits.zero_minus };
                }
                let j = xs.partition_point(|&x| x <= xi).clamp(1, xs.len() - 1);
                let w = (xi - xs[j - 1]) / (xs[j] - xs[j - 1]);
                values[j - 1] * (1.0 - w) + values[j] * w
            }
        }
    }

    pub fn limits(&self) -> Limits {
        match &self.kind {
            MultiplierKind::Constant { value } => Limits::constant(*value),
            MultiplierKind::BlaschkePower { n } => {
                let z = if n % 2 == 0 { 1.0 } else { -1.0 };
                Limits {
                    minus_inf: C64::new(1.0, 0.0),
                    plus_inf: C64::new(1.0, 0.0),
                    zero_minus: C64::new(z, 0.0),
                    zero_plus: C64::new(z, 0.0),
                }
            }
            MultiplierKind::Sign { coeff } => Limits {
                minus_inf: -*coeff,
                plus_inf: *coeff,
                zero_minus: -*coeff,
                zero_plus: *coeff,
            },
            MultiplierKind::GPower { s, gamma1, gamma2 } => {
                let z = g_power(*s, *gamma1, *gamma2, 0.0);
                Limits {
                    minus_inf: g_power_limit(*s, *gamma1, *gamma2, true),
                    plus_inf: g_power_limit(*s, *gamma1, *gamma2, false),
                    zero_minus: z,
                    zero_plus: z,
                }
            }
            MultiplierKind::Table { limits, .. } => *limits,
        }
    }

    /// Probes eval at |xi| = 1e6 and 1e-6 against the declared limits.
    pub fn validate_limits(&self) -> Result<()> {
        let l = self.limits();
        let probes = [
            (-1e6, l.minus_inf, "minus_inf"),
            (1e6, l.plus_inf, "plus_inf"),
            (-1e-6, l.zero_minus, "zero_minus"),
            (1e-6, l.zero_plus, "zero_plus"),
        ];
        for (xi, lim, name) in probes {
            let v = self.eval(xi);
            if (v - lim).norm() > 1e-4 {
                return Err(Error::InvalidParameter(format!(
                    "multiplier limit {name} = {lim} but eval({xi:e}) = {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Limits of the pointwise product a b.
pub fn product_limits(a: &Multiplier, b: &Multiplier) -> Limits {
    a.limits().map2(b.limits(), |x, y| x * y)
}

/// The arc joining g_minus to g_plus through the cot of the strip line 1/p.
pub fn connecting_function(g_minus: C64, g_plus: C64, p: f64, xi: f64) -> C64 {
    let cot = crate::special::cot_strip(1.0 / p, xi);
    0.5 * (g_plus + g_minus) - 0.5 * I * (g_plus - g_minus) * cot
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn connecting_examples() {
        let v = c(0.3, -2.0);
        assert!((connecting_function(v, v, 3.0, 1.7) - v).norm() < 1e-15);
        assert!(connecting_function(c(1.0, 0.0), c(-1.0, 0.0), 2.0, 0.0).norm() < 1e-15);
        let (gm, gp) = (c(2.0, 1.0), c(-0.5, 0.25));
        assert!((connecting_function(gm, gp, 1.5, 50.0) - gp).norm() < 1e-12);
        assert!((connecting_function(gm, gp, 1.5, -50.0) - gm).norm() < 1e-12);
    }

    #[test]
    fn declared_limits_match() {
        let ms = [
            Multiplier::constant(c(2.0, 1.0)),
            Multiplier::blaschke(3),
            Multiplier::blaschke(-2),
            Multiplier::sign(c(0.0, 1.0)),
            Multiplier::g_power(0.3, c(0.0, 1.0), c(0.0, 1.0)),
            Multiplier::g_power(-1.5, c(-0.7, -0.7), c(-0.7, 0.7)),
            Multiplier::g_power(0.4, c(0.5, -1.0), c(0.2, -0.3)),
        ];
        for m in &ms {
            m.validate_limits().unwrap();
        }
    }

    #[test]
    fn design_branch_endpoints() {
        let s = 0.37;
        let m = Multiplier::g_power(s, c(0.0, 1.0), c(0.0, 1.0));
        let l = m.limits();
        assert!((l.minus_inf - 1.0).norm() < 1e-15);
        assert!((l.plus_inf - (2.0 * PI * s * I).exp()).norm() < 1e-14);
        assert!((m.eval(0.0) - (PI * s * I).exp()).norm() < 1e-14);
    }

    #[test]
    fn table_interpolates() {
        let m = Multiplier::table(vec![-1.0, 1.0], vec![c(0.0, 0.0), c(2.0, 0.0)], Limits::constant(c(1.0, 0.0)))
            .unwrap();
        assert_eq!(m.eval(0.5), c(1.5, 0.0));
        assert_eq!(m.eval(5.0), c(1.0, 0.0));
    }

    #[test]
    fn json_roundtrip() {
        let m = Multiplier::g_power(0.5, c(0.0, 1.0), c(0.0, 1.0)).with_analytic(true, false);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\":\"g_power\""), "{s}");
        let back: Multiplier = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let b: Multiplier = serde_json::from_str(r#"{"kind":"blaschke_power","n":2}"#).unwrap();
        assert_eq!(b, Multiplier::blaschke(2));
    }
}
