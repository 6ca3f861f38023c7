//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::time::Instant;
use symcalc::fredholm::winding_index;
use symcalc::kernel::*;
use symcalc::lab::grid::{Axis, GridFunction};
use symcalc::lab::identities::{check_commutation, check_lifting, standard_test_function, LiftKind};
use symcalc::lab::norm::estimate_operator_norm;
use symcalc::lab::sections::finite_section_solve;
use symcalc::mellin::{mellin_symbol, mellin_symbol_oracle, mellin_symbol_pole};
use symcalc::multiplier::Multiplier;
use symcalc::rectangle::{rectangle_grid, Leg, RectanglePoint};
use symcalc::special::cot_pi;
use symcalc::symbol::{assemble_symbol_bessel, assemble_symbol_lp, OperatorExpression};

// pinned tolerances
const ORACLE_TOL: f64 = 1e-8;
const ORACLE_BUDGET_SECS: f64 = 30.0;
const POLE_VALUE_TOL: f64 = 1e-12;
const PV_VALUE_TOL: f64 = 1e-10;
const COMMUTATION_INT_TOL: f64 = 1e-8;
const COMMUTATION_FRAC_TOL: f64 = 5e-3;
/// Residuals at or below this are round-off and count as converged.
const REFINEMENT_FLOOR: f64 = 1e-12;
const LIFT_K1_TOL: f64 = 1e-6;
const LIFT_K2_TOL: f64 = 1e-5;
const CLOSURE_TOL: f64 = 1e-6;
const SECTION_WELL: f64 = 1e3;
const SECTION_ILL: f64 = 1e6;
const NORM_TOL: f64 = 1e-6;
const TABLE_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn test_kernels() -> Vec<(&'static str, MeromorphicKernel)> {
    vec![
        ("K1_-1", make_power_pole(c(-1.0, 0.0), 1).unwrap()),
        ("K2_-1", make_power_pole(c(-1.0, 0.0), 2).unwrap()),
        ("K1_e^{3pi i/4}", make_power_pole(C64::from_polar(1.0, 0.75 * PI), 1).unwrap()),
        ("N_pi/3", make_classical(Classical::NAlpha, PI / 3.0).unwrap()),
        ("N_1,1", make_n_mk(1, 1).unwrap()),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (name, k) in test_kernels() {
        for beta in [0.3, 0.5, 0.7] {
            for j in 0..21 {
                let xi = -8.0 + 0.8 * j as f64;
                let a = mellin_symbol(&k, beta, xi).map_err(|e| format!("{name}: {e}"))?;
                let b = mellin_symbol_oracle(&k, beta, xi).map_err(|e| format!("{name}: {e}"))?;
                let rel = (a - b).norm() / (1.0 + b.norm());
                if rel > ORACLE_TOL {
                    return Err(format!("{name} beta={beta} xi={xi}: rel err {rel:e}"));
                }
                worst = worst.max(rel);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= ORACLE_BUDGET_SECS {
        return Err(format!("runtime {secs:.1}s"));
    }
    Ok(format!("max rel err {worst:.2e}, {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    let v = mellin_symbol_pole(c(-1.0, 0.0), 1, 0.5, 0.0).map_err(|e| e.to_string())?;
    if (v - 1.0).norm() > POLE_VALUE_TOL {
        return Err(format!("K1_-1 at (1/2, 0) = {v}"));
    }
    let v = mellin_symbol_pole(c(1.0, 0.0), 1, 0.5, 0.0).map_err(|e| e.to_string())?;
    if v.norm() > PV_VALUE_TOL {
        return Err(format!("K1_1 at (1/2, 0) = {v}"));
    }
    // the principal-value quadrature fixes the sign: symbol = -cot(pi(beta - i xi))
    let k = make_power_pole(c(1.0, 0.0), 1).unwrap();
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.5, 0.7] {
        for xi in [-2.0, -0.5, 0.0, 0.5, 2.0] {
            let o = mellin_symbol_oracle(&k, beta, xi).map_err(|e| e.to_string())?;
            let cot = cot_pi(c(beta, -xi));
            let err = (o + cot).norm().max((mellin_symbol(&k, beta, xi).unwrap() - o).norm());
            if err > ORACLE_TOL {
                return Err(format!("PV oracle at beta={beta} xi={xi}: {o} vs -cot {}", -cot));
            }
            worst = worst.max(err);
        }
    }
    let o = mellin_symbol_oracle(&k, 0.5, 0.0).map_err(|e| e.to_string())?;
    if o.norm() > PV_VALUE_TOL {
        return Err(format!("PV oracle at (1/2, 0) = {o}"));
    }
    Ok(format!("PV oracle agrees to {worst:.1e}"))
}

fn gamma0() -> C64 {
    C64::from_polar(1.0, 0.75 * PI)
}

fn settles(r: &[f64]) -> bool {
    r.windows(2).all(|w| w[1] < w[0] || w[1] <= REFINEMENT_FLOOR)
}

fn criterion_3() -> Outcome {
    let ci = c(0.0, 1.0);
    let mut parts = vec![];
    for (s, tol) in [(1.0, COMMUTATION_INT_TOL), (2.0, COMMUTATION_INT_TOL), (-1.5, COMMUTATION_FRAC_TOL)] {
        let mut r = vec![];
        for n in [1usize << 12, 1 << 13, 1 << 14] {
            let phi = standard_test_function(n).map_err(|e| e.to_string())?;
            r.push(check_commutation(ci, s, gamma0(), &phi).map_err(|e| e.to_string())?.rel_residual);
        }
        if r[2] > tol {
            return Err(format!("s={s}: residual {:.2e} at n=2^14", r[2]));
        }
        if !settles(&r) {
            return Err(format!("s={s}: residuals {r:?} do not decrease"));
        }
        parts.push(format!("s={s}: {:.1e}", r[2]));
    }
    Ok(parts.join(", "))
}

fn criterion_4() -> Outcome {
    let phi = standard_test_function(1 << 14).map_err(|e| e.to_string())?;
    let k1 = check_lifting(LiftKind::K1, c(0.0, 1.0), 1.0, gamma0(), &phi).map_err(|e| e.to_string())?;
    let k2 = check_lifting(LiftKind::K2, c(0.0, 1.0), 1.0, gamma0(), &phi).map_err(|e| e.to_string())?;
    if k1.rel_residual > LIFT_K1_TOL || k2.rel_residual > LIFT_K2_TOL {
        return Err(format!("K1 {:.2e}, K2 {:.2e}", k1.rel_residual, k2.rel_residual));
    }
    Ok(format!(
        "K1 {:.1e}, K2 {:.1e} (lower-order term / main term = {:.2})",
        k1.rel_residual,
        k2.rel_residual,
        k2.remainder_norm.unwrap_or(f64::NAN)
    ))
}

fn criterion_5() -> Outcome {
    let grid = rectangle_grid(256);
    let mut cases: Vec<(String, OperatorExpression, f64, i64)> = vec![];
    for p in [1.5, 2.0, 3.0] {
        cases.push((format!("constant p={p}"), OperatorExpression::scalar(c(2.0, -1.0)), p, 0));
        let mellin = [
            make_power_pole(c(-1.0, 0.0), 1).unwrap(),
            make_power_pole(C64::from_polar(1.0, 0.75 * PI), 1).unwrap().scaled(c(0.5, 0.0)),
            make_classical(Classical::NAlpha, PI / 3.0).unwrap(),
        ];
        for (j, k) in mellin.into_iter().enumerate() {
            let e = OperatorExpression::scalar(c(1.0, 0.0)).with_term(None, k, None);
            cases.push((format!("mellin#{j} p={p}"), e, p, 0));
        }
        for n in [-2, -1, 1, 2] {
            let e = OperatorExpression::scalar(c(0.0, 0.0)).with_a0(Multiplier::blaschke(n));
            cases.push((format!("blaschke n={n} p={p}"), e, p, -n as i64));
        }
    }
    let mut worst: f64 = 0.0;
    for (name, e, p, want) in &cases {
        let f = assemble_symbol_lp(e, *p, &grid).map_err(|err| format!("{name}: {err}"))?;
        let w = winding_index(&f).map_err(|err| format!("{name}: {err}"))?;
        if w.index != *want || w.closure_defect > CLOSURE_TOL {
            return Err(format!("{name}: index {} (want {want}), closure {:.1e}", w.index, w.closure_defect));
        }
        worst = worst.max(w.closure_defect);
    }
    Ok(format!("{} fields, max closure defect {worst:.1e}", cases.len()))
}

fn section_cond(d0: f64, n: usize) -> Result<f64, String> {
    let e = OperatorExpression::scalar(c(d0, 0.0)).with_term(None, make_power_pole(c(-1.0, 0.0), 1).unwrap(), None);
    let rhs = GridFunction::from_fn(n, 0.0, 1.0, Axis::LinearHalfline, |t| c((-t).exp(), 0.0)).map_err(|e| e.to_string())?;
    let sp = SpaceParams::lp(2.0).unwrap();
    match finite_section_solve(&e, &sp, &rhs, n) {
        Ok(s) => Ok(s.cond),
        Err(symcalc::Error::SingularSection(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_6() -> Outcome {
    let ns = [64usize, 128, 256, 512];
    let mut well = vec![];
    for &n in &ns {
        well.push(section_cond(1.0, n)?);
    }
    let ill = section_cond(-1.0, 512)?;
    let msg = format!("I+K cond {well:.3?}; -I+K cond at n=512 {ill:.3}");
    if well.iter().any(|&k| !(k < SECTION_WELL)) {
        return Err(msg);
    }
    if !(ill > SECTION_ILL) {
        return Err(format!("{msg} (needs > {SECTION_ILL:e})"));
    }
    Ok(msg)
}

fn criterion_7() -> Outcome {
    let sp = SpaceParams::lp(2.0).unwrap();
    let k = make_power_pole(c(-1.0, 0.0), 1).unwrap();
    let est = estimate_operator_norm(&k, &sp, 8, 0).map_err(|e| e.to_string())?;
    let bound = norm_bound(&k, &sp).map_err(|e| e.to_string())?;
    if (est - 1.0).abs() > NORM_TOL || (bound - 2f64.sqrt()).abs() > 1e-12 || est > bound {
        return Err(format!("K1_-1: estimate {est}, bound {bound}"));
    }
    let mut parts = vec![];
    for (name, k) in test_kernels() {
        let est = estimate_operator_norm(&k, &sp, 8, 0).map_err(|e| format!("{name}: {e}"))?;
        let bound = norm_bound(&k, &sp).map_err(|e| format!("{name}: {e}"))?;
        if est > bound {
            return Err(format!("{name}: estimate {est} > bound {bound}"));
        }
        parts.push(format!("{name} {est:.3}<={bound:.3}"));
    }
    Ok(parts.join(", "))
}

/// Leg values of the Bessel-scale symbols written out independently. The
/// connecting arcs run from the value at +inf (xi = -inf on Gamma1) to the
/// value at -inf, so the cot term enters with the sign opposite to the one
/// used for the xi -> +inf orientation.
mod table {
    use super::*;

    pub fn arc(at_plus: C64, at_minus: C64, beta: f64, xi: f64) -> C64 {
        let cot = symcalc::special::cot_strip(beta, xi);
        0.5 * (at_plus + at_minus) + 0.5 * C64::i() * (at_plus - at_minus) * cot
    }

    fn principal_ratio_pow(eta: f64, gamma: C64, e: f64) -> C64 {
        ((c(eta, 0.0) - gamma) / (c(eta, 0.0) + gamma)).powf(e)
    }

    pub fn identity(s: f64, beta: f64, pt: &RectanglePoint) -> C64 {
        let gamma = C64::i();
        let e2 = C64::from_polar(1.0, 2.0 * PI * s);
        match pt.leg {
            Leg::Gamma1 if pt.coord.is_finite() => {
                let z = c(beta, -pt.coord);
                C64::from_polar(1.0, PI * s) * (PI * (z - s)).sin() / (PI * z).sin()
            }
            Leg::Gamma1 => arc(e2, c(1.0, 0.0), beta, pt.coord),
            Leg::Gamma2Plus => principal_ratio_pow(pt.coord, gamma, -s),
            Leg::Gamma2Minus => e2 * principal_ratio_pow(pt.coord, gamma, s),
            Leg::Gamma3 => C64::from_polar(1.0, PI * s),
        }
    }

    /// a = sign.
    pub fn lifted_sign(s: f64, beta: f64, pt: &RectanglePoint) -> C64 {
        let e2 = C64::from_polar(1.0, 2.0 * PI * s);
        let sg = |x: f64| c(x.signum(), 0.0);
        match pt.leg {
            Leg::Gamma1 => arc(e2, c(-1.0, 0.0), beta, pt.coord),
            Leg::Gamma2Plus => sg(-pt.coord) * identity(s, beta, pt),
            Leg::Gamma2Minus => sg(pt.coord) * identity(s, beta, pt),
            Leg::Gamma3 => C64::from_polar(1.0, PI * s) * arc(c(1.0, 0.0), c(-1.0, 0.0), beta, pt.coord),
        }
    }

    /// b = ((xi - i)/(xi + i))^n, unlifted.
    pub fn blaschke(n: i32, beta: f64, pt: &RectanglePoint) -> C64 {
        let b = |x: f64| (c(x, -1.0) / c(x, 1.0)).powi(n);
        let z0 = c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        match pt.leg {
            Leg::Gamma1 => arc(c(1.0, 0.0), c(1.0, 0.0), beta, pt.coord),
            Leg::Gamma2Plus => b(-pt.coord),
            Leg::Gamma2Minus => b(pt.coord),
            Leg::Gamma3 => arc(z0, z0, beta, pt.coord),
        }
    }

    /// K^1_c for arg c in [-pi, -pi/2); principal branches of c^{-s} and (-c)^delta.
    pub fn pole(cc: C64, s: f64, beta: f64, pt: &RectanglePoint) -> C64 {
        let ln_c = C64::new(cc.norm().ln(), if cc.im == 0.0 && cc.re < 0.0 { -PI } else { cc.arg() });
        let ln_mc = (-cc).ln();
        let z = c(beta, -pt.coord);
        let pre = (-s * ln_c).exp();
        match pt.leg {
            Leg::Gamma2Plus | Leg::Gamma2Minus => c(0.0, 0.0),
            _ if pt.coord.is_infinite() => c(0.0, 0.0),
            Leg::Gamma1 => pre * ((z - 1.0) * ln_mc).exp() / (PI * z).sin(),
            Leg::Gamma3 => pre * ((z + s - 1.0) * ln_mc).exp() / (PI * z).sin(),
        }
    }

    /// K^1_1; on Gamma3 the same Mellin symbol as on Gamma1.
    pub fn cauchy(beta: f64, pt: &RectanglePoint) -> C64 {
        let cot = symcalc::special::cot_strip(beta, pt.coord);
        match pt.leg {
            Leg::Gamma1 | Leg::Gamma3 => -C64::i() * cot,
            Leg::Gamma2Plus => c(1.0, 0.0),
            Leg::Gamma2Minus => c(-1.0, 0.0),
        }
    }
}

fn criterion_8() -> Outcome {
    let grid = rectangle_grid(32);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let cs = [c(-1.0, 0.0), C64::from_polar(1.0, -0.75 * PI)];
    let mut count = 0usize;
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let beta = 1.0 / p;
        for s in [-0.5, 0.0, 1.0] {
            let mut check = |name: &str, e: &OperatorExpression, want: &dyn Fn(&RectanglePoint) -> C64| -> Result<(), String> {
                let f = assemble_symbol_bessel(e, p, s, &grid).map_err(|err| format!("{name}: {err}"))?;
                for (pt, m) in &f.samples {
                    let (got, w) = (m[(0, 0)], want(pt));
                    let err = (got - w).norm() / (1.0 + w.norm());
                    if !(err <= TABLE_TOL) {
                        return Err(format!("{name} p={p} s={s} {} coord={}: {got} vs {w}", pt.leg.name(), pt.coord));
                    }
                    worst = worst.max(err);
                    count += 1;
                }
                Ok(())
            };
            check("identity", &OperatorExpression::scalar(one), &|pt| table::identity(s, beta, pt))?;
            let e = OperatorExpression::scalar(zero).with_a0(Multiplier::sign(one));
            check("lifted multiplier", &e, &|pt| table::lifted_sign(s, beta, pt))?;
            for cc in cs {
                let k = make_power_pole(cc, 1).unwrap();
                let e = OperatorExpression::scalar(zero).with_term(None, k.clone(), None);
                check("pole", &e, &|pt| table::pole(cc, s, beta, pt))?;
                let b = Multiplier::blaschke(1).with_analytic(false, true);
                let e = OperatorExpression::scalar(zero).with_term(None, k, Some(b));
                check("pole x multiplier", &e, &|pt| table::pole(cc, s, beta, pt) * table::blaschke(1, beta, pt))?;
            }
            let k = MeromorphicKernel::new(vec![PoleTerm::new(one, 1, c(0.0, 1.0 / PI))]);
            let e = OperatorExpression::scalar(zero).with_term(None, k, None);
            check("cauchy", &e, &|pt| table::cauchy(beta, pt))?;
        }
    }
    Ok(format!("{count} leg values, max rel err {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("closed form vs quadrature oracle", criterion_1),
        ("exact pole values", criterion_2),
        ("commutation identity", criterion_3),
        ("lifting identities", criterion_4),
        ("index engine", criterion_5),
        ("finite sections", criterion_6),
        ("norm bound consistency", criterion_7),
        ("Bessel-scale symbol table", criterion_8),
    ];
    let mut failed = 0;
    for (j, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {} {name}: PASS ({msg}) [{secs:.1}s]", j + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({msg}) [{secs:.1}s]", j + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
