//! Ellipticity, winding number and index of sampled symbols.

use crate::error::{Error, Result};
use crate::rectangle::{Leg, TOTAL_LENGTH};
use crate::symbol::SymbolField;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmOptions {
    pub tol_ell: f64,
    pub closure_tol: f64,
    pub max_depth: u32,
}

impl Default for FredholmOptions {
    fn default() -> Self {
        FredholmOptions { tol_ell: 1e-10, closure_tol: 1e-6, max_depth: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmReport {
    pub min_abs_det: f64,
    pub elliptic: bool,
    /// Absent when the symbol is not elliptic.
    pub winding: Option<i64>,
    pub index: Option<i64>,
    pub local_invertible_at_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub winding: i64,
    pub index: i64,
    /// Accumulated argument over 2 pi.
    pub turns: f64,
    pub closure_defect: f64,
}

/// Minimum of |det| over the samples accepted by `keep`, refined near the
/// minimiser until it is stable to 1%.
fn refined_min(field: &SymbolField, keep: impl Fn(Leg) -> bool) -> Result<f64> {
    let pts: Vec<(f64, f64)> = field
        .samples
        .iter()
        .filter(|(pt, _)| keep(pt.leg))
        .map(|(pt, m)| (pt.arclen, crate::symbol::det(m).norm()))
        .collect();
    let Some(&(a0, v0)) = pts.iter().min_by(|x, y| x.1.partial_cmp(&y.1).unwrap()) else {
        return Ok(f64::INFINITY);
    };
    if field.det_at(0.0).is_none() || pts.len() < 2 {
        return Ok(v0);
    }
    let h = TOTAL_LENGTH / field.samples.len() as f64;
    let (mut centre, mut best, mut half) = (a0, v0, h);
    for _ in 0..60 {
        let mut round_best = (centre, best);
        for j in -4i32..=4 {
            let a = centre + half * j as f64 / 4.0;
            if !keep(crate::rectangle::point_at(a).leg) {
                continue;
            }
            let v = field.det_at(a).unwrap()?.norm();
            if v < round_best.1 {
                round_best = (a, v);
            }
        }
        let prev = best;
        centre = round_best.0;
        best = round_best.1;
        half *= 0.5;
        if (prev - best).abs() <= 0.01 * best || best == 0.0 {
            break;
        }
    }
    Ok(best)
}

pub fn ellipticity(field: &SymbolField) -> Result<(f64, bool)> {
    ellipticity_with(field, &FredholmOptions::default())
}

pub fn ellipticity_with(field: &SymbolField, opt: &FredholmOptions) -> Result<(f64, bool)> {
    let m = refined_min(field, |_| true)?;
    Ok((m, m > opt.tol_ell))
}

pub fn local_invertibility_at_zero(field: &SymbolField) -> Result<bool> {
    local_invertibility_at_zero_with(field, &FredholmOptions::default())
}

pub fn local_invertibility_at_zero_with(field: &SymbolField, opt: &FredholmOptions) -> Result<bool> {
    Ok(refined_min(field, |leg| leg == Leg::Gamma1)? > opt.tol_ell)
}

fn step_arg(field: &SymbolField, a: f64, b: f64, da: C64, db: C64, depth: u32, max_depth: u32) -> Result<f64> {
    let d = (db / da).arg();
    if d.abs() < PI / 2.0 {
        return Ok(d);
    }
    if depth >= max_depth {
        return Err(Error::RefinementExhausted(max_depth));
    }
    let Some(dm) = field.det_at(0.5 * (a + b)) else {
        return Err(Error::RefinementExhausted(depth));
    };
    let dm = dm?;
    Ok(step_arg(field, a, 0.5 * (a + b), da, dm, depth + 1, max_depth)?
        + step_arg(field, 0.5 * (a + b), b, dm, db, depth + 1, max_depth)?)
}

pub fn winding_index(field: &SymbolField) -> Result<Winding> {
    winding_index_with(field, &FredholmOptions::default())
}

/// Winding number of det along the sample order, closing from the last sample
/// back to the first.
pub fn winding_index_with(field: &SymbolField, opt: &FredholmOptions) -> Result<Winding> {
    let dets = field.dets();
    let min = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    if !(min > opt.tol_ell) {
        return Err(Error::NotElliptic(min));
    }
    let n = dets.len();
    let mut total = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        let a = field.samples[i].0.arclen;
        let mut b = field.samples[j].0.arclen;
        if j == 0 {
            b += TOTAL_LENGTH;
        }
        total += step_arg(field, a, b, dets[i], dets[j], 0, opt.max_depth)?;
    }
    let turns = total / (2.0 * PI);
    let winding = turns.round();
    let closure_defect = (turns - winding).abs();
    if closure_defect > opt.closure_tol {
        return Err(Error::RefinementExhausted(opt.max_depth));
    }
    let winding = winding as i64;
    Ok(Winding { winding, index: -winding, turns, closure_defect })
}

pub fn fredholm_report(field: &SymbolField, opt: &FredholmOptions) -> Result<FredholmReport> {
    let (min_abs_det, elliptic) = ellipticity_with(field, opt)?;
    let local = local_invertibility_at_zero_with(field, opt)?;
    let (winding, index) = if elliptic {
        let w = winding_index_with(field, opt)?;
        (Some(w.winding), Some(w.index))
    } else {
        (None, None)
    };
    Ok(FredholmReport { min_abs_det, elliptic, winding, index, local_invertible_at_zero: local })
}
