//! The compactified contour: Gamma1 (xi over the real line), Gamma2+ (eta over
//! the half-line at one end), Gamma3 traversed backwards, Gamma2- closing the loop.
//!
//! Each leg is parameterised by theta with coord = cot(theta), so that the rho
//! distance on a leg is 2|theta1 - theta2|. Arc length runs over [0, 6 pi).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    Gamma1,
    Gamma2Plus,
    Gamma3,
    Gamma2Minus,
}

impl Leg {
    pub fn name(self) -> &'static str {
        match self {
            Leg::Gamma1 => "gamma1",
            Leg::Gamma2Plus => "gamma2_plus",
            Leg::Gamma3 => "gamma3",
            Leg::Gamma2Minus => "gamma2_minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectanglePoint {
    pub leg: Leg,
    /// xi on Gamma1 / Gamma3, eta on Gamma2+-; may be +-inf at corners.
    pub coord: f64,
    pub arclen: f64,
}

pub const TOTAL_LENGTH: f64 = 6.0 * PI;

fn cot(theta: f64) -> f64 {
    if theta <= 0.0 {
        f64::INFINITY
    } else if theta >= PI {
        f64::NEG_INFINITY
    } else {
        theta.cos() / theta.sin()
    }
}

/// Point at a given arc length (taken modulo 6 pi).
pub fn point_at(arclen: f64) -> RectanglePoint {
    let a = arclen.rem_euclid(TOTAL_LENGTH);
    let (leg, theta) = if a < 2.0 * PI {
        (Leg::Gamma1, PI - a / 2.0)
    } else if a < 3.0 * PI {
        (Leg::Gamma2Plus, (a - 2.0 * PI) / 2.0)
    } else if a < 5.0 * PI {
        (Leg::Gamma3, (a - 3.0 * PI) / 2.0)
    } else {
        (Leg::Gamma2Minus, PI / 2.0 - (a - 5.0 * PI) / 2.0)
    };
    // exact zero at leg midpoints keeps symmetric samples symmetric
    let coord = if (theta - PI / 2.0).abs() < 1e-15 { 0.0 } else { cot(theta) };
    RectanglePoint { leg, coord, arclen: a }
}

/// Arc length of (leg, coord); inverse of [`point_at`].
pub fn arclen_of(leg: Leg, coord: f64) -> f64 {
    let theta = if coord == f64::INFINITY {
        0.0
    } else if coord == f64::NEG_INFINITY {
        PI
    } else {
        PI / 2.0 - coord.atan()
    };
    match leg {
        Leg::Gamma1 => 2.0 * (PI - theta),
        Leg::Gamma2Plus => 2.0 * PI + 2.0 * theta,
        Leg::Gamma3 => 3.0 * PI + 2.0 * theta,
        Leg::Gamma2Minus => 5.0 * PI + 2.0 * (PI / 2.0 - theta),
    }
}

/// 4 n uniformly spaced points in arc length, aligned so that xi = 0 on
/// Gamma1 is a grid point.
pub fn rectangle_grid(n_per_leg: usize) -> Vec<RectanglePoint> {
    assert!(n_per_leg >= 8, "n_per_leg must be at least 8");
    let total = 4 * n_per_leg;
    let h = TOTAL_LENGTH / total as f64;
    let k0 = (PI / h).floor();
    let start = PI - k0 * h;
    (0..total).map(|k| point_at(start + k as f64 * h)).collect()
}
