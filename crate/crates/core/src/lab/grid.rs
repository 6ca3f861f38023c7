//! Uniformly sampled functions on a line, half-line or logarithmic half-line.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    LinearHalfline,
    LinearFullline,
    /// Samples at x = ln t.
    LogHalfline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
    pub axis: Axis,
}

/// Samples at t_min + j h, j < n, h = (t_max - t_min)/n.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub samples: Vec<C64>,
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
    pub axis: Axis,
}

impl GridFunction {
    pub fn new(samples: Vec<C64>, t_min: f64, t_max: f64, axis: Axis) -> Result<Self> {
        let n = samples.len();
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size {n} must be a power of two >= 64")));
        }
        if !(t_max > t_min) {
            return Err(Error::InvalidParameter(format!("empty window [{t_min}, {t_max}]")));
        }
        Ok(GridFunction { samples, t_min, t_max, n, axis })
    }

    pub fn from_fn(n: usize, t_min: f64, t_max: f64, axis: Axis, f: impl Fn(f64) -> C64) -> Result<Self> {
        let h = (t_max - t_min) / n as f64;
        Self::new((0..n).map(|j| f(t_min + j as f64 * h)).collect(), t_min, t_max, axis)
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<C64>) -> Self {
        assert_eq!(samples.len(), self.n);
        GridFunction { samples, ..self.clone() }
    }

    pub fn h(&self) -> f64 {
        (self.t_max - self.t_min) / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta { t_min: self.t_min, t_max: self.t_max, n: self.n, axis: self.axis }
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete L2 norm in the grid variable.
    pub fn norm2(&self) -> f64 {
        (self.h() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// exp(-(ln t - mu)^2 / sigma^2) on t > 0, zero elsewhere.
pub fn log_gaussian(mu: f64, sigma: f64) -> impl Fn(f64) -> C64 {
    move |t: f64| {
        if t <= 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let u = (t.ln() - mu) / sigma;
            C64::new((-u * u).exp(), 0.0)
        }
    }
}

/// Relative L2 distance of a and b over indices where `keep` holds.
pub fn rel_residual(a: &[C64], b: &[C64], keep: impl Fn(usize) -> bool) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..a.len() {
        if keep(j) {
            num += (a[j] - b[j]).norm_sqr();
            den += a[j].norm_sqr();
        }
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}
