//! Overflow-free trigonometry of pi*z for z far from the real axis, plus a
//! few complex helpers.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// cot(pi z). Stable for any |Im z|.
pub fn cot_pi(z: C64) -> C64 {
    if z.im >= 0.0 {
        // |e^{2 i pi z}| <= 1
        let q = (2.0 * I * PI * z).exp();
        I * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-2.0 * I * PI * z).exp();
        I * (1.0 + q) / (1.0 - q)
    }
}

/// log(1 / sin(pi z)) up to a multiple of 2 pi i.
pub fn ln_inv_sin_pi(z: C64) -> C64 {
    if z.im <= 0.0 {
        let q = (-2.0 * I * PI * z).exp();
        (2.0 * I).ln() - I * PI * z - (1.0 - q).ln()
    } else {
        let q = (2.0 * I * PI * z).exp();
        (-2.0 * I).ln() + I * PI * z - (1.0 - q).ln()
    }
}

/// 1 / sin(pi z); underflows gracefully to 0 for large |Im z|.
pub fn inv_sin_pi(z: C64) -> C64 {
    ln_inv_sin_pi(z).exp()
}

/// cot(pi (beta - i xi)) with the limits +-i at xi = +-inf.
pub fn cot_strip(beta: f64, xi: f64) -> C64 {
    if xi == f64::INFINITY {
        I
    } else if xi == f64::NEG_INFINITY {
        -I
    } else {
        cot_pi(C64::new(beta, -xi))
    }
}

/// Generalised binomial coefficient binom(z, k).
pub fn binom(z: C64, k: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..k {
        acc *= (z - j as f64) / (j + 1) as f64;
    }
    acc
}

/// Principal power with a caller-supplied logarithm of the base.
pub fn pow_with_log(log_base: C64, e: C64) -> C64 {
    (e * log_base).exp()
}
