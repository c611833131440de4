//! Complex log-gamma and digamma.
//!
//! Both use an upward shift until |z| >= 15, a Stirling-type asymptotic
//! series, and reflection for Re z < 1/2. The branch of `ln_gamma` is the
//! one continuous in z off the non-positive real axis.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::bernoulli::b2k;

const SHIFT_RADIUS: f64 = 15.0;
const TERMS: usize = 10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ln Γ(z).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ln Γ(z) = ln π − ln sin(πz) − ln Γ(1 − z)
        return c(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(c(1.0, 0.0) - z);
    }
    let mut z = z;
    let mut shift = c(0.0, 0.0);
    while z.norm() < SHIFT_RADIUS {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = c(0.0, 0.0);
    let mut pow = inv;
    for k in 1..=TERMS {
        series += pow * (b2k(k) / ((2 * k) as f64 * (2 * k - 1) as f64));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Γ(z); infinite at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// 1/Γ(z), exactly zero at the non-positive integers.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return c(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

/// ψ(z) = Γ'/Γ(z).
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return digamma(c(1.0, 0.0) - z) - PI * cot_pi(z);
    }
    let mut z = z;
    let mut shift = c(0.0, 0.0);
    while z.norm() < SHIFT_RADIUS {
        shift += z.inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = c(0.0, 0.0);
    let mut pow = inv2;
    for k in 1..=TERMS {
        series += pow * (b2k(k) / (2 * k) as f64);
        pow *= inv2;
    }
    z.ln() - 0.5 * inv - series - shift
}

/// ln sin(πz), stable for large |Im z|.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = c(0.0, 1.0);
    if w.im >= 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) i/2
        -i * w + c(0.0, 0.5).ln() + (c(1.0, 0.0) - (2.0 * i * w).exp()).ln()
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) (-i/2)
        i * w + c(0.0, -0.5).ln() + (c(1.0, 0.0) - (-2.0 * i * w).exp()).ln()
    }
}

/// cot(πz), stable for large |Im z|.
pub fn cot_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = c(0.0, 1.0);
    if w.im >= 0.0 {
        let q = (2.0 * i * w).exp();
        i * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-2.0 * i * w).exp();
        i * (1.0 + q) / (1.0 - q)
    }
}

/// Real-argument log-gamma for positive x.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(c(x, 0.0)).re
}
