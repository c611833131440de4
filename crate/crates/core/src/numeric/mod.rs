//! Special functions and quadrature rules shared by all modules.

pub mod bernoulli;
pub mod chebyshev;
pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::bessel_k;
pub use gamma::{digamma, gamma, ln_gamma, recip_gamma};
pub use quad::{integrate, Estimate, QuadValue, Tolerance};

use crate::error::{Error, Result};

/// Three-point Richardson extrapolation of f(h) = L + a h^p + b h^{2p}
/// sampled at geometrically spaced steps.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Extrapolation {
    pub limit: num_complex::Complex64,
    /// |difference between the two highest-order estimates|
    pub error: f64,
    /// Observed order from successive differences.
    pub observed_order: f64,
}

/// Extrapolate samples `values[k] = f(h0 r^k)` (k = 0, 1, 2) assuming an
/// expansion in integer powers of h starting at h^1.
pub fn richardson3(values: [num_complex::Complex64; 3], ratio: f64) -> Result<Extrapolation> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!("step ratio {ratio} not in (0,1)")));
    }
    let d1 = values[1] - values[0];
    let d2 = values[2] - values[1];
    let observed_order = if d1.norm() > 0.0 && d2.norm() > 0.0 {
        (d2.norm() / d1.norm()).ln() / ratio.ln()
    } else {
        f64::INFINITY
    };
    // eliminate h, then h^2
    let r = ratio;
    let a01 = (values[1] - values[0] * r) / (1.0 - r);
    let a12 = (values[2] - values[1] * r) / (1.0 - r);
    let r2 = r * r;
    let limit = (a12 - a01 * r2) / (1.0 - r2);
    Ok(Extrapolation { limit, error: (limit - a12).norm(), observed_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn richardson_recovers_quadratic_model() {
        let f = |h: f64| Complex64::new(2.0 + 3.0 * h - 5.0 * h * h, -1.0 + h);
        let e = richardson3([f(1e-2), f(1e-3), f(1e-4)], 0.1).unwrap();
        assert!((e.limit - Complex64::new(2.0, -1.0)).norm() < 1e-13);
        assert!((e.observed_order - 1.0).abs() < 0.01);
    }
}
