//! ζ, the completed zeta Z, the scattering ratios R and φ, Hardy-function
//! zero counting and Hecke L-ratios from ingested Satake parameters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::bernoulli::{b2k, MAX_INDEX};
use crate::numeric::gamma::{digamma, ln_gamma};

/// Exclusion radius around the poles of Z.
pub const POLE_DISK: f64 = 1e-3;
/// Smallest |ζ(s+1)| accepted as a denominator of R.
pub const DENOMINATOR_FLOOR: f64 = 1e-13;
/// Exponent in the a priori bound |α_p| ≤ p^θ for Satake parameters.
pub const RAMANUJAN_EXPONENT: f64 = 5.0 / 28.0;

/// Euler–Maclaurin parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZetaConfig {
    /// Initial cut N.
    pub terms: usize,
    /// Bernoulli depth M.
    pub bernoulli_depth: usize,
    /// Largest N tried before giving up.
    pub max_terms: usize,
    /// Zero-free region width (informational; never asserted).
    pub kappa: f64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        ZetaConfig { terms: 50, bernoulli_depth: 12, max_terms: 200_000, kappa: 0.1 }
    }
}

/// ζ evaluator. Holds the inverse factorial table; cheap to share.
#[derive(Debug, Clone)]
pub struct ZetaEngine {
    config: ZetaConfig,
    // B_{2k} / (2k)!
    coeffs: Vec<f64>,
}

impl Default for ZetaEngine {
    fn default() -> Self {
        Self::new(ZetaConfig::default())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl ZetaEngine {
    pub fn new(config: ZetaConfig) -> Self {
        let depth = config.bernoulli_depth.clamp(1, MAX_INDEX - 1);
        let mut coeffs = Vec::with_capacity(depth + 1);
        let mut fact = 1.0;
        for k in 1..=depth + 1 {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            coeffs.push(b2k(k) / fact);
        }
        ZetaEngine { config: ZetaConfig { bernoulli_depth: depth, ..config }, coeffs }
    }

    pub fn config(&self) -> &ZetaConfig {
        &self.config
    }

    /// ζ(s) with absolute error at most `tol`. The error budget covers both
    /// the Euler–Maclaurin remainder and rounding in the direct sum.
    pub fn zeta(&self, s: Complex64, tol: f64) -> Result<Complex64> {
        Ok(self.evaluate(s, tol, false, true)?.0)
    }

    /// (ζ(s), ζ'(s)) with the same error contract as [`ZetaEngine::zeta`].
    pub fn zeta_and_derivative(&self, s: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
        self.evaluate(s, tol, true, true)
    }

    // Truncation below `tol` or below the rounding floor, whichever is larger.
    fn zeta_best(&self, s: Complex64, deriv: bool) -> Result<(Complex64, Complex64)> {
        self.evaluate(s, 1e-17, deriv, false)
    }

    fn evaluate(&self, s: Complex64, tol: f64, deriv: bool, strict: bool) -> Result<(Complex64, Complex64)> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
        }
        let dist = (s - 1.0).norm();
        if dist < 1e-12 {
            return Err(Error::PoleAtOne { dist });
        }
        let m = self.config.bernoulli_depth;
        // left of the line the terms k^{−s} grow, so rounding favours the
        // smallest N whose remainder is acceptable
        let start = if !strict && s.re < 0.5 { 4 } else { self.config.terms };
        let mut n = start.max((s.norm() / 4.0) as usize).max(2);
        loop {
            let truncation = self.remainder_estimate(s, n, m);
            let floor = rounding_floor(s, n);
            let target = if strict { tol } else { tol.max(floor) };
            if truncation <= target {
                if strict && truncation + floor > tol {
                    return Err(Error::PrecisionUnreachable { tol, budget: n });
                }
                return Ok(self.euler_maclaurin(s, n, m, deriv));
            }
            if n >= self.config.max_terms {
                return Err(Error::PrecisionUnreachable { tol, budget: self.config.max_terms });
            }
            n = (n + n / 2).min(self.config.max_terms);
        }
    }

    // |T_{M+1}| |s + 2M + 1| / (Re s + 2M + 1)
    fn remainder_estimate(&self, s: Complex64, n: usize, m: usize) -> f64 {
        let nf = n as f64;
        let mut p = s.norm();
        for j in 1..=(2 * m) {
            p *= (s + j as f64).norm();
        }
        let sigma = s.re + (2 * m + 1) as f64;
        let term = self.coeffs[m].abs() * p * nf.powf(-s.re - (2 * m + 1) as f64);
        if sigma > 0.0 {
            term * (s + (2 * m + 1) as f64).norm() / sigma
        } else {
            f64::INFINITY
        }
    }

    fn euler_maclaurin(&self, s: Complex64, n: usize, m: usize, deriv: bool) -> (Complex64, Complex64) {
        let mut sum = c(0.0, 0.0);
        let mut dsum = c(0.0, 0.0);
        for k in (1..n).rev() {
            let lk = (k as f64).ln();
            let t = (-s * lk).exp();
            sum += t;
            if deriv {
                dsum -= t * lk;
            }
        }
        let nf = n as f64;
        let ln_n = nf.ln();
        let n_s = (-s * ln_n).exp();
        let sm1 = s - 1.0;
        let head = n_s * nf / sm1;
        sum += head + 0.5 * n_s;
        if deriv {
            dsum += -head * ln_n - head / sm1 - 0.5 * n_s * ln_n;
        }
        // T_k = B_{2k}/(2k)! P_k N^{-s-2k+1},  P_k = s(s+1)...(s+2k-2)
        let mut p = s;
        let mut dp = c(1.0, 0.0);
        let mut pow = n_s / nf;
        for k in 1..=m {
            if k > 1 {
                let a = s + (2 * k - 3) as f64;
                let b = s + (2 * k - 2) as f64;
                dp = dp * a * b + p * (a + b);
                p = p * a * b;
            }
            let coef = self.coeffs[k - 1];
            sum += pow * p * coef;
            if deriv {
                dsum += pow * (dp - p * ln_n) * coef;
            }
            pow /= nf * nf;
        }
        (sum, dsum)
    }

    /// ζ'/ζ(s).
    pub fn zeta_log_derivative(&self, s: Complex64) -> Result<Complex64> {
        let (z, dz) = self.zeta_best(s, true)?;
        Ok(dz / z)
    }

    fn check_z_poles(s: Complex64) -> Result<()> {
        if s.norm() < POLE_DISK || (s - 1.0).norm() < POLE_DISK {
            return Err(Error::PoleAtZeroOrOne { re: s.re, im: s.im });
        }
        Ok(())
    }

    fn gamma_part_ln(s: Complex64) -> Complex64 {
        -0.5 * s * PI.ln() + ln_gamma(s * 0.5)
    }

    /// Z(s) = π^{−s/2} Γ(s/2) ζ(s).
    pub fn completed_zeta(&self, s: Complex64) -> Result<Complex64> {
        Self::check_z_poles(s)?;
        let z = self.zeta_best(s, false)?.0;
        Ok(Self::gamma_part_ln(s).exp() * z)
    }

    /// Z'/Z(s) = −½ ln π + ½ ψ(s/2) + ζ'/ζ(s).
    pub fn completed_log_derivative(&self, s: Complex64) -> Result<Complex64> {
        Self::check_z_poles(s)?;
        Ok(-0.5 * PI.ln() + 0.5 * digamma(s * 0.5) + self.zeta_log_derivative(s)?)
    }

    /// R(s) = Z(s)/Z(s+1). Both factors have a pole at s = 0 but the ratio
    /// does not; there R is the mean over a small circle.
    pub fn scattering_ratio_r(&self, s: Complex64) -> Result<Complex64> {
        if s.norm() < POLE_DISK {
            let r = 10.0 * POLE_DISK;
            let n = 32;
            let mut acc = c(0.0, 0.0);
            for k in 0..n {
                let w = c(0.0, 2.0 * PI * k as f64 / n as f64).exp() * r;
                acc += self.scattering_ratio_r(w)? * w / (w - s);
            }
            return Ok(acc / n as f64);
        }
        Self::check_z_poles(s)?;
        Self::check_z_poles(s + 1.0)?;
        let num = self.zeta_best(s, false)?.0;
        let den = self.zeta_best(s + 1.0, false)?.0;
        if den.norm() < DENOMINATOR_FLOOR {
            return Err(Error::NearZeroDenominator { re: s.re, im: s.im, modulus: den.norm() });
        }
        let gamma_ratio = (Self::gamma_part_ln(s) - Self::gamma_part_ln(s + 1.0)).exp();
        Ok(gamma_ratio * num / den)
    }

    /// R'/R(s) = Z'/Z(s) − Z'/Z(s+1).
    pub fn scattering_ratio_log_derivative(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.completed_log_derivative(s)? - self.completed_log_derivative(s + 1.0)?)
    }

    /// φ(s) = Z(2s−1)/Z(2s).
    pub fn phi_scattering(&self, s: Complex64) -> Result<Complex64> {
        self.scattering_ratio_r(2.0 * s - 1.0)
    }

    /// φ'/φ(1/2 + it) = 2 (Z'/Z(2it) + Z'/Z(−2it)).
    pub fn phi_log_derivative(&self, t: f64) -> Result<Complex64> {
        if t.abs() < 1e-6 {
            return Err(Error::SingularAtZero { t });
        }
        let s = c(0.0, 2.0 * t);
        let half_log_pi = 0.5 * PI.ln();
        let plus = -half_log_pi + 0.5 * digamma(s * 0.5) + self.zeta_log_derivative(s)?;
        let minus = -half_log_pi + 0.5 * digamma(-s * 0.5) + self.zeta_log_derivative(-s)?;
        Ok(2.0 * (plus + minus))
    }

    /// Riemann–Siegel θ(t), continuous in t.
    pub fn hardy_theta(t: f64) -> f64 {
        let a = c(0.25, 0.5 * t);
        (ln_gamma(a + 1.0) - a.ln()).im - 0.5 * t * PI.ln()
    }

    /// Hardy function Z_H(t) = e^{iθ(t)} ζ(1/2 + it), real for real t.
    pub fn hardy_z(&self, t: f64) -> Result<f64> {
        let z = self.zeta_best(c(0.5, t), false)?.0;
        Ok((c(0.0, Self::hardy_theta(t)).exp() * z).re)
    }

    /// Sign changes of Z_H on [center − halfwidth, center + halfwidth] at
    /// resolution 0.01.
    pub fn count_critical_zeros(&self, center: f64, halfwidth: f64) -> Result<ZeroCount> {
        let a = center - halfwidth;
        let b = center + halfwidth;
        if a < 0.0 || !(halfwidth > 0.0) {
            return Err(Error::InvalidArgument(format!("window [{a}, {b}] must lie in [0, inf)")));
        }
        let steps = ((b - a) / ZERO_GRID).round().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let values: Vec<f64> =
            (0..=steps).map(|k| self.hardy_z(a + k as f64 * h)).collect::<Result<Vec<_>>>()?;
        let mut count = 0;
        let mut crossings = Vec::new();
        let mut warnings = Vec::new();
        for k in 0..steps {
            let (y0, y1) = (values[k], values[k + 1]);
            if y0 == 0.0 || y0 * y1 < 0.0 {
                count += 1;
                crossings.push(a + (k as f64 + 0.5) * h);
                continue;
            }
            // a close pair of zeros hides between equal-sign samples as a dip
            let dip = k > 0 && values[k - 1].abs() > y0.abs() && y1.abs() > y0.abs();
            if dip && y0.abs() < 0.1 * values[k - 1].abs().max(y1.abs()) {
                let t0 = a + (k as f64 - 1.0) * h;
                let fine: Vec<f64> =
                    (0..=40).map(|j| self.hardy_z(t0 + j as f64 * h / 20.0)).collect::<Result<_>>()?;
                if fine.windows(2).any(|w| w[0] * w[1] < 0.0) {
                    warnings.push(a + k as f64 * h);
                }
            }
        }
        Ok(ZeroCount { count, crossings, resolution_warnings: warnings })
    }
}

// ε Σ_{n<N} n^{−σ} (1 + |s| ln n), bounded by the integral
fn rounding_floor(s: Complex64, n: usize) -> f64 {
    let nf = n as f64;
    let growth = 1.0 + s.norm() * nf.ln();
    let mass = if (1.0 - s.re).abs() < 1e-9 {
        1.0 + nf.ln()
    } else {
        1.0 + (nf.powf(1.0 - s.re) - 1.0) / (1.0 - s.re)
    };
    f64::EPSILON * mass.max(1.0) * growth
}

/// Sampling step of the sign-change count.
pub const ZERO_GRID: f64 = 0.01;

/// Result of a sign-change count.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Midpoints of the grid cells containing a sign change.
    pub crossings: Vec<f64>,
    /// Heights where two sign changes were found inside a single grid step
    /// (the count above misses them).
    pub resolution_warnings: Vec<f64>,
}

/// Largest count/log H over the calibration heights.
pub fn fit_zero_density_constant(engine: &ZetaEngine, heights: &[f64]) -> Result<f64> {
    let mut kappa: f64 = 0.0;
    for &h in heights {
        let n = engine.count_critical_zeros(h, 1.0)?.count;
        kappa = kappa.max(n as f64 / h.ln());
    }
    Ok(kappa)
}

/// Satake data of an even Maass–Hecke form.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeData {
    pub symbol: String,
    pub nu: Complex64,
    /// (p, α_p) for every prime p ≤ p_max, increasing in p.
    pub alpha: Vec<(u64, Complex64)>,
    pub p_max: u64,
}

impl HeckeData {
    /// Validates coverage of all primes up to `p_max` and the bounds
    /// 0 < |α_p| ≤ p^{5/28}.
    pub fn new(symbol: impl Into<String>, nu: Complex64, mut alpha: Vec<(u64, Complex64)>, p_max: u64) -> Result<Self> {
        alpha.sort_by_key(|(p, _)| *p);
        let expected = primes_up_to(p_max);
        let mut bad = Vec::new();
        let mut message = String::new();
        if alpha.len() != expected.len() || alpha.iter().zip(expected.iter()).any(|(a, p)| a.0 != *p) {
            message = format!("primes do not cover exactly 2..={p_max}");
        }
        for (row, (p, a)) in alpha.iter().enumerate() {
            let bound = (*p as f64).powf(RAMANUJAN_EXPONENT) * (1.0 + 1e-12);
            if !(a.norm() > 0.0) || a.norm() > bound || !crate::is_finite_point(*a) {
                bad.push(row + 1);
            }
        }
        if !bad.is_empty() {
            message = format!("{message} alpha_p outside 0 < |alpha_p| <= p^(5/28)").trim().to_string();
        }
        if !message.is_empty() {
            return Err(Error::ValidationError { rows: bad, message });
        }
        Ok(HeckeData { symbol: symbol.into(), nu, alpha, p_max })
    }

    /// Degenerate data α_p = 1 for all p ≤ p_max with ν = 0.
    pub fn trivial(p_max: u64) -> Self {
        let alpha = primes_up_to(p_max).into_iter().map(|p| (p, c(1.0, 0.0))).collect();
        HeckeData { symbol: "trivial".into(), nu: c(0.0, 0.0), alpha, p_max }
    }
}

/// Value of a truncated Euler-product quantity with a rigorous bound on the
/// omitted primes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bounded {
    pub value: Complex64,
    pub tail_bound: f64,
}

fn check_convergence(s: Complex64) -> Result<()> {
    if s.re < 1.5 {
        return Err(Error::OutsideConvergence { re: s.re });
    }
    Ok(())
}

// Σ_{n>P} n^{θ−σ} ≤ P^{1+θ−σ}/(σ−θ−1), geometric factor for higher prime powers
fn log_tail(sigma: f64, p_max: u64) -> f64 {
    let e = sigma - RAMANUJAN_EXPONENT;
    let p = p_max as f64;
    let geometric = 1.0 / (1.0 - (p + 1.0).powf(-e));
    2.0 * p.powf(1.0 - e) / (e - 1.0) * geometric
}

fn log_derivative_tail(sigma: f64, p_max: u64) -> f64 {
    let e = sigma - RAMANUJAN_EXPONENT;
    let p = p_max as f64;
    let geometric = 1.0 / (1.0 - (p + 1.0).powf(-e)).powi(2);
    2.0 * p.powf(1.0 - e) * (p.ln() / (e - 1.0) + 1.0 / (e - 1.0).powi(2)) * geometric
}

/// ln L(s, φ) from the stored primes.
pub fn hecke_log_l(s: Complex64, data: &HeckeData) -> Result<Bounded> {
    check_convergence(s)?;
    let mut acc = c(0.0, 0.0);
    for &(p, a) in &data.alpha {
        let x = (-s * (p as f64).ln()).exp();
        acc -= (c(1.0, 0.0) - a * x).ln() + (c(1.0, 0.0) - x / a).ln();
    }
    Ok(Bounded { value: acc, tail_bound: log_tail(s.re, data.p_max) })
}

/// L'/L(s, φ) from the stored primes.
pub fn hecke_l_log_derivative(s: Complex64, data: &HeckeData) -> Result<Bounded> {
    check_convergence(s)?;
    let mut acc = c(0.0, 0.0);
    for &(p, a) in &data.alpha {
        let lp = (p as f64).ln();
        let x = (-s * lp).exp();
        let b = a.inv();
        acc -= lp * (a * x / (1.0 - a * x) + b * x / (1.0 - b * x));
    }
    Ok(Bounded { value: acc, tail_bound: log_derivative_tail(s.re, data.p_max) })
}

/// Γ_R'/Γ_R(s) = −½ ln π + ½ ψ(s/2).
pub fn gamma_r_log_derivative(s: Complex64) -> Complex64 {
    -0.5 * PI.ln() + 0.5 * digamma(0.5 * s)
}

fn ln_gamma_r(s: Complex64) -> Complex64 {
    -0.5 * s * PI.ln() + ln_gamma(0.5 * s)
}

/// Λ(s,φ)/Λ(s+1,φ) with Λ(s,φ) = Γ_R(s+ν)Γ_R(s−ν)L(s,φ). Fails when the
/// relative tail bound exceeds `tol`.
pub fn hecke_l_ratio(s: Complex64, data: &HeckeData, tol: f64) -> Result<Bounded> {
    let l0 = hecke_log_l(s, data)?;
    let l1 = hecke_log_l(s + 1.0, data)?;
    let nu = data.nu;
    let gamma = ln_gamma_r(s + nu) + ln_gamma_r(s - nu) - ln_gamma_r(s + 1.0 + nu) - ln_gamma_r(s + 1.0 - nu);
    let value = (gamma + l0.value - l1.value).exp();
    let rel = (l0.tail_bound + l1.tail_bound).exp_m1();
    let bound = rel * value.norm();
    if bound > tol {
        return Err(Error::InsufficientPrimes { bound, tol });
    }
    Ok(Bounded { value, tail_bound: bound })
}

/// Λ'/Λ(s,φ) assembled from the Γ_R digammas and the Dirichlet series.
pub fn hecke_completed_log_derivative(s: Complex64, data: &HeckeData) -> Result<Bounded> {
    let l = hecke_l_log_derivative(s, data)?;
    let g = gamma_r_log_derivative(s + data.nu) + gamma_r_log_derivative(s - data.nu);
    Ok(Bounded { value: g + l.value, tail_bound: l.tail_bound })
}

/// Primes up to n by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k as u64).collect()
}
