//! Eisenstein series for SL2(Z), its truncation and the Maass–Selberg
//! relations.
//!
//! E_s(z) = v^s + φ(s) v^{1−s}
//!        + (4/Z(2s)) Σ_{n≥1} n^{s−1/2} σ_{1−2s}(n) √v K_{s−1/2}(2πnv) cos(2πnu)
//!
//! with Z the completed zeta function. The constant term is the one the
//! Maass–Selberg formulas use; the factor ½ sometimes placed in front of the
//! lattice sum is absorbed into this normalization.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::bessel::bessel_k;
use crate::numeric::chebyshev::PiecewiseChebyshev;
use crate::numeric::quad::{integrate, Tolerance};
use crate::selberg_transform::TransformTable;
use crate::sl2_geometry::{integrate_domain, reduce, DomainQuadrature, UpperHalfPoint};
use crate::zeta_toolkit::{ZetaEngine, POLE_DISK};

/// Default tolerance on the dropped Fourier tail, relative to max(1, |c(v, s)|).
pub const DEPTH_TOL: f64 = 1e-12;
/// Height above the truncation parameter where quadrature over F stops.
pub const QUADRATURE_HEADROOM: f64 = 8.0;
/// Smallest allowed |denominator| in the four-term formula.
pub const DENOMINATOR_GAP: f64 = 1e-6;
/// Below this |t| the critical-line value comes from an even series in t.
pub const CRITICAL_SERIES_RADIUS: f64 = 1e-3;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Σ_{d | n} d^{e}.
pub fn divisor_sum(n: u64, e: Complex64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += (e * (d as f64).ln()).exp();
            let q = n / d;
            if q != d {
                acc += (e * (q as f64).ln()).exp();
            }
        }
        d += 1;
    }
    acc
}

/// Fourier data of E_s up to a fixed depth.
#[derive(Debug, Clone)]
pub struct EisensteinEvaluator {
    pub s: Complex64,
    pub depth: usize,
    pub phi: Complex64,
    // coefficient of √v K_{s−1/2}(2πnv) cos(2πnu), index n − 1; one extra
    // entry for the tail estimate
    coeffs: Vec<Complex64>,
    modes: Option<ModeCache>,
}

// e^{x} K_{s−1/2}(x) at x = 2πnv, interpolated in log v for each n
#[derive(Debug, Clone)]
struct ModeCache {
    lo: f64,
    hi: f64,
    re: Vec<PiecewiseChebyshev>,
    im: Vec<PiecewiseChebyshev>,
}

fn pole_error(s: Complex64) -> Error {
    Error::PoleOfEisenstein { re: s.re, im: s.im }
}

impl EisensteinEvaluator {
    pub fn new(engine: &ZetaEngine, s: Complex64, depth: usize) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidArgument("Fourier depth must be at least 1".into()));
        }
        if (s - 1.0).norm() < POLE_DISK {
            return Err(pole_error(s));
        }
        let phi = engine.phi_scattering(s).map_err(|e| match e {
            Error::PoleAtZeroOrOne { .. } => pole_error(s),
            other => other,
        })?;
        let z2s = engine.completed_zeta(2.0 * s).map_err(|e| match e {
            Error::PoleAtZeroOrOne { .. } => pole_error(s),
            other => other,
        })?;
        let scale = 4.0 / z2s;
        let coeffs = (1..=depth as u64 + 1)
            .map(|n| scale * ((s - 0.5) * (n as f64).ln()).exp() * divisor_sum(n, 1.0 - 2.0 * s))
            .collect();
        Ok(EisensteinEvaluator { s, depth, phi, coeffs, modes: None })
    }

    /// Depth for which the dropped tail at heights ≥ v_min is below
    /// `tol`·max(1, |c(v_min, s)|).
    pub fn auto(engine: &ZetaEngine, s: Complex64, v_min: f64, tol: f64) -> Result<Self> {
        let mut depth = 4;
        loop {
            let ev = Self::new(engine, s, depth)?;
            if ev.tail_bound(v_min) <= tol * ev.constant_term(v_min).norm().max(1.0) {
                return Ok(ev);
            }
            if depth > 4096 {
                return Err(Error::DepthInsufficient { depth, tail: ev.tail_bound(v_min) });
            }
            depth = (depth as f64 * 1.5).ceil() as usize;
        }
    }

    /// Interpolates the Bessel factors on v ∈ [v_lo, v_hi]; evaluations in
    /// that range then cost one barycentric sum per mode.
    pub fn with_mode_cache(mut self, v_lo: f64, v_hi: f64, tol: f64) -> Self {
        let nu = self.s - 0.5;
        let (lo, hi) = (v_lo.ln(), v_hi.ln());
        let mut re = Vec::with_capacity(self.depth);
        let mut im = Vec::with_capacity(self.depth);
        for n in 1..=self.depth {
            // beyond x = 700 the mode is below e^{−700} and is dropped
            let top = hi.min((700.0 / (2.0 * PI * n as f64)).ln());
            if top <= lo {
                break;
            }
            let scaled = |y: f64| {
                let x = 2.0 * PI * n as f64 * y.exp();
                bessel_k(nu, x) * x.exp()
            };
            re.push(PiecewiseChebyshev::adaptive(|y| scaled(y).re, lo, top, 24, tol, 14));
            if nu.im == 0.0 {
                im.push(PiecewiseChebyshev::adaptive(|_| 0.0, lo, top, 1, 1.0, 0));
            } else {
                im.push(PiecewiseChebyshev::adaptive(|y| scaled(y).im, lo, top, 24, tol, 14));
            }
        }
        self.modes = Some(ModeCache { lo, hi, re, im });
        self
    }

    /// c(v, s) = v^s + φ(s) v^{1−s}.
    pub fn constant_term(&self, v: f64) -> Complex64 {
        let lv = v.ln();
        (self.s * lv).exp() + self.phi * ((1.0 - self.s) * lv).exp()
    }

    /// Bound on the terms n > depth at height v, using |K_ν(x)| ≤ K_{Re ν}(x)
    /// and the geometric decay of consecutive terms.
    pub fn tail_bound(&self, v: f64) -> f64 {
        let n = self.depth + 1;
        let x = 2.0 * PI * n as f64 * v;
        let k = bessel_k(c((self.s.re - 0.5).abs(), 0.0), x).re;
        let ratio = (-2.0 * PI * v).exp() * ((n + 1) as f64 / n as f64).powf(3.0 * (self.s.re - 0.5).abs() + 1.0);
        self.coeffs[self.depth].norm() * v.sqrt() * k / (1.0 - ratio).max(1e-3)
    }

    /// Σ_{n ≤ depth} of the non-constant terms at z, with no reduction.
    pub fn nonconstant(&self, z: UpperHalfPoint) -> Complex64 {
        let nu = self.s - 0.5;
        let sv = z.v.sqrt();
        let mut acc = c(0.0, 0.0);
        if let Some(m) = &self.modes {
            let y = z.v.ln();
            if y >= m.lo && y <= m.hi {
                for n in 1..=m.re.len() {
                    if y > m.re[n - 1].hi {
                        break;
                    }
                    let x = 2.0 * PI * n as f64 * z.v;
                    let k = c(m.re[n - 1].eval(y), m.im[n - 1].eval(y)) * (-x).exp();
                    acc += self.coeffs[n - 1] * k * (2.0 * PI * n as f64 * z.u).cos();
                }
                return acc * sv;
            }
        }
        for n in 1..=self.depth {
            let x = 2.0 * PI * n as f64 * z.v;
            if x > 745.0 {
                break;
            }
            acc += self.coeffs[n - 1] * bessel_k(nu, x) * (2.0 * PI * n as f64 * z.u).cos();
        }
        acc * sv
    }

    /// Truncated Fourier expansion at z as given, without reduction.
    pub fn fourier_value(&self, z: UpperHalfPoint) -> Complex64 {
        self.constant_term(z.v) + self.nonconstant(z)
    }

    /// E_s(z), evaluated at the reduced representative of z.
    pub fn value(&self, z: UpperHalfPoint) -> Result<Complex64> {
        let (w, _) = reduce(z)?;
        let tail = self.tail_bound(w.v);
        let c0 = self.constant_term(w.v);
        if tail > DEPTH_TOL * c0.norm().max(1.0) {
            return Err(Error::DepthInsufficient { depth: self.depth, tail });
        }
        Ok(c0 + self.nonconstant(w))
    }

    /// Λ^C E_s(z): the constant term is removed on v > C in the fundamental
    /// domain, and the result extended by automorphy.
    pub fn truncated(&self, z: UpperHalfPoint, c_height: f64) -> Result<Complex64> {
        let (w, _) = reduce(z)?;
        let full = self.value(w)?;
        Ok(if w.v > c_height { full - self.constant_term(w.v) } else { full })
    }

    // on a point already in the fundamental domain
    fn truncated_reduced(&self, w: UpperHalfPoint, c_height: f64) -> Complex64 {
        let nc = self.nonconstant(w);
        if w.v > c_height {
            nc
        } else {
            nc + self.constant_term(w.v)
        }
    }
}

/// Depth needed anywhere in the fundamental domain (v ≥ √3/2).
pub fn default_evaluator(engine: &ZetaEngine, s: Complex64) -> Result<EisensteinEvaluator> {
    EisensteinEvaluator::auto(engine, s, 0.75f64.sqrt(), DEPTH_TOL)
}

/// Evaluator for the fundamental domain up to height `top`, with cached
/// Bessel factors.
pub fn cached_evaluator(engine: &ZetaEngine, s: Complex64, top: f64, tol: f64) -> Result<EisensteinEvaluator> {
    let v_min = 0.75f64.sqrt();
    Ok(EisensteinEvaluator::auto(engine, s, v_min, DEPTH_TOL)?.with_mode_cache(v_min * (1.0 - 1e-9), top.max(1.0), tol))
}

/// E_s(z) with `depth` Fourier terms.
pub fn eisenstein_value(engine: &ZetaEngine, z: UpperHalfPoint, s: Complex64, depth: usize) -> Result<Complex64> {
    EisensteinEvaluator::new(engine, s, depth)?.value(z)
}

/// Λ^C E_s(z) with `depth` Fourier terms.
pub fn truncated_value(engine: &ZetaEngine, z: UpperHalfPoint, s: Complex64, c_height: f64, depth: usize) -> Result<Complex64> {
    EisensteinEvaluator::new(engine, s, depth)?.truncated(z, c_height)
}

#[derive(Debug, Clone, Serialize)]
pub struct MaassSelbergResult {
    pub closed_form: Complex64,
    pub quadrature: Option<Complex64>,
    /// |closed_form − quadrature| when a quadrature was run.
    pub discrepancy: Option<f64>,
    /// Bound on the part of the integral above the quadrature height.
    pub tail_bound: Option<f64>,
    pub c: f64,
    pub s1: Complex64,
    pub s2: Complex64,
}

impl MaassSelbergResult {
    fn closed(closed_form: Complex64, c: f64, s1: Complex64, s2: Complex64) -> Self {
        MaassSelbergResult { closed_form, quadrature: None, discrepancy: None, tail_bound: None, c, s1, s2 }
    }

    pub fn relative_discrepancy(&self) -> Option<f64> {
        self.discrepancy.map(|d| d / self.closed_form.norm())
    }
}

/// Four-term Maass–Selberg value of ∫_F Λ^C E_{s1} Λ^C E_{s2} dA.
pub fn maass_selberg_general(engine: &ZetaEngine, s1: Complex64, s2: Complex64, c_height: f64) -> Result<MaassSelbergResult> {
    if !(c_height >= 1.0) {
        return Err(Error::InvalidArgument(format!("truncation height {c_height} must be >= 1")));
    }
    let a = s1 + s2 - 1.0;
    let b = s1 - s2;
    let denominator = a.norm().min(b.norm());
    if denominator < DENOMINATOR_GAP {
        return Err(Error::RemovableSingularity { denominator });
    }
    let p1 = engine.phi_scattering(s1)?;
    let p2 = engine.phi_scattering(s2)?;
    let lc = c_height.ln();
    let pw = |e: Complex64| (e * lc).exp();
    let value = pw(a) / a + p2 * pw(b) / b - p1 * pw(-b) / b - p1 * p2 * pw(-a) / a;
    Ok(MaassSelbergResult::closed(value, c_height, s1, s2))
}

fn critical_direct(engine: &ZetaEngine, t: f64, c_height: f64) -> Result<f64> {
    let lc = c_height.ln();
    let phi_plus = engine.phi_scattering(c(0.5, t))?;
    // C^{2it} φ(1/2 − it) − conj(·) = 2i Im(·)
    let f = c(0.0, 2.0 * t * lc).exp() * phi_plus.conj();
    let bracket = f.im / t;
    let dlog = engine.phi_log_derivative(t)?;
    Ok(2.0 * lc - dlog.re + bracket)
}

/// ∫_F |Λ^C E_{1/2+it}|² dA in closed form. For |t| below
/// CRITICAL_SERIES_RADIUS the value is the even quartic in t through the
/// values at h, 2h, 3h.
pub fn maass_selberg_critical(engine: &ZetaEngine, t: f64, c_height: f64) -> Result<MaassSelbergResult> {
    if !(c_height >= 1.0) {
        return Err(Error::InvalidArgument(format!("truncation height {c_height} must be >= 1")));
    }
    let value = if t.abs() >= CRITICAL_SERIES_RADIUS {
        critical_direct(engine, t, c_height)?
    } else {
        let h = CRITICAL_SERIES_RADIUS;
        let m1 = critical_direct(engine, h, c_height)?;
        let m2 = critical_direct(engine, 2.0 * h, c_height)?;
        let m3 = critical_direct(engine, 3.0 * h, c_height)?;
        // Lagrange in x = t² through x = h², 4h², 9h²
        let x = t * t / (h * h);
        let l1 = (x - 4.0) * (x - 9.0) / 24.0;
        let l2 = (x - 1.0) * (x - 9.0) / -15.0;
        let l3 = (x - 1.0) * (x - 4.0) / 40.0;
        l1 * m1 + l2 * m2 + l3 * m3
    };
    Ok(MaassSelbergResult::closed(c(value, 0.0), c_height, c(0.5, t), c(0.5, -t)))
}

/// Quadrature settings for integrals over F.
#[derive(Debug, Clone)]
pub struct FundamentalQuadrature {
    pub tol: f64,
    pub headroom: f64,
    pub periodic_nodes: usize,
    /// Relative accuracy of the interpolated Bessel factors.
    pub mode_tol: f64,
}

impl Default for FundamentalQuadrature {
    fn default() -> Self {
        FundamentalQuadrature { tol: 1e-7, headroom: QUADRATURE_HEADROOM, periodic_nodes: 48, mode_tol: 1e-13 }
    }
}

fn domain_options(c_height: f64, q: &FundamentalQuadrature) -> DomainQuadrature {
    let mut opts = DomainQuadrature::new(c_height + q.headroom, q.tol);
    opts.v_breaks = vec![c_height];
    opts.periodic_nodes = Some(q.periodic_nodes);
    opts
}

// product of two non-constant parts integrated over v > top, bounded by the
// leading modes: ∫_{top}^∞ |a_1 b_1| v K K dv/v² with K ≤ e^{−2πv}·√(π/(4πv))
fn headroom_tail(e1: &EisensteinEvaluator, e2: &EisensteinEvaluator, top: f64) -> f64 {
    let k1 = bessel_k(c((e1.s.re - 0.5).abs(), 0.0), 2.0 * PI * top).re;
    let k2 = bessel_k(c((e2.s.re - 0.5).abs(), 0.0), 2.0 * PI * top).re;
    let lead = e1.coeffs[0].norm() * e2.coeffs[0].norm();
    4.0 * lead * k1 * k2 / top
}

/// ∫_F Λ^C E_{s1} · Λ^C E_{s2} dA (no conjugation) by quadrature up to
/// height C + headroom. With `one_sided`, E_{s2} is left untruncated.
pub fn maass_selberg_quadrature(
    engine: &ZetaEngine,
    s1: Complex64,
    s2: Complex64,
    c_height: f64,
    q: &FundamentalQuadrature,
    one_sided: bool,
) -> Result<(Complex64, f64)> {
    let opts = domain_options(c_height, q);
    let e1 = cached_evaluator(engine, s1, opts.top, q.mode_tol)?;
    let e2 = cached_evaluator(engine, s2, opts.top, q.mode_tol)?;
    let est = integrate_domain(
        |w: UpperHalfPoint| {
            let a = e1.truncated_reduced(w, c_height);
            let b = if one_sided { e2.fourier_value(w) } else { e2.truncated_reduced(w, c_height) };
            a * b
        },
        &opts,
    )?;
    // above C the constant term of E_{s2} integrates to zero against Λ^C E_{s1}
    Ok((est.value, headroom_tail(&e1, &e2, opts.top)))
}

/// Four-term value together with a quadrature cross-check.
pub fn maass_selberg_general_checked(
    engine: &ZetaEngine,
    s1: Complex64,
    s2: Complex64,
    c_height: f64,
    q: &FundamentalQuadrature,
) -> Result<MaassSelbergResult> {
    let mut r = maass_selberg_general(engine, s1, s2, c_height)?;
    let (value, tail) = maass_selberg_quadrature(engine, s1, s2, c_height, q, false)?;
    r.discrepancy = Some((r.closed_form - value).norm());
    r.quadrature = Some(value);
    r.tail_bound = Some(tail);
    Ok(r)
}

/// ∫_F |Λ^C E_{1/2+it}|² dA by quadrature.
pub fn critical_norm_quadrature(engine: &ZetaEngine, t: f64, c_height: f64, q: &FundamentalQuadrature) -> Result<(f64, f64)> {
    let opts = domain_options(c_height, q);
    let e = cached_evaluator(engine, c(0.5, t), opts.top, q.mode_tol)?;
    let est = integrate_domain(|w: UpperHalfPoint| e.truncated_reduced(w, c_height).norm_sqr(), &opts)?;
    Ok((est.value, headroom_tail(&e, &e, opts.top)))
}

/// ∫_{F_C} |E_{1/2+it}|² dA by quadrature.
pub fn truncated_domain_norm_quadrature(engine: &ZetaEngine, t: f64, c_height: f64, q: &FundamentalQuadrature) -> Result<f64> {
    let e = cached_evaluator(engine, c(0.5, t), c_height, q.mode_tol)?;
    let mut opts = DomainQuadrature::new(c_height, q.tol);
    opts.periodic_nodes = Some(q.periodic_nodes);
    Ok(integrate_domain(|w: UpperHalfPoint| e.fourier_value(w).norm_sqr(), &opts)?.value)
}

/// Critical-line value with a quadrature cross-check.
pub fn maass_selberg_critical_checked(engine: &ZetaEngine, t: f64, c_height: f64, q: &FundamentalQuadrature) -> Result<MaassSelbergResult> {
    let mut r = maass_selberg_critical(engine, t, c_height)?;
    let (value, tail) = critical_norm_quadrature(engine, t, c_height, q)?;
    r.quadrature = Some(c(value, 0.0));
    r.discrepancy = Some((r.closed_form.re - value).abs());
    r.tail_bound = Some(tail);
    Ok(r)
}

/// ∫ ĝ_T(it) ‖Λ^C E_{1/2+it}‖² dt over the table grid, an upper bound for
/// ∫ ĝ_T(it) ∫_{F_C} |E_{1/2+it}|² dA dt.
pub fn eisenstein_band_integral(engine: &ZetaEngine, table: &TransformTable, c_height: f64) -> Result<f64> {
    let vals = table.values();
    let peak = vals.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let center = table.grid.len() / 2;
    let mut acc = 0.0;
    for k in center..table.grid.len() {
        if vals[k] <= 1e-15 * peak {
            continue;
        }
        let t = table.grid[k];
        let w = if k == center { 1.0 } else { 2.0 };
        acc += w * vals[k] * maass_selberg_critical(engine, t, c_height)?.closed_form.re;
    }
    Ok(acc * table.step)
}

/// The same t-integral with the inner norm computed by quadrature over F,
/// adaptive in t ∈ [0, t_max] to relative tolerance `rel`.
pub fn eisenstein_band_quadrature(
    engine: &ZetaEngine,
    table: &TransformTable,
    c_height: f64,
    t_max: f64,
    rel: f64,
    q: &FundamentalQuadrature,
) -> Result<f64> {
    let t_half = table.smear_half_width.unwrap_or(0.0);
    let failure = std::cell::RefCell::new(None);
    let half = integrate(
        |t: f64| {
            let weight = table.smear_value(t, t_half);
            if weight == 0.0 {
                return 0.0;
            }
            match critical_norm_quadrature(engine, t, c_height, q) {
                Ok((v, _)) => weight * v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        t_max,
        &[],
        Tolerance::new(0.0, rel).with_panels(400),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 * half.value)
}

/// CSV with header `t,ms_closed,ms_quadrature,discrepancy`.
pub fn write_critical_report<W: Write>(rows: &[(f64, MaassSelbergResult)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "ms_closed", "ms_quadrature", "discrepancy"]).map_err(io)?;
    for (t, r) in rows {
        let q = r.quadrature.map(|q| q.re.to_string()).unwrap_or_default();
        let d = r.discrepancy.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([t.to_string(), r.closed_form.re.to_string(), q, d]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// ∫_0^1 f(u + iv) du by the trapezoid rule, enough for trigonometric
/// polynomials of the evaluator depth.
pub fn constant_term_numeric<F: Fn(UpperHalfPoint) -> Complex64>(f: F, v: f64, nodes: usize) -> Complex64 {
    let sum: Complex64 = (0..nodes).map(|k| f(UpperHalfPoint { u: (k as f64 + 0.5) / nodes as f64, v })).sum();
    sum / nodes as f64
}

/// Limit of the four-term formula along s1 = 1/2 + ε + it, s2 = 1/2 − it as
/// ε → 0, by Richardson extrapolation in ε.
pub fn critical_limit_from_general(engine: &ZetaEngine, t: f64, c_height: f64, eps: f64) -> Result<Complex64> {
    let vals = [eps, eps / 2.0, eps / 4.0]
        .iter()
        .map(|&e| Ok(maass_selberg_general(engine, c(0.5 + e, t), c(0.5, -t), c_height)?.closed_form))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::numeric::richardson3([vals[0], vals[1], vals[2]], 0.5)?.limit)
}

/// ∫_{−1/2}^{1/2} f du with an adaptive rule, for spot checks.
pub fn integrate_row<F: FnMut(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    Ok(integrate(f, -0.5, 0.5, &[], Tolerance::new(tol, 0.0))?.value)
}
