//! Upper half-plane, the SL2(Z) action, reduction to the standard
//! fundamental domain, quadrature over the truncated domain F_C, and the
//! group elements seen by a compactly supported point-pair kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, Estimate, QuadValue, Tolerance};

/// A point u + iv with v > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub u: f64,
    pub v: f64,
}

impl UpperHalfPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) || !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("({u}, {v}) is not in the upper half-plane")));
        }
        Ok(UpperHalfPoint { u, v })
    }

    /// The base point i.
    pub const I: UpperHalfPoint = UpperHalfPoint { u: 0.0, v: 1.0 };

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// Integer matrix with determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidArgument(format!("det of ({a},{b};{c},{d}) is not 1")));
        }
        Ok(IntegerMatrix2 { a, b, c, d })
    }

    pub const IDENTITY: IntegerMatrix2 = IntegerMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    /// z ↦ −1/z
    pub const S: IntegerMatrix2 = IntegerMatrix2 { a: 0, b: -1, c: 1, d: 0 };

    /// z ↦ z + n
    pub fn translation(n: i64) -> Self {
        IntegerMatrix2 { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &IntegerMatrix2) -> IntegerMatrix2 {
        IntegerMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> IntegerMatrix2 {
        IntegerMatrix2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> IntegerMatrix2 {
        IntegerMatrix2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Representative of ±γ with c > 0, or c = 0 and d > 0.
    pub fn psl2_normalized(&self) -> IntegerMatrix2 {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }
}

/// (az + b)/(cz + d); the imaginary part is computed as v/|cz + d|².
pub fn moebius_act(g: &IntegerMatrix2, z: UpperHalfPoint) -> UpperHalfPoint {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    let den_re = c * z.u + d;
    let den_im = c * z.v;
    let den2 = den_re * den_re + den_im * den_im;
    let num_re = a * z.u + b;
    let num_im = a * z.v;
    UpperHalfPoint { u: (num_re * den_re + num_im * den_im) / den2, v: z.v / den2 }
}

/// Maximum number of translate/invert steps in [`reduce`].
pub const REDUCTION_STEPS: usize = 10_000;

/// Reduces z into F = {|u| ≤ 1/2, |z| ≥ 1} and returns (z*, γ) with z* = γz.
/// Boundary convention: u* ∈ [−1/2, 1/2), and u* ≤ 0 when |z*| = 1.
pub fn reduce(z: UpperHalfPoint) -> Result<(UpperHalfPoint, IntegerMatrix2)> {
    let mut w = z;
    let mut g = IntegerMatrix2::IDENTITY;
    for _ in 0..REDUCTION_STEPS {
        let n = (w.u + 0.5).floor();
        if n != 0.0 {
            let t = IntegerMatrix2::translation(-(n as i64));
            w = UpperHalfPoint { u: w.u - n, v: w.v };
            g = t.mul(&g);
        }
        let r2 = w.u * w.u + w.v * w.v;
        if r2 < 1.0 {
            w = moebius_act(&IntegerMatrix2::S, w);
            g = IntegerMatrix2::S.mul(&g);
            continue;
        }
        if r2 == 1.0 && w.u > 0.0 {
            w = UpperHalfPoint { u: -w.u, v: w.v };
            g = IntegerMatrix2::S.mul(&g);
        }
        return Ok((w, g.psl2_normalized()));
    }
    Err(Error::NonTermination { steps: REDUCTION_STEPS })
}

/// Truncated fundamental domain F_C = {z ∈ F : v ≤ C}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDomain {
    pub c: f64,
}

impl TruncatedDomain {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("truncation height {c} must be >= 1")));
        }
        Ok(TruncatedDomain { c })
    }

    pub fn contains(&self, z: UpperHalfPoint) -> bool {
        z.u.abs() <= 0.5 && z.u * z.u + z.v * z.v >= 1.0 && z.v <= self.c
    }

    pub fn area(&self) -> f64 {
        area_truncated(self.c)
    }
}

/// area(F_C) = π/3 − 1/C.
pub fn area_truncated(c: f64) -> f64 {
    PI / 3.0 - 1.0 / c
}

/// u(z, w) = |z − w|²/(v_z v_w).
pub fn point_pair_u(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    let du = z.u - w.u;
    let dv = z.v - w.v;
    (du * du + dv * dv) / (z.v * w.v)
}

/// Hyperbolic distance, 2 asinh(√u / 2).
pub fn hyperbolic_distance(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
    2.0 * (0.5 * point_pair_u(z, w).sqrt()).asinh()
}

/// u-value at hyperbolic distance d.
pub fn u_from_distance(d: f64) -> f64 {
    let s = (0.5 * d).sinh();
    4.0 * s * s
}

/// Options for quadrature over a region {|u| ≤ 1/2, |z| ≥ 1, v ≤ top}.
#[derive(Debug, Clone)]
pub struct DomainQuadrature {
    /// Upper height of the region.
    pub top: f64,
    /// Absolute tolerance on the full integral.
    pub tol: f64,
    /// Extra v-breakpoints above 1 (e.g. a truncation height).
    pub v_breaks: Vec<f64>,
    /// Extra u-breakpoints (e.g. near a peak of the integrand).
    pub u_breaks: Vec<f64>,
    /// When set, integrate 1-periodic integrands in u with this many
    /// trapezoid nodes on the rows v ≥ 1.
    pub periodic_nodes: Option<usize>,
    pub max_panels: usize,
}

impl DomainQuadrature {
    pub fn new(top: f64, tol: f64) -> Self {
        DomainQuadrature { top, tol, v_breaks: Vec::new(), u_breaks: Vec::new(), periodic_nodes: None, max_panels: 4000 }
    }
}

/// ∫ f dA over the region described by `opts`, with dA = v⁻² du dv.
///
/// Below v = 1 the arc is handled by integrating u outermost with v from
/// √(1 − u²) to 1; both limits are smooth in u. Above v = 1 the region is a
/// rectangle.
pub fn integrate_domain<V, F>(f: F, opts: &DomainQuadrature) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: Fn(UpperHalfPoint) -> V,
{
    if !(opts.tol > 0.0) || !(opts.top >= 1.0) {
        return Err(Error::InvalidArgument("domain quadrature needs tol > 0 and top >= 1".into()));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let tol_outer = Tolerance::new(0.25 * opts.tol, 0.0).with_panels(opts.max_panels);
    let tol_inner = Tolerance::new(0.05 * opts.tol, 0.0).with_panels(opts.max_panels);
    let record = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
    };

    // arc slab
    let arc = integrate(
        |u: f64| {
            let lo = (1.0 - u * u).sqrt();
            match integrate(|v: f64| f(UpperHalfPoint { u, v }).scale(1.0 / (v * v)), lo, 1.0, &[], tol_inner) {
                Ok(e) => e.value,
                Err(e) => {
                    record(e);
                    V::zero()
                }
            }
        },
        -0.5,
        0.5,
        &opts.u_breaks,
        tol_outer,
    )?;

    // rectangle slab
    let mut breaks = opts.v_breaks.clone();
    breaks.retain(|&b| b > 1.0 && b < opts.top);
    let rect = if opts.top > 1.0 {
        integrate(
            |v: f64| {
                let row = match opts.periodic_nodes {
                    Some(n) => crate::numeric::quad::periodic_trapezoid(|u: f64| f(UpperHalfPoint { u, v }), -0.5, 0.5, n),
                    None => match integrate(|u: f64| f(UpperHalfPoint { u, v }), -0.5, 0.5, &opts.u_breaks, tol_inner) {
                        Ok(e) => e.value,
                        Err(e) => {
                            record(e);
                            V::zero()
                        }
                    },
                };
                row.scale(1.0 / (v * v))
            },
            1.0,
            opts.top,
            &breaks,
            tol_outer,
        )?
    } else {
        Estimate { value: V::zero(), error: 0.0 }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Estimate { value: arc.value.add(rect.value), error: arc.error + rect.error })
}

/// ∫_{F_C} f dA with the hyperbolic measure, absolute tolerance `tol`.
pub fn integrate_over_truncated<F>(f: F, c: f64, tol: f64) -> Result<Estimate<f64>>
where
    F: Fn(UpperHalfPoint) -> f64,
{
    TruncatedDomain::new(c)?;
    integrate_domain(f, &DomainQuadrature::new(c, tol))
}

/// A group element together with its smallest displacement on F_C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportElement {
    pub gamma: IntegerMatrix2,
    /// inf over F_C of dist(z, γz)
    pub min_displacement: f64,
    /// A point of F_C where the infimum is (numerically) attained.
    pub argmin: UpperHalfPoint,
}

/// Elements of PSL2(Z) whose displacement on F_C can be at most σ.
#[derive(Debug, Clone, Serialize)]
pub struct KernelSupport {
    /// Non-identity elements, PSL2-normalized.
    pub elements: Vec<SupportElement>,
    /// The identity always has displacement 0; it is accounted for separately.
    pub identity_included: bool,
    /// Largest σ for which the enumeration stays purely elliptic.
    pub sigma_limit: f64,
}

/// Displacement of the translation z ↦ z ± 1 at the top of F_C.
pub fn translation_displacement(c: f64) -> f64 {
    2.0 * (0.5 / c).asinh()
}

/// Enumerates γ ≠ ±1 with inf_{z ∈ F_C} dist(z, γz) ≤ σ.
///
/// Candidates come from |c| ≤ ⌈2/(σ v_min)⌉ and |d| ≤ |c|/2 + 2, pruned by
/// the necessary condition min_{F_C} |cz + d|² ≤ e^σ (since the distance is
/// at least |log |cz + d|²|); survivors are minimized numerically.
pub fn kernel_support_elements(c: f64, sigma: f64) -> Result<KernelSupport> {
    let dom = TruncatedDomain::new(c)?;
    let limit = translation_displacement(c);
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma {sigma} must be positive")));
    }
    if sigma >= limit {
        return Err(Error::SigmaTooLarge { sigma, limit });
    }
    let v_min = 3f64.sqrt() / 2.0;
    let c_max = (2.0 / (sigma * v_min)).ceil() as i64;
    let mut found: Vec<SupportElement> = Vec::new();
    for cc in 0..=c_max {
        let d_max = cc / 2 + 2;
        for dd in -d_max..=d_max {
            if cc == 0 && dd != 1 {
                continue;
            }
            if gcd(cc, dd) != 1 {
                continue;
            }
            let (cf, df) = (cc as f64, dd as f64);
            let min_den = if cc == 0 { 1.0 } else { cf * cf + df * df - (cf * df).abs() };
            if min_den > sigma.exp() * (1.0 + 1e-12) {
                continue;
            }
            let base = complete_row(cc, dd);
            for k in translation_range(&base, &dom, sigma) {
                let g = IntegerMatrix2::translation(k).mul(&base).psl2_normalized();
                if g.is_plus_minus_identity() || found.iter().any(|e| e.gamma == g) {
                    continue;
                }
                let (dist, at) = min_displacement(&g, &dom);
                if dist <= sigma + 1e-9 {
                    found.push(SupportElement { gamma: g, min_displacement: dist, argmin: at });
                }
            }
        }
    }
    found.sort_by_key(|e| (e.gamma.c, e.gamma.d, e.gamma.a, e.gamma.b));
    Ok(KernelSupport { elements: found, identity_included: true, sigma_limit: limit })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// some (a, b) with ad − bc = 1
fn complete_row(c: i64, d: i64) -> IntegerMatrix2 {
    if c == 0 {
        return IntegerMatrix2::IDENTITY;
    }
    // extended Euclid on (d, c): a d − b c = 1
    let (mut old_r, mut r) = (d, c);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    // old_s d + old_t c = old_r = ±1
    let sign = old_r.signum();
    IntegerMatrix2 { a: sign * old_s, b: -sign * old_t, c, d }
}

// k such that T^k γ0 may move some z ∈ F_C by at most σ
fn translation_range(base: &IntegerMatrix2, dom: &TruncatedDomain, sigma: f64) -> std::ops::RangeInclusive<i64> {
    let top = dom.c;
    let spread = (2.0 * (sigma.cosh() - 1.0) * top * top * sigma.exp()).sqrt();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for z in sample_domain(dom, 24) {
        let w = moebius_act(base, z);
        let shift = z.u - w.u;
        lo = lo.min(shift);
        hi = hi.max(shift);
    }
    ((lo - spread - 1.0).floor() as i64)..=((hi + spread + 1.0).ceil() as i64)
}

fn sample_domain(dom: &TruncatedDomain, n: usize) -> Vec<UpperHalfPoint> {
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..=n {
        let u = -0.5 + i as f64 / n as f64;
        let lo = (1.0 - u * u).sqrt();
        for j in 0..=n {
            let v = lo * (dom.c / lo).powf(j as f64 / n as f64);
            pts.push(UpperHalfPoint { u, v });
        }
    }
    pts
}

fn project(dom: &TruncatedDomain, u: f64, v: f64) -> UpperHalfPoint {
    let u = u.clamp(-0.5, 0.5);
    let lo = (1.0 - u * u).sqrt();
    UpperHalfPoint { u, v: v.clamp(lo, dom.c) }
}

/// Numerical inf over F_C of dist(z, γz): grid search then compass search
/// with projection onto the domain.
pub fn min_displacement(g: &IntegerMatrix2, dom: &TruncatedDomain) -> (f64, UpperHalfPoint) {
    let objective = |z: UpperHalfPoint| point_pair_u(z, moebius_act(g, z));
    let mut best = UpperHalfPoint::I;
    let mut best_val = f64::INFINITY;
    for z in sample_domain(dom, 40) {
        let val = objective(z);
        if val < best_val {
            best_val = val;
            best = z;
        }
    }
    let mut step = 0.02;
    while step > 1e-13 {
        let mut improved = false;
        for (du, dv) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let z = project(dom, best.u + du * step, best.v + dv * step);
            let val = objective(z);
            if val < best_val {
                best_val = val;
                best = z;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (2.0 * (0.5 * best_val.max(0.0).sqrt()).asinh(), best)
}
