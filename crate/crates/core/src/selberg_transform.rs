//! Test functions and their transforms.
//!
//! A test function is described by its Harish transform in the logarithmic
//! coordinate, H(r) = h(e^r), where h is the symmetric profile on (0, ∞).
//! The Selberg transform is then ĝ(ν) = ∫ H(r) e^{νr} dr, so on the
//! imaginary axis ĝ(it) is the cosine transform of H. The kernel g itself is
//! only ever reached through the inversion integral
//!
//!   g(z) = (1/4π) ∫ ĝ(it) φ̃_{1/2−it}(z) t tanh(πt) dt.
//!
//! Writing φ̃ as a K-average and exchanging the order of integration gives
//! g(z) = ∫_K Im(kz)^{1/2} W(log Im(kz)) dk with
//! W(y) = (1/4π) ∫ ĝ(it) t tanh(πt) e^{−ity} dt, a smooth function that is
//! tabulated once per table.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::numeric::chebyshev::Chebyshev;
use crate::numeric::quad::{gauss_legendre, gauss_legendre_integral};
use crate::sl2_geometry::{hyperbolic_distance, UpperHalfPoint};

/// Samples of H on the r-grid.
pub const PROFILE_SAMPLES: usize = 4096;
/// Sharpness k of the base bump exp(−k/(1 − x²)).
pub const BUMP_SHARPNESS: f64 = 2.0;
/// Smallest tail window past the smear edge.
pub const MIN_TAIL_WINDOW: f64 = 40.0;
/// Relative size of ĝ below which the tail is dropped.
pub const TAIL_CUTOFF: f64 = 1e-13;

/// Symmetric compactly supported profile and its normalization.
#[derive(Debug, Clone)]
pub struct TestFunctionSpec {
    /// Support radius: supp h ⊂ [e^{−σ}, e^{σ}], supp H ⊂ [−σ, σ].
    pub sigma: f64,
    /// Base bump half-width, σ/2.
    half_width: f64,
    /// Midpoint grid r_j = −σ + (j + 1/2) dr.
    pub step: f64,
    /// H(r_j), exactly symmetric.
    pub samples: Vec<f64>,
    /// Factor applied to b ⋆ b so that ∫ ĝ(it) dt = 2π H(0) = 1.
    pub normalization: f64,
}

fn bump(x: f64, a: f64) -> f64 {
    let y = x / a;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-BUMP_SHARPNESS / (1.0 - y * y)).exp()
    }
}

// (b ⋆ b)(r) for r ≥ 0 by Gauss–Legendre on the overlap [r − a, a]
fn autocorrelation(r: f64, a: f64) -> f64 {
    let r = r.abs();
    if r >= 2.0 * a {
        return 0.0;
    }
    gauss_legendre_integral(|x: f64| bump(x, a) * bump(r - x, a), r - a, a, 96)
}

/// Builds H = b ⋆ b with b supported on (−σ/2, σ/2), normalized so that
/// ∫ ĝ(it) dt = 1.
pub fn build_base_bump(sigma: f64) -> Result<TestFunctionSpec> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma {sigma} must be positive")));
    }
    let a = 0.5 * sigma;
    let n = PROFILE_SAMPLES;
    let step = 2.0 * sigma / n as f64;
    let center = autocorrelation(0.0, a);
    let normalization = 1.0 / (2.0 * PI * center);
    let mut samples = vec![0.0; n];
    for j in 0..n / 2 {
        let r = -sigma + (j as f64 + 0.5) * step;
        let val = normalization * autocorrelation(r, a);
        samples[j] = val;
        samples[n - 1 - j] = val;
    }
    Ok(TestFunctionSpec { sigma, half_width: a, step, samples, normalization })
}

impl TestFunctionSpec {
    /// H(r) evaluated directly from the convolution.
    pub fn harish_log(&self, r: f64) -> f64 {
        self.normalization * autocorrelation(r, self.half_width)
    }

    /// The symmetric profile h(x) = H(log x), x > 0.
    pub fn profile(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        self.harish_log(x.ln())
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.sigma + (j as f64 + 0.5) * self.step
    }

    /// ĝ(it) by the midpoint rule, paired so the result is exactly even in t.
    pub fn ghat_imag(&self, t: f64) -> f64 {
        let n = self.samples.len();
        let rot = Complex64::new(0.0, t * self.step).exp();
        let mut phase = Complex64::new(0.0, t * self.node(n / 2)).exp();
        let mut acc = 0.0;
        for j in n / 2..n {
            acc += self.samples[j] * phase.re;
            phase *= rot;
        }
        2.0 * acc * self.step
    }
}

/// Selberg transform ĝ(ν) = ∫ h(x) x^{−1/2} x^{1/2} x^ν dx/x, where the
/// unipotent average ḡ(x) is identified with √x h(x); in the log coordinate
/// this is ∫ H(r) e^{νr} dr.
pub fn harish_to_selberg(spec: &TestFunctionSpec, nu: Complex64) -> Result<Complex64> {
    let product = nu.im.abs() * spec.step;
    if product > 0.5 {
        return Err(Error::GridTooCoarse { product });
    }
    if nu.re.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!("|Re nu| = {} outside the tabulated strip", nu.re.abs())));
    }
    let n = spec.samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in n / 2..n {
        acc += spec.samples[j] * (nu * spec.node(j)).cosh();
    }
    Ok(2.0 * acc * spec.step)
}

/// ĝ_T(ν) = ∫_{−T}^{T} ĝ(ν + ir) dr for complex ν, via
/// ∫ H(r) cosh(νr) 2 sin(Tr)/r dr.
pub fn smeared_transform(spec: &TestFunctionSpec, t_half: f64, nu: Complex64) -> Result<Complex64> {
    let product = (nu.im.abs() + t_half) * spec.step;
    if product > 0.5 {
        return Err(Error::GridTooCoarse { product });
    }
    let n = spec.samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in n / 2..n {
        let r = spec.node(j);
        acc += spec.samples[j] * (nu * r).cosh() * (2.0 * (t_half * r).sin() / r);
    }
    Ok(2.0 * acc * spec.step)
}

/// ĝ on a uniform t-grid, optionally smeared over [−T, T].
#[derive(Debug, Clone)]
pub struct TransformTable {
    pub spec: Arc<TestFunctionSpec>,
    pub step: f64,
    /// t_k = k·step for k = −K..=K.
    pub grid: Vec<f64>,
    pub ghat: Vec<f64>,
    /// Equal to `ghat` when no smear has been applied.
    pub ghat_t: Vec<f64>,
    /// Smear half-width T; `None` for the base table.
    pub smear_half_width: Option<f64>,
    // clamped cumulative integral of the interpolant of ĝ at grid points
    prefix: Vec<f64>,
    kernel: OnceLock<InversionKernel>,
    radial: OnceLock<RadialProfile>,
}

/// Grid spacing used for transform tables.
pub fn table_step(sigma: f64) -> f64 {
    0.1f64.min(PI / (8.0 * sigma))
}

/// Smallest t beyond which ĝ stays below TAIL_CUTOFF·ĝ(0).
pub fn decay_length(spec: &TestFunctionSpec) -> f64 {
    let peak = spec.ghat_imag(0.0);
    let mut l = 10.0;
    loop {
        // envelope over [l, 2l] on a grid finer than the oscillation of ĝ
        let samples = 200;
        let mut max: f64 = 0.0;
        for k in 0..=samples {
            let t = l * (1.0 + k as f64 / samples as f64);
            max = max.max(spec.ghat_imag(t).abs());
        }
        if max <= TAIL_CUTOFF * peak || l * spec.step > 0.4 {
            return l;
        }
        l *= 1.25;
    }
}

/// Tail window W: at least MIN_TAIL_WINDOW, and long enough that ĝ has
/// decayed to TAIL_CUTOFF of its peak.
pub fn tail_window(spec: &TestFunctionSpec) -> f64 {
    MIN_TAIL_WINDOW.max(decay_length(spec))
}

// quintic Lagrange weights for the cell integral between the two middle nodes
const CELL_WEIGHTS: [f64; 6] = [11.0 / 1440.0, -93.0 / 1440.0, 802.0 / 1440.0, 802.0 / 1440.0, -93.0 / 1440.0, 11.0 / 1440.0];

impl TransformTable {
    /// Tabulates ĝ(it) on |t| ≤ t_max.
    pub fn base(spec: Arc<TestFunctionSpec>, t_max: f64) -> Result<Self> {
        let step = table_step(spec.sigma);
        let product = t_max * spec.step;
        if product > 0.5 {
            return Err(Error::GridTooCoarse { product });
        }
        let k_max = (t_max / step).ceil() as usize;
        let half: Vec<f64> = (0..=k_max).map(|k| spec.ghat_imag(k as f64 * step)).collect();
        let mut grid = Vec::with_capacity(2 * k_max + 1);
        let mut ghat = Vec::with_capacity(2 * k_max + 1);
        for k in -(k_max as i64)..=(k_max as i64) {
            grid.push(k as f64 * step);
            ghat.push(half[k.unsigned_abs() as usize]);
        }
        let prefix = cumulative(&ghat, step);
        Ok(TransformTable {
            spec,
            step,
            grid,
            ghat: ghat.clone(),
            ghat_t: ghat,
            smear_half_width: None,
            prefix,
            kernel: OnceLock::new(),
            radial: OnceLock::new(),
        })
    }

    /// Base table long enough to be smeared with half-width `t_half`.
    pub fn for_smear(spec: Arc<TestFunctionSpec>, t_half: f64) -> Result<Self> {
        let w = tail_window(&spec);
        Self::base(spec, t_half + w)
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// The values the inversion integral uses: ĝ_T if smeared, else ĝ.
    pub fn values(&self) -> &[f64] {
        &self.ghat_t
    }

    fn center(&self) -> usize {
        self.grid.len() / 2
    }

    // ∫_{−t_max}^{x} of the interpolant, clamped so it is monotone in x
    fn cumulative_at(&self, x: f64) -> f64 {
        let n = self.ghat.len();
        let pos = (x - self.grid[0]) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= (n - 1) as f64 {
            return self.prefix[n - 1];
        }
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        let cell = self.prefix[k + 1] - self.prefix[k];
        if frac == 0.0 {
            return self.prefix[k];
        }
        // integrate the local quintic through nodes k−2..k+3 over [0, frac]
        let (xs, ws) = gauss_legendre(4);
        let mut partial = 0.0;
        for (xi, wi) in xs.iter().zip(ws.iter()) {
            let s = 0.5 * frac * (xi + 1.0);
            partial += wi * lagrange6(&self.ghat, k, s);
        }
        partial *= 0.5 * frac * self.step;
        self.prefix[k] + partial.clamp(0.0, cell)
    }

    /// ĝ_T(it) at an arbitrary real t from the cumulative integral of ĝ.
    pub fn smear_value(&self, t: f64, t_half: f64) -> f64 {
        let t = t.abs();
        (self.cumulative_at(t + t_half) - self.cumulative_at(t - t_half)).max(0.0)
    }

    /// Value of the transform this table represents at a complex point.
    pub fn transform_at(&self, nu: Complex64) -> Result<Complex64> {
        match self.smear_half_width {
            None => harish_to_selberg(&self.spec, nu),
            Some(t) => smeared_transform(&self.spec, t, nu),
        }
    }

    /// CSV with header `t,ghat,ghat_T`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "ghat", "ghat_T"]).map_err(|e| Error::Io(e.to_string()))?;
        for k in 0..self.grid.len() {
            w.write_record([self.grid[k].to_string(), self.ghat[k].to_string(), self.ghat_t[k].to_string()])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inversion kernel covering distances up to 3σ (cached).
    pub fn kernel(&self) -> &InversionKernel {
        self.kernel.get_or_init(|| InversionKernel::new(self, 3.0 * self.spec.sigma))
    }

    /// Radial values g(d) on [0, σ] (cached).
    pub fn radial(&self) -> &RadialProfile {
        self.radial.get_or_init(|| RadialProfile::new(self))
    }
}

fn padded(values: &[f64], k: i64) -> f64 {
    if k < 0 || k as usize >= values.len() {
        0.0
    } else {
        values[k as usize]
    }
}

// interpolant through nodes k−2..=k+3 at position k + s, 0 ≤ s ≤ 1
fn lagrange6(values: &[f64], k: usize, s: f64) -> f64 {
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    let mut acc = 0.0;
    for (i, &oi) in offsets.iter().enumerate() {
        let mut l = 1.0;
        for (j, &oj) in offsets.iter().enumerate() {
            if i != j {
                l *= (s - oj) / (oi - oj);
            }
        }
        acc += l * padded(values, k as i64 + oi as i64);
    }
    acc
}

fn cumulative(values: &[f64], step: f64) -> Vec<f64> {
    let mut prefix = vec![0.0; values.len()];
    for k in 0..values.len() - 1 {
        let mut cell = 0.0;
        for (q, w) in CELL_WEIGHTS.iter().enumerate() {
            cell += w * padded(values, k as i64 + q as i64 - 2);
        }
        prefix[k + 1] = prefix[k] + (cell * step).max(0.0);
    }
    prefix
}

/// ĝ_T(it) = ∫_{−T}^{T} ĝ(it + ir) dr on the grid of `table`, by exact
/// integration of the piecewise quintic interpolant. Cell integrals are
/// clamped at zero so the cumulative integral is monotone and ĝ_T ≥ 0.
pub fn smear(table: &TransformTable, t_half: f64) -> Result<TransformTable> {
    if !(t_half >= 0.0) {
        return Err(Error::InvalidArgument(format!("smear half-width {t_half} must be >= 0")));
    }
    if table.smear_half_width.is_some() {
        return Err(Error::InvalidArgument("table is already smeared".into()));
    }
    let required = t_half + tail_window(&table.spec);
    if table.t_max() < required - 1e-9 {
        return Err(Error::GridTooShort { required, available: table.t_max() });
    }
    let c = table.center();
    let n = table.grid.len();
    let mut ghat_t = vec![0.0; n];
    if t_half > 0.0 {
        for k in c..n {
            let v = table.smear_value(table.grid[k], t_half);
            ghat_t[k] = v;
            ghat_t[2 * c - k] = v;
        }
    }
    Ok(TransformTable {
        spec: table.spec.clone(),
        step: table.step,
        grid: table.grid.clone(),
        ghat: table.ghat.clone(),
        ghat_t,
        smear_half_width: Some(t_half),
        prefix: table.prefix.clone(),
        kernel: OnceLock::new(),
        radial: OnceLock::new(),
    })
}

/// ∫ ĝ_T(it) t tanh(πt)/(4π) dt, the value of g_T at the base point.
pub fn g_at_identity(table: &TransformTable) -> f64 {
    plancherel_moment(table, 0.0)
}

// (1/4π) ∫ ĝ_T(it) t tanh(πt) cos(ty) dt by the trapezoid rule on the grid
fn plancherel_moment(table: &TransformTable, y: f64) -> f64 {
    let c = table.center();
    let vals = table.values();
    let mut acc = 0.0;
    for k in c + 1..table.grid.len() {
        let t = table.grid[k];
        acc += vals[k] * t * (PI * t).tanh() * (t * y).cos();
    }
    2.0 * acc * table.step / (4.0 * PI)
}

/// φ̃_s(z) = ∫_K Im(kz)^s dk by the periodic trapezoid rule over the
/// rotation angle, doubling the node count until it settles.
pub fn spherical_function(s: Complex64, z: UpperHalfPoint) -> Complex64 {
    let zc = z.to_complex();
    let f = |theta: f64| {
        let (sn, cs) = theta.sin_cos();
        let den = (Complex64::new(cs, 0.0) - zc * sn).norm_sqr();
        (s * (z.v / den).ln()).exp()
    };
    k_average(f)
}

// (1/π) ∫_0^π f(θ) dθ for π-periodic f
fn k_average<F: Fn(f64) -> Complex64>(f: F) -> Complex64 {
    let mut n = 16;
    let mut sum: Complex64 = (0..n).map(|k| f(PI * k as f64 / n as f64)).sum();
    let mut prev = sum / n as f64;
    loop {
        let mid: Complex64 = (0..n).map(|k| f(PI * (k as f64 + 0.5) / n as f64)).sum();
        sum += mid;
        n *= 2;
        let cur = sum / n as f64;
        if (cur - prev).norm() <= 1e-14 * (1.0 + cur.norm()) || n >= 1 << 18 {
            return cur;
        }
        prev = cur;
    }
}

/// Chebyshev table of W(y) = (1/4π) ∫ ĝ_T(it) t tanh(πt) cos(ty) dt on
/// [−D, D].
#[derive(Debug, Clone)]
pub struct InversionKernel {
    pub reach: f64,
    table: Chebyshev,
    /// Highest t carrying relative weight above 1e-12.
    pub bandwidth: f64,
}

fn effective_bandwidth(table: &TransformTable, rel: f64) -> f64 {
    let c = table.center();
    let vals = table.values();
    let peak = (c..vals.len()).map(|k| vals[k] * table.grid[k].abs().max(1.0)).fold(0.0, f64::max);
    let mut last = 1.0;
    for k in c..vals.len() {
        if vals[k] * table.grid[k].abs().max(1.0) > rel * peak {
            last = table.grid[k];
        }
    }
    last
}

impl InversionKernel {
    pub fn new(table: &TransformTable, reach: f64) -> Self {
        let bandwidth = effective_bandwidth(table, 1e-12);
        let n = ((1.3 * reach * bandwidth).ceil() as usize + 48).clamp(64, 8192);
        let nodes = Chebyshev::points(-reach, reach, n);
        // W is even: evaluate on the non-negative half and mirror
        let mut values = vec![0.0; n + 1];
        for j in 0..=n / 2 {
            let v = plancherel_moment(table, nodes[j]);
            values[j] = v;
            values[n - j] = v;
        }
        InversionKernel { reach, table: Chebyshev::from_values(-reach, reach, values), bandwidth }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.table.eval(y)
    }

    /// g at hyperbolic distance d from i, for d ≤ reach.
    pub fn g_at_distance(&self, d: f64) -> f64 {
        let (sh, ch) = (d.sinh(), d.cosh());
        // Im(k_θ z) for z = i e^{d}: 1/(cosh d − sinh d cos 2θ)
        let nodes = ((2.0 * self.bandwidth * d).ceil() as usize + 32).max(32);
        let mut acc = 0.0;
        for k in 0..nodes {
            let theta = PI * (k as f64 + 0.5) / nodes as f64;
            let y = -(ch - sh * (2.0 * theta).cos()).ln();
            acc += (0.5 * y).exp() * self.eval(y);
        }
        acc / nodes as f64
    }
}

/// g_T at z through the inversion integral.
pub fn pointwise_from_transform(table: &TransformTable, z: UpperHalfPoint) -> f64 {
    let d = hyperbolic_distance(UpperHalfPoint::I, z);
    if d <= table.kernel().reach {
        table.kernel().g_at_distance(d)
    } else {
        InversionKernel::new(table, 1.05 * d).g_at_distance(d)
    }
}

/// g_T(d) on [0, σ] at Chebyshev points, zero beyond σ. Used where many
/// kernel values are needed (orbital integrals).
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub support: f64,
    table: Chebyshev,
}

impl RadialProfile {
    pub fn new(table: &TransformTable) -> Self {
        let kernel = table.kernel();
        let support = table.spec.sigma;
        let bandwidth = effective_bandwidth(table, 1e-9);
        let n = ((1.5 * support * bandwidth).ceil() as usize + 32).clamp(48, 512);
        RadialProfile { support, table: Chebyshev::new(|d| kernel.g_at_distance(d), 0.0, support, n) }
    }

    pub fn eval(&self, d: f64) -> f64 {
        if d >= self.support {
            return 0.0;
        }
        self.table.eval(d)
    }
}

/// ∫_H g(z) v^{1/2+ν} dA in geodesic polar coordinates about i, with g from
/// the inversion integral. Equals the transform the table represents.
pub fn selberg_eigen_identity(table: &TransformTable, nu: Complex64) -> Result<Complex64> {
    if nu.re.abs() >= 0.5 {
        return Err(Error::InvalidArgument(format!("|Re nu| = {} must be < 1/2", nu.re.abs())));
    }
    let kernel = table.kernel();
    let sigma = table.spec.sigma;
    let s = nu + 0.5;
    // ∫_0^σ g(d) sinh d ∫_0^{2π} (cosh d − sinh d cos θ)^{−s} dθ dd
    let (xs, ws) = gauss_legendre(64);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(ws.iter()) {
        let d = 0.5 * sigma * (x + 1.0);
        let (sh, ch) = (d.sinh(), d.cosh());
        let ring = k_average(|theta| (-s * (ch - sh * (2.0 * theta).cos()).ln()).exp()) * (2.0 * PI);
        acc += ring * (kernel.g_at_distance(d) * sh * w);
    }
    Ok(acc * (0.5 * sigma))
}

/// Summary of a base-versus-eigen-identity comparison.
#[derive(Debug, Clone, Serialize)]
pub struct RoundtripPoint {
    pub nu: Complex64,
    pub mellin: Complex64,
    pub quadrature: Complex64,
    pub discrepancy: f64,
}

pub fn roundtrip(table: &TransformTable, nus: &[Complex64]) -> Result<Vec<RoundtripPoint>> {
    nus.iter()
        .map(|&nu| {
            let mellin = table.transform_at(nu)?;
            let quadrature = selberg_eigen_identity(table, nu)?;
            Ok(RoundtripPoint { nu, mellin, quadrature, discrepancy: (mellin - quadrature).norm() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_symmetry_and_support() {
        let spec = build_base_bump(0.2).unwrap();
        let n = spec.samples.len();
        for j in 0..n {
            assert_eq!(spec.samples[j], spec.samples[n - 1 - j]);
            assert!(spec.samples[j] >= 0.0);
        }
        for &x in &[1.05, 1.2, 1.22] {
            assert!((spec.profile(x) - spec.profile(1.0 / x)).abs() <= 1e-15 * spec.profile(1.0).max(1.0));
        }
        assert_eq!(spec.profile(0.2f64.exp() * (1.0 + 1e-6)), 0.0);
        assert!((spec.harish_log(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn autocorrelation_quadrature_is_converged() {
        let a = 0.1;
        for &r in &[0.0, 0.05, 0.13, 0.19] {
            let lo = autocorrelation(r, a);
            let hi = gauss_legendre_integral(|x: f64| bump(x, a) * bump(r - x, a), r - a, a, 400);
            assert!((lo - hi).abs() <= 1e-12 * hi.max(1e-300), "{r}");
        }
    }

    #[test]
    fn transform_is_real_even_and_positive() {
        let spec = build_base_bump(0.3).unwrap();
        for k in 0..200 {
            let t = k as f64 * 0.7;
            let g = harish_to_selberg(&spec, Complex64::new(0.0, t)).unwrap();
            let h = harish_to_selberg(&spec, Complex64::new(0.0, -t)).unwrap();
            assert!(g.im.abs() < 1e-15);
            assert_eq!(g, h);
            assert!(g.re >= -1e-10);
        }
        assert!(matches!(harish_to_selberg(&spec, Complex64::new(0.0, 1e5)), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn ghat_zero_by_direct_sum() {
        let spec = build_base_bump(0.4).unwrap();
        // ∫ h(x) x^{-1/2} x^{1/2} dx/x with x = e^r, summed on a fine midpoint grid in x
        let n = 200_000;
        let (lo, hi) = ((-0.4f64).exp(), 0.4f64.exp());
        let dx = (hi - lo) / n as f64;
        let direct: f64 = (0..n).map(|k| lo + (k as f64 + 0.5) * dx).map(|x| spec.profile(x) / x * dx).sum();
        let mellin = harish_to_selberg(&spec, Complex64::new(0.0, 0.0)).unwrap().re;
        assert!((direct - mellin).abs() < 1e-9 * mellin);
    }

    #[test]
    fn smear_of_zero_width_vanishes() {
        let spec = Arc::new(build_base_bump(3.0).unwrap());
        let base = TransformTable::for_smear(spec, 0.0).unwrap();
        let s = smear(&base, 0.0).unwrap();
        assert!(s.ghat_t.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smear_needs_a_long_enough_grid() {
        let spec = Arc::new(build_base_bump(3.0).unwrap());
        let base = TransformTable::base(spec, 30.0).unwrap();
        assert!(matches!(smear(&base, 20.0), Err(Error::GridTooShort { .. })));
    }

    #[test]
    fn normalization_integral() {
        let spec = Arc::new(build_base_bump(0.5).unwrap());
        let base = TransformTable::for_smear(spec, 0.0).unwrap();
        let total = *base.prefix.last().unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn spherical_function_basics() {
        for &s in &[Complex64::new(0.5, 3.0), Complex64::new(0.2, -1.0)] {
            assert!((spherical_function(s, UpperHalfPoint::I) - 1.0).norm() < 1e-15);
        }
        // φ̃_s depends on z only through dist(z, i)
        let s = Complex64::new(0.5, 2.5);
        let a = spherical_function(s, UpperHalfPoint { u: 0.0, v: 2.0 });
        let b = spherical_function(s, UpperHalfPoint { u: 0.0, v: 0.5 });
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn spherical_function_is_laplace_eigenfunction() {
        let s = Complex64::new(0.5, 1.7);
        let z = UpperHalfPoint { u: 0.3, v: 1.4 };
        let f = |u: f64, v: f64| spherical_function(s, UpperHalfPoint { u, v });
        let mut prev: f64 = f64::INFINITY;
        for &h in &[0.04, 0.02, 0.01] {
            let lap = -(z.v * z.v) * (f(z.u + h, z.v) + f(z.u - h, z.v) + f(z.u, z.v + h) + f(z.u, z.v - h) - 4.0 * f(z.u, z.v)) / (h * h);
            let err = (lap - s * (1.0 - s) * f(z.u, z.v)).norm();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-3);
    }
}
