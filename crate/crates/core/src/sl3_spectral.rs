//! SL3 root data, Weyl group, spectral density and the closed forms of the
//! Langlands inner-product formula for the minimal parabolic.
//!
//! Spectral parameters are triples λ = (ℓ1, ℓ2, ℓ3) with ℓ1 + ℓ2 + ℓ3 = 0.
//! A Weyl element s ∈ S3 acts by (sλ)_{s(i)} = ℓ_i, and the intertwining
//! scalar is M(s, λ) = Π_{i<j, s(i)>s(j)} R(ℓ_i − ℓ_j).
//!
//! The overall constant of the inner-product formula is fixed to 1. The
//! pairing of intertwining scalars is the plain product M(s1, λ1) M(s2, λ2),
//! which for imaginary λ2 equals M(s1, λ1) conj(M(s2, −λ2)).

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::gamma::{gamma, ln_gamma, ln_gamma_real, recip_gamma};
use crate::numeric::quad::{integrate, Tolerance};
use crate::numeric::{richardson3, Extrapolation};
use crate::zeta_toolkit::{hecke_completed_log_derivative, Bounded, HeckeData, ZetaEngine};

/// Tolerance of the sum-zero constraint.
pub const SUM_ZERO_TOL: f64 = 1e-12;
/// Smallest denominator accepted by the 36-term sum.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;
/// Minimal separation |t_i − t_j| for the diagonal closed form.
pub const WALL_GAP: f64 = 1e-3;
/// c_β calibrated against the asymptotic ball integral at T = 10⁴.
pub const C_BETA_STORED: f64 = 1.68021e-4;
/// Height at which [`C_BETA_STORED`] was calibrated.
pub const C_BETA_CALIBRATION_HEIGHT: f64 = 1e4;
/// Default ε ladder for limits in the 36-term sum.
pub const EPS_LADDER: [f64; 3] = [2e-3, 1e-3, 5e-4];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// λ = (ℓ1, ℓ2, ℓ3) in the complexified dual of the diagonal torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParameter3 {
    pub l: [Complex64; 3],
}

impl SpectralParameter3 {
    pub fn new(l1: Complex64, l2: Complex64, l3: Complex64) -> Result<Self> {
        let l = [l1, l2, l3];
        if !l.iter().all(|z| crate::is_finite_point(*z)) {
            return Err(Error::InvalidArgument("non-finite spectral parameter".into()));
        }
        let s = (l1 + l2 + l3).norm();
        if s > SUM_ZERO_TOL * (1.0 + l.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            return Err(Error::InvalidArgument(format!("l1 + l2 + l3 = {s:e}, not zero")));
        }
        Ok(SpectralParameter3 { l })
    }

    /// i(y1, y2, −y1−y2).
    pub fn imaginary(y1: f64, y2: f64) -> Self {
        SpectralParameter3 { l: [c(0.0, y1), c(0.0, y2), c(0.0, -y1 - y2)] }
    }

    /// Imaginary parameter with plane coordinates (a, b) in the orthonormal
    /// basis (1,−1,0)/√2, (1,1,−2)/√6.
    pub fn from_plane(a: f64, b: f64) -> Self {
        let (s2, s6) = (2f64.sqrt(), 6f64.sqrt());
        let y = [a / s2 + b / s6, -a / s2 + b / s6, -2.0 * b / s6];
        SpectralParameter3 { l: [c(0.0, y[0]), c(0.0, y[1]), c(0.0, y[2])] }
    }

    /// Plane coordinates of Im λ.
    pub fn plane_coordinates(&self) -> (f64, f64) {
        let y = self.imag();
        ((y[0] - y[1]) / 2f64.sqrt(), (y[0] + y[1] - 2.0 * y[2]) / 6f64.sqrt())
    }

    pub fn real(&self) -> [f64; 3] {
        [self.l[0].re, self.l[1].re, self.l[2].re]
    }

    pub fn imag(&self) -> [f64; 3] {
        [self.l[0].im, self.l[1].im, self.l[2].im]
    }

    /// max |Re ℓ_i| < 1/2.
    pub fn within_unitarity_bound(&self) -> bool {
        self.l.iter().all(|z| z.re.abs() < 0.5)
    }

    /// Euclidean norm in C³.
    pub fn norm(&self) -> f64 {
        self.l.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, o: &SpectralParameter3) -> SpectralParameter3 {
        SpectralParameter3 { l: [self.l[0] + o.l[0], self.l[1] + o.l[1], self.l[2] + o.l[2]] }
    }
}

impl fmt::Display for SpectralParameter3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l[0], self.l[1], self.l[2])
    }
}

/// α1∨ = (1,−1,0).
pub const ALPHA1_CHECK: [f64; 3] = [1.0, -1.0, 0.0];
/// α2∨ = (0,1,−1).
pub const ALPHA2_CHECK: [f64; 3] = [0.0, 1.0, -1.0];
/// α3∨ = α1∨ + α2∨.
pub const ALPHA3_CHECK: [f64; 3] = [1.0, 0.0, -1.0];

/// Roots, coroots and the three ρ vectors, all as vectors in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootDatum3 {
    pub roots: [[f64; 3]; 3],
    pub coroots: [[f64; 3]; 3],
    pub rho0: [f64; 3],
    pub rho1: [f64; 3],
    pub rho2: [f64; 3],
}

impl Default for RootDatum3 {
    fn default() -> Self {
        RootDatum3 {
            roots: [ALPHA1_CHECK, ALPHA2_CHECK, ALPHA3_CHECK],
            coroots: [ALPHA1_CHECK, ALPHA2_CHECK, ALPHA3_CHECK],
            rho0: [1.0, 0.0, -1.0],
            rho1: [0.5, 0.5, -1.0],
            rho2: [1.0, -0.5, -0.5],
        }
    }
}

/// h ↦ Σ v_i h_i.
pub fn dot(v: &[f64; 3], h: &[f64; 3]) -> f64 {
    v[0] * h[0] + v[1] * h[1] + v[2] * h[2]
}

/// Parabolic subgroups containing the upper triangular Borel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parabolic {
    P0,
    P1,
    P2,
    G,
}

/// Characteristic function τ̂_P of {c1 α1∨ + c2 α2∨ : c_i > 0 for α_i ∈ Δ_P}.
/// `x` must lie in the trace-zero plane.
pub fn tau_hat(p: Parabolic, x: &[f64; 3]) -> bool {
    let (c1, c2) = (x[0], -x[2]);
    match p {
        Parabolic::P0 => c1 > 0.0 && c2 > 0.0,
        Parabolic::P1 => c2 > 0.0,
        Parabolic::P2 => c1 > 0.0,
        Parabolic::G => true,
    }
}

/// A permutation of {1,2,3}; `images[i]` is s(i+1) − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylElement {
    images: [usize; 3],
}

const NAMED: [(&str, [usize; 3]); 6] = [
    ("e", [0, 1, 2]),
    ("(12)", [1, 0, 2]),
    ("(13)", [2, 1, 0]),
    ("(23)", [0, 2, 1]),
    ("(123)", [1, 2, 0]),
    ("(321)", [2, 0, 1]),
];

impl WeylElement {
    /// From one-line form (s(1), s(2), s(3)), 1-based.
    pub fn from_one_line(images: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &x in &images {
            if !(1..=3).contains(&x) || seen[x - 1] {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation of 1,2,3")));
            }
            seen[x - 1] = true;
        }
        Ok(WeylElement { images: [images[0] - 1, images[1] - 1, images[2] - 1] })
    }

    /// From cycle notation: "e", "(12)", "(123)", "(321)", ...
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "e" || name == "()" {
            return Ok(Self::identity());
        }
        let inner = name
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidArgument(format!("bad cycle {name}")))?;
        let pts: Vec<usize> = inner
            .chars()
            .filter(|ch| !ch.is_whitespace() && *ch != ',')
            .map(|ch| ch.to_digit(10).map(|d| d as usize).filter(|d| (1..=3).contains(d)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidArgument(format!("bad cycle {name}")))?;
        let mut images = [0usize, 1, 2];
        let mut seen = [false; 3];
        for (k, &a) in pts.iter().enumerate() {
            if seen[a - 1] {
                return Err(Error::InvalidArgument(format!("repeated point in {name}")));
            }
            seen[a - 1] = true;
            images[a - 1] = pts[(k + 1) % pts.len()] - 1;
        }
        Ok(WeylElement { images })
    }

    pub fn identity() -> Self {
        WeylElement { images: [0, 1, 2] }
    }

    /// All six elements in a fixed order.
    pub fn all() -> [WeylElement; 6] {
        NAMED.map(|(_, images)| WeylElement { images })
    }

    /// s(i), 1-based.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn one_line(&self) -> [usize; 3] {
        self.images.map(|x| x + 1)
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement { images: other.images.map(|j| self.images[j]) }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut images = [0; 3];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        WeylElement { images }
    }

    /// Pairs (i, j), 1-based with i < j, such that s(i) > s(j).
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                if self.images[i] > self.images[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn length(&self) -> usize {
        self.inversions().len()
    }

    pub fn name(&self) -> &'static str {
        NAMED.iter().find(|(_, im)| *im == self.images).map(|(n, _)| *n).unwrap()
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// (sλ)_{s(i)} = ℓ_i.
pub fn weyl_act(s: &WeylElement, lam: &SpectralParameter3) -> SpectralParameter3 {
    let mut l = [c(0.0, 0.0); 3];
    for i in 0..3 {
        l[s.images[i]] = lam.l[i];
    }
    SpectralParameter3 { l }
}

/// Action on real vectors of the torus.
pub fn weyl_act_real(s: &WeylElement, h: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[s.images[i]] = h[i];
    }
    out
}

/// λ(α∨) = Σ ℓ_i α∨_i.
pub fn pair(lam: &SpectralParameter3, coroot: &[f64; 3]) -> Complex64 {
    lam.l[0] * coroot[0] + lam.l[1] * coroot[1] + lam.l[2] * coroot[2]
}

/// Δ-eigenvalue 1 − (ℓ1² + ℓ2² + ℓ3²)/2.
pub fn laplace_eigenvalue(lam: &SpectralParameter3) -> Complex64 {
    1.0 - lam.l.iter().map(|z| z * z).sum::<Complex64>() / 2.0
}

/// Euclidean radius of the ball ‖Im λ‖² ≤ 2(T − 1) of eigenvalues up to T.
pub fn ball_radius(t_eig: f64) -> f64 {
    (2.0 * (t_eig - 1.0)).max(0.0).sqrt()
}

/// |Γ(1/2 + ix)/Γ(ix)|² = x tanh(πx).
fn wall_factor(x: f64) -> f64 {
    x * (PI * x).tanh()
}

/// Unnormalized density Π_α x_α tanh(π x_α) at Im λ = y.
pub fn beta_shape(y: &[f64; 3]) -> f64 {
    wall_factor(y[0] - y[1]) * wall_factor(y[1] - y[2]) * wall_factor(y[0] - y[2])
}

/// The same product through reciprocal Gamma values; agrees with
/// [`beta_shape`] where the Gamma values are representable.
pub fn beta_shape_gamma_form(lam: &SpectralParameter3) -> f64 {
    [ALPHA1_CHECK, ALPHA2_CHECK, ALPHA3_CHECK]
        .iter()
        .map(|a| {
            let z = pair(lam, a);
            if z.norm() < 20.0 {
                (gamma(0.5 + z) * recip_gamma(z)).norm_sqr()
            } else {
                (2.0 * (ln_gamma(0.5 + z) - ln_gamma(z)).re).exp()
            }
        })
        .product()
}

fn require_imaginary(lam: &SpectralParameter3) -> Result<()> {
    let re = lam.real().iter().map(|x| x.abs()).fold(0.0, f64::max);
    if re > SUM_ZERO_TOL * (1.0 + lam.norm()) {
        return Err(Error::InvalidArgument(format!("beta needs an imaginary parameter, max |Re| = {re:e}")));
    }
    Ok(())
}

/// β(λ) = c_β Π_α |Γ(1/2 + λ(α∨))/Γ(λ(α∨))|² with the stored c_β.
pub fn beta_density(lam: &SpectralParameter3) -> Result<f64> {
    require_imaginary(lam)?;
    Ok(C_BETA_STORED * beta_shape(&lam.imag()))
}

/// T^{5/2}/(Γ(7/2)(4π)^{5/2}).
pub fn beta_asymptotic(t_eig: f64) -> f64 {
    t_eig.powf(2.5) / (ln_gamma_real(3.5).exp() * (4.0 * PI).powf(2.5))
}

/// ∫ of the unnormalized density over a disc of radius `radius`.
/// The density is invariant under the Weyl group and under y ↦ −y, so the
/// integral is 12 times the sector 0 ≤ θ ≤ π/6 ending on the wall θ = π/6.
pub fn shape_disc_integral(radius: f64, tol: f64) -> Result<f64> {
    shape_annulus_integral(0.0, radius, tol)
}

/// ∫ of the unnormalized density over r_in ≤ ‖y‖ ≤ r_out.
pub fn shape_annulus_integral(r_in: f64, r_out: f64, tol: f64) -> Result<f64> {
    if !(r_in >= 0.0 && r_out >= r_in) {
        return Err(Error::InvalidArgument(format!("annulus [{r_in}, {r_out}] is empty or negative")));
    }
    if r_out == r_in {
        return Ok(0.0);
    }
    let mut failure = None;
    let outer = integrate(
        |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            match angular_integral(r, tol * 1e-2) {
                Ok(v) => r * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        r_in,
        r_out,
        &[1.0, 4.0],
        Tolerance::new(0.0, tol).with_panels(4000),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(12.0 * outer.value)
}

// ∫_0^{π/6} of the density on the circle of radius r
fn angular_integral(r: f64, tol: f64) -> Result<f64> {
    angular_integral_from(r, 0.0, tol)
}

// ∫_{θ0}^{π/6}; the wall θ = π/6 carries a boundary layer of width ~1/r
fn angular_integral_from(r: f64, theta0: f64, tol: f64) -> Result<f64> {
    let wall = PI / 6.0;
    let layer = (1.0 / (PI * r)).min(wall / 2.0);
    let f = |theta: f64| {
        let lam = SpectralParameter3::from_plane(r * theta.cos(), r * theta.sin());
        beta_shape(&lam.imag())
    };
    let breaks = [wall - 8.0 * layer, wall - layer];
    Ok(integrate(f, theta0, wall, &breaks, Tolerance::new(0.0, tol).with_panels(4000))?.value)
}

/// Euclidean distance from Im λ to the nearest wall λ(α∨) = 0.
pub fn wall_distance(lam: &SpectralParameter3) -> f64 {
    [ALPHA1_CHECK, ALPHA2_CHECK, ALPHA3_CHECK]
        .iter()
        .map(|a| pair(lam, a).im.abs() / 2f64.sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// ∫ of the unnormalized density over {‖y‖ ≤ radius, distance to the
/// nearest wall ≤ width}.
pub fn shape_wall_band_integral(radius: f64, width: f64, tol: f64) -> Result<f64> {
    if !(radius >= 0.0 && width >= 0.0) {
        return Err(Error::InvalidArgument(format!("wall band radius {radius}, width {width}")));
    }
    if radius == 0.0 || width == 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    // in the sector 0 ≤ θ ≤ π/6 the nearest wall is θ = π/6, at distance r sin(π/6 − θ)
    let outer = integrate(
        |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            let theta0 = PI / 6.0 - (width / r).min(1.0).asin().min(PI / 6.0);
            match angular_integral_from(r, theta0, tol * 1e-2) {
                Ok(v) => r * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        radius,
        &[width, 2.0 * width],
        Tolerance::new(0.0, tol).with_panels(4000),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(12.0 * outer.value)
}

/// ∫_{‖λ‖ ≤ T} β(λ) dλ over the ball of eigenvalues up to `t_eig`.
pub fn beta_ball_integral(t_eig: f64) -> Result<f64> {
    beta_ball_integral_with(t_eig, C_BETA_STORED, 1e-10)
}

pub fn beta_ball_integral_with(t_eig: f64, c_beta: f64, tol: f64) -> Result<f64> {
    if !(t_eig > 0.0) {
        return Err(Error::InvalidArgument(format!("T = {t_eig} must be positive")));
    }
    Ok(c_beta * shape_disc_integral(ball_radius(t_eig), tol)?)
}

/// c_β making the ball integral equal its asymptotic value at `t_eig`.
/// Running this at [`C_BETA_CALIBRATION_HEIGHT`] regenerates
/// [`C_BETA_STORED`].
pub fn calibrate_c_beta(t_eig: f64) -> Result<f64> {
    Ok(beta_asymptotic(t_eig) / beta_ball_integral_with(t_eig, 1.0, 1e-12)?)
}

/// Leading-order constant: c_β ≈ (5/16)/(Γ(7/2)(4π)^{5/2}).
pub fn c_beta_leading() -> f64 {
    5.0 / 16.0 / (ln_gamma_real(3.5).exp() * (4.0 * PI).powf(2.5))
}

/// Unnormalized radial mass m(r) = ∫_{‖y‖≤r} shape, tabulated once.
pub fn radial_mass_table() -> &'static RadialMass {
    static TABLE: OnceLock<RadialMass> = OnceLock::new();
    TABLE.get_or_init(|| RadialMass::build(64.0, 512).expect("radial mass table"))
}

/// Cumulative unnormalized mass on a uniform radius grid; beyond the grid
/// the large-r expansion takes over.
#[derive(Debug, Clone)]
pub struct RadialMass {
    pub step: f64,
    pub mass: Vec<f64>,
    /// m'(r) at the grid nodes
    pub density: Vec<f64>,
}

impl RadialMass {
    pub fn build(r_max: f64, cells: usize) -> Result<Self> {
        let step = r_max / cells as f64;
        let mut mass = vec![0.0];
        let mut density = vec![0.0];
        for k in 0..cells {
            let lo = k as f64 * step;
            let m = shape_annulus_integral(lo, lo + step, 1e-11)?;
            mass.push(mass[k] + m);
            let r = lo + step;
            density.push(12.0 * r * angular_integral(r, 1e-12)?);
        }
        Ok(RadialMass { step, mass, density })
    }

    pub fn r_max(&self) -> f64 {
        self.step * (self.mass.len() - 1) as f64
    }

    // shape = (√2/2) r³|cos 3θ| outside thin wall layers whose deficit
    // grows like r², so m(r) = 2√2 r⁵/5 + a r³ for large r
    fn far(&self, r: f64) -> f64 {
        let top = self.r_max();
        let m_top = *self.mass.last().unwrap();
        let lead = |x: f64| 2.0 * 2f64.sqrt() * x.powi(5) / 5.0;
        lead(r) + (m_top - lead(top)) / top.powi(3) * r.powi(3)
    }

    /// m(r), by cubic Hermite interpolation on the grid.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.r_max() {
            return self.far(r);
        }
        let k = ((r / self.step) as usize).min(self.mass.len() - 2);
        self.hermite(k, (r - k as f64 * self.step) / self.step)
    }

    fn hermite(&self, k: usize, x: f64) -> f64 {
        let (m0, m1) = (self.mass[k], self.mass[k + 1]);
        let d0 = self.density[k] * self.step;
        let d1 = self.density[k + 1] * self.step;
        let h00 = 2.0 * x.powi(3) - 3.0 * x * x + 1.0;
        let h10 = x.powi(3) - 2.0 * x * x + x;
        let h01 = -2.0 * x.powi(3) + 3.0 * x * x;
        let h11 = x.powi(3) - x * x;
        h00 * m0 + h10 * d0 + h01 * m1 + h11 * d1
    }

    /// Inverse of m: cell search, then bisection inside the cell.
    pub fn inverse(&self, m: f64) -> f64 {
        if m <= 0.0 {
            return 0.0;
        }
        let top = *self.mass.last().unwrap();
        if m >= top {
            let (mut lo, mut hi) = (self.r_max(), 2.0 * self.r_max());
            while self.far(hi) < m {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.far(mid) < m {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            return 0.5 * (lo + hi);
        }
        let k = self.mass.partition_point(|&v| v < m).saturating_sub(1).min(self.mass.len() - 2);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.hermite(k, mid) < m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (k as f64 + 0.5 * (lo + hi)) * self.step
    }
}

fn map_pole(e: Error) -> Error {
    match e {
        Error::PoleAtZeroOrOne { re, im } | Error::PoleOfEisenstein { re, im } => Error::FactorAtPole { re, im },
        Error::PoleAtOne { .. } => Error::FactorAtPole { re: 1.0, im: 0.0 },
        other => other,
    }
}

/// R(s) with poles reported as [`Error::FactorAtPole`].
fn r_factor(engine: &ZetaEngine, s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-8 {
        return Err(Error::FactorAtPole { re: s.re, im: s.im });
    }
    engine.scattering_ratio_r(s).map_err(map_pole)
}

/// M(s, λ) = Π_{i<j, s(i)>s(j)} R(ℓ_i − ℓ_j).
pub fn intertwining_scalar(engine: &ZetaEngine, s: &WeylElement, lam: &SpectralParameter3) -> Result<Complex64> {
    intertwining_scalar_except(engine, s, lam, None)
}

fn intertwining_scalar_except(
    engine: &ZetaEngine,
    s: &WeylElement,
    lam: &SpectralParameter3,
    skip: Option<(usize, usize)>,
) -> Result<Complex64> {
    let mut m = c(1.0, 0.0);
    for (i, j) in s.inversions() {
        if Some((i, j)) == skip {
            continue;
        }
        m *= r_factor(engine, lam.l[i - 1] - lam.l[j - 1])?;
    }
    Ok(m)
}

/// One (s1, s2) summand of the inner-product formula.
#[derive(Debug, Clone, Serialize)]
pub struct LanglandsTerm {
    pub s1: String,
    pub s2: String,
    /// (s1λ1 + s2λ2)(C)
    pub exponent: Complex64,
    /// (s1λ1 + s2λ2)(α1∨) · (s1λ1 + s2λ2)(α2∨)
    pub denominator: Complex64,
    pub m_factor: Complex64,
    pub value: Complex64,
}

/// C = (c, 0, −c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationVector {
    c: f64,
}

impl TruncationVector {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("truncation c = {c} must be positive")));
        }
        Ok(TruncationVector { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.c, 0.0, -self.c]
    }
}

fn term(
    s1: &WeylElement,
    s2: &WeylElement,
    mu: &SpectralParameter3,
    c_vec: &TruncationVector,
    m_factor: Complex64,
) -> LanglandsTerm {
    let exponent = pair(mu, &c_vec.vector());
    let denominator = pair(mu, &ALPHA1_CHECK) * pair(mu, &ALPHA2_CHECK);
    LanglandsTerm {
        s1: s1.name().into(),
        s2: s2.name().into(),
        exponent,
        denominator,
        m_factor,
        value: exponent.exp() / denominator * m_factor,
    }
}

/// The 36 terms for (λ1, λ2) and C = (c, 0, −c), in the order of
/// [`WeylElement::all`] for s1, then s2.
pub fn langlands_terms(
    engine: &ZetaEngine,
    lam1: &SpectralParameter3,
    lam2: &SpectralParameter3,
    c_trunc: f64,
) -> Result<Vec<LanglandsTerm>> {
    let cv = TruncationVector::new(c_trunc)?;
    let mut out = Vec::with_capacity(36);
    for s1 in WeylElement::all() {
        let m1 = intertwining_scalar(engine, &s1, lam1)?;
        let a = weyl_act(&s1, lam1);
        for s2 in WeylElement::all() {
            let mu = a.add(&weyl_act(&s2, lam2));
            let d = pair(&mu, &ALPHA1_CHECK).norm().min(pair(&mu, &ALPHA2_CHECK).norm());
            if d < DENOMINATOR_FLOOR {
                return Err(Error::DenominatorNearZero { s1: s1.name().into(), s2: s2.name().into(), modulus: d });
            }
            let m2 = intertwining_scalar(engine, &s2, lam2)?;
            out.push(term(&s1, &s2, &mu, &cv, m1 * m2));
        }
    }
    Ok(out)
}

/// Σ_{s1,s2 ∈ S3} e^{(s1λ1+s2λ2)(C)} / [(s1λ1+s2λ2)(α1∨)(s1λ1+s2λ2)(α2∨)] M(s1,λ1) M(s2,λ2).
pub fn langlands_minimal_sum(
    engine: &ZetaEngine,
    lam1: &SpectralParameter3,
    lam2: &SpectralParameter3,
    c_trunc: f64,
) -> Result<Complex64> {
    Ok(langlands_terms(engine, lam1, lam2, c_trunc)?.iter().map(|t| t.value).sum())
}

fn check_diagonal(t: [f64; 3]) -> Result<()> {
    if (t[0] + t[1] + t[2]).abs() > SUM_ZERO_TOL * (1.0 + t.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
        return Err(Error::InvalidArgument(format!("t1 + t2 + t3 = {} is not zero", t[0] + t[1] + t[2])));
    }
    let gap = (t[0] - t[1]).abs().min((t[1] - t[2]).abs()).min((t[0] - t[2]).abs());
    if gap < WALL_GAP {
        return Err(Error::WallSingularity { distance: gap });
    }
    Ok(())
}

/// Closed-form limit of the six s1 = s2 terms at λ1 = i(t1,t2,t3) = −λ2:
/// 3c² − 2c(L12 + L23 + L13) + L12 L23 + L13 L23 + L12 L13 with
/// L_ij = R'/R(i(t_i − t_j)).
pub fn diagonal_terms(engine: &ZetaEngine, t1: f64, t2: f64, t3: f64, c_trunc: f64) -> Result<f64> {
    Ok(diagonal_terms_complex(engine, t1, t2, t3, c_trunc)?.re)
}

/// [`diagonal_terms`] before discarding the (vanishing) imaginary part.
pub fn diagonal_terms_complex(engine: &ZetaEngine, t1: f64, t2: f64, t3: f64, c_trunc: f64) -> Result<Complex64> {
    check_diagonal([t1, t2, t3])?;
    TruncationVector::new(c_trunc)?;
    let l = |a: f64, b: f64| engine.scattering_ratio_log_derivative(c(0.0, a - b)).map_err(map_pole);
    let (l12, l23, l13) = (l(t1, t2)?, l(t2, t3)?, l(t1, t3)?);
    Ok(3.0 * c_trunc * c_trunc - 2.0 * c_trunc * (l12 + l23 + l13) + l12 * l23 + l13 * l23 + l12 * l13)
}

/// λ1 = i t + ε(1, 0, −1), λ2 = −i t.
pub fn diagonal_shifted_pair(t: [f64; 3], eps: f64) -> (SpectralParameter3, SpectralParameter3) {
    let lam1 = SpectralParameter3 { l: [c(eps, t[0]), c(0.0, t[1]), c(-eps, t[2])] };
    let lam2 = SpectralParameter3 { l: [c(0.0, -t[0]), c(0.0, -t[1]), c(0.0, -t[2])] };
    (lam1, lam2)
}

/// Sum of the six s1 = s2 terms at the shifted pair.
pub fn diagonal_subset_sum(engine: &ZetaEngine, t: [f64; 3], c_trunc: f64, eps: f64) -> Result<Complex64> {
    let (lam1, lam2) = diagonal_shifted_pair(t, eps);
    let cv = TruncationVector::new(c_trunc)?;
    let mut acc = c(0.0, 0.0);
    for s in WeylElement::all() {
        // M(s, λ1) M(s, λ2) = Π R(ℓ_ij + ε_ij) R(−ℓ_ij); taking the ratio
        // form keeps the product close to 1
        let mut m = c(1.0, 0.0);
        for (i, j) in s.inversions() {
            m *= r_factor(engine, lam1.l[i - 1] - lam1.l[j - 1])? * r_factor(engine, lam2.l[i - 1] - lam2.l[j - 1])?;
        }
        let mu = weyl_act(&s, &lam1).add(&weyl_act(&s, &lam2));
        acc += term(&s, &s, &mu, &cv, m).value;
    }
    Ok(acc)
}

/// Richardson limit ε → 0 of [`diagonal_subset_sum`] over a geometric ladder.
pub fn diagonal_limit_extrapolated(
    engine: &ZetaEngine,
    t: [f64; 3],
    c_trunc: f64,
    ladder: [f64; 3],
) -> Result<Extrapolation> {
    check_diagonal(t)?;
    let ratio = ladder[1] / ladder[0];
    if ((ladder[2] / ladder[1]) - ratio).abs() > 1e-12 {
        return Err(Error::InvalidArgument("ε ladder must be geometric".into()));
    }
    let mut v = [c(0.0, 0.0); 3];
    for (k, &e) in ladder.iter().enumerate() {
        v[k] = diagonal_subset_sum(engine, t, c_trunc, e)?;
    }
    richardson3(v, ratio)
}

/// 3/2·c − R'/R(s, φ) with R(s, φ) = Λ(s, φ)/Λ(s + 1, φ) and s = λ(α∨).
/// Λ'/Λ is available only where the Euler product converges absolutely, so
/// |Re s| ≥ 3/2 is required; the left half-plane goes through Λ(s) = Λ(1 − s).
pub fn max_parabolic_cuspidal_norm_at(s: Complex64, c_trunc: f64, data: &HeckeData) -> Result<Bounded> {
    TruncationVector::new(c_trunc)?;
    let (a, b) = if s.re >= 1.5 {
        let a = hecke_completed_log_derivative(s, data)?;
        let b = hecke_completed_log_derivative(s + 1.0, data)?;
        (a, b)
    } else if s.re <= -1.5 {
        let a = hecke_completed_log_derivative(1.0 - s, data)?;
        let b = hecke_completed_log_derivative(-s, data)?;
        (Bounded { value: -a.value, tail_bound: a.tail_bound }, Bounded { value: -b.value, tail_bound: b.tail_bound })
    } else {
        return Err(Error::OutsideConvergence { re: s.re });
    };
    Ok(Bounded { value: 1.5 * c_trunc - (a.value - b.value), tail_bound: a.tail_bound + b.tail_bound })
}

/// The norm at λ(α∨) = it on the unitary axis. Both Λ'/Λ(1 ± it) sit on the
/// edge of absolute convergence, so this reports `OutsideConvergence`
/// unless the evaluation can be certified.
pub fn max_parabolic_cuspidal_norm(t: f64, c_trunc: f64, data: &HeckeData) -> Result<Bounded> {
    max_parabolic_cuspidal_norm_at(c(0.0, t), c_trunc, data)
}

/// The nine ε = 0 terms, the pole-cancelling pair and their total.
#[derive(Debug, Clone, Serialize)]
pub struct DegenerateResidue {
    pub t: f64,
    pub c: f64,
    pub terms: Vec<LanglandsTerm>,
    /// limit of the (12)×e and (13)×(123) pair
    pub pair: Complex64,
    pub total: Complex64,
}

const RESIDUE_WEYL: [&str; 3] = ["(12)", "(13)", "(321)"];

fn residue_parameters(t: f64) -> (SpectralParameter3, SpectralParameter3) {
    let lam1 = SpectralParameter3 { l: [c(0.5, t), c(-0.5, t), c(0.0, -2.0 * t)] };
    let lam2 = SpectralParameter3 { l: [c(0.5, -t), c(-0.5, -t), c(0.0, 2.0 * t)] };
    (lam1, lam2)
}

fn check_residue_point(t: f64, c_trunc: f64) -> Result<()> {
    TruncationVector::new(c_trunc)?;
    if t.abs() < 1e-2 {
        return Err(Error::PoleProximity { distance: 6.0 * t.abs() });
    }
    Ok(())
}

/// The nine terms with s1, s2 ∈ {(12), (13), (321)} at ε = 0, generated from
/// the Weyl action. The residue at the pole of R(ℓ1 − ℓ2) removes that
/// factor from each intertwining scalar.
pub fn degenerate_residue_terms(engine: &ZetaEngine, t: f64, c_trunc: f64) -> Result<Vec<LanglandsTerm>> {
    check_residue_point(t, c_trunc)?;
    let cv = TruncationVector::new(c_trunc)?;
    let (lam1, lam2) = residue_parameters(t);
    let mut out = Vec::with_capacity(9);
    for n1 in RESIDUE_WEYL {
        let s1 = WeylElement::parse(n1)?;
        let m1 = intertwining_scalar_except(engine, &s1, &lam1, Some((1, 2)))?;
        for n2 in RESIDUE_WEYL {
            let s2 = WeylElement::parse(n2)?;
            let m2 = intertwining_scalar_except(engine, &s2, &lam2, Some((1, 2)))?;
            let mu = weyl_act(&s1, &lam1).add(&weyl_act(&s2, &lam2));
            let d = pair(&mu, &ALPHA1_CHECK).norm().min(pair(&mu, &ALPHA2_CHECK).norm());
            if d < DENOMINATOR_FLOOR {
                return Err(Error::PoleProximity { distance: d });
            }
            out.push(term(&s1, &s2, &mu, &cv, m1 * m2));
        }
    }
    Ok(out)
}

/// F(ε) = R(1/2+3it+3ε) R(−1/2+3it+3ε) R(1/2−3it) R(−1/2−3it).
fn pair_factor(engine: &ZetaEngine, t: f64, eps: f64) -> Result<Complex64> {
    let x = c(3.0 * eps, 3.0 * t);
    Ok(r_factor(engine, 0.5 + x)?
        * r_factor(engine, -0.5 + x)?
        * r_factor(engine, c(0.5, -3.0 * t))?
        * r_factor(engine, c(-0.5, -3.0 * t))?)
}

/// (12)×e + (13)×(123) at ε > 0:
/// [e^{3εc} − e^{−3εc} F(ε)]/(3ε).
pub fn residue_pair_at(engine: &ZetaEngine, t: f64, c_trunc: f64, eps: f64) -> Result<Complex64> {
    check_residue_point(t, c_trunc)?;
    if eps == 0.0 {
        return Err(Error::InvalidArgument("ε must be nonzero".into()));
    }
    let f = pair_factor(engine, t, eps)?;
    Ok(((3.0 * eps * c_trunc).exp() - (-3.0 * eps * c_trunc).exp() * f) / (3.0 * eps))
}

/// ε → 0 limit of the pair. F(0) = 1, so the poles cancel and
/// the limit is 2c − [R'/R(1/2+3it) + R'/R(−1/2+3it)].
pub fn residue_pair_limit(engine: &ZetaEngine, t: f64, c_trunc: f64) -> Result<Complex64> {
    check_residue_point(t, c_trunc)?;
    let x = c(0.0, 3.0 * t);
    let lp = engine.scattering_ratio_log_derivative(0.5 + x).map_err(map_pole)?
        + engine.scattering_ratio_log_derivative(-0.5 + x).map_err(map_pole)?;
    Ok(2.0 * c_trunc - lp)
}

/// Richardson limit of [`residue_pair_at`] over a geometric ladder.
pub fn residue_pair_extrapolated(engine: &ZetaEngine, t: f64, c_trunc: f64, ladder: [f64; 3]) -> Result<Extrapolation> {
    let mut v = [c(0.0, 0.0); 3];
    for (k, &e) in ladder.iter().enumerate() {
        v[k] = residue_pair_at(engine, t, c_trunc, e)?;
    }
    richardson3(v, ladder[1] / ladder[0])
}

/// Sum of the eleven terms contributing to the residue norm.
pub fn degenerate_residue_norm(engine: &ZetaEngine, t: f64, c_trunc: f64) -> Result<DegenerateResidue> {
    let terms = degenerate_residue_terms(engine, t, c_trunc)?;
    let pair = residue_pair_limit(engine, t, c_trunc)?;
    let total = terms.iter().map(|x| x.value).sum::<Complex64>() + pair;
    Ok(DegenerateResidue { t, c: c_trunc, terms, pair, total })
}

/// CSV dump `s1,s2,exponent,denominator,m_factor,value`; complex columns are
/// written as `re+imi`.
pub fn write_terms_csv<W: Write>(terms: &[LanglandsTerm], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s1", "s2", "exponent", "denominator", "m_factor", "value"])
        .map_err(|e| Error::Io(e.to_string()))?;
    let fmt = |z: Complex64| format!("{:e}{:+e}i", z.re, z.im);
    for t in terms {
        w.write_record([
            t.s1.clone(),
            t.s2.clone(),
            fmt(t.exponent),
            fmt(t.denominator),
            fmt(t.m_factor),
            fmt(t.value),
        ])
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
