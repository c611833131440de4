//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15), fixed
//! Gauss–Legendre rules, and the periodic trapezoid rule.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Values that can be integrated: closed under addition and real scaling.
pub trait QuadValue: Copy + Send + Sync {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Single G7/K15 panel on [a, b].
pub fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Estimate<V> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx).add(f(center + dx));
        kronrod = kronrod.add(pair.scale(WGK[j]));
        if j % 2 == 1 {
            gauss = gauss.add(pair.scale(WG[j / 2]));
        }
    }
    let value = kronrod.scale(half);
    let error = kronrod.add(gauss.scale(-1.0)).scale(half).magnitude();
    Estimate { value, error }
}

struct Panel<V> {
    a: f64,
    b: f64,
    est: Estimate<V>,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Tolerances and refinement cap for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_panels: 2000 }
    }

    pub fn with_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

/// Globally adaptive integration of `f` over [a, b], with the interval
/// first split at `breaks` (points outside (a, b) are ignored).
pub fn integrate<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate<V>> {
    if a == b {
        return Ok(Estimate { value: V::zero(), error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    inner.sort_by(|x, y| x.total_cmp(y));
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = V::zero();
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let est = gk15(&mut f, w[0], w[1]);
        total = total.add(est.value);
        err += est.error;
        heap.push(Panel { a: w[0], b: w[1], est });
    }
    loop {
        let target = tol.abs.max(tol.rel * total.magnitude());
        if err <= target {
            break;
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::BudgetExceeded { intervals: heap.len(), error: err });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::BudgetExceeded { intervals: heap.len() + 1, error: err });
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total = total.add(worst.est.value.scale(-1.0)).add(left.value).add(right.value);
        err += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
    }
    // resum to remove drift from incremental updates
    let mut value = V::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value.add(p.est.value);
        error += p.est.error;
    }
    Ok(Estimate { value: value.scale(sign), error })
}

/// Gauss–Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<Vec<(usize, Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    if let Some((_, x, w)) = cache.lock().unwrap().iter().find(|(m, _, _)| *m == n) {
        return (x.clone(), w.clone());
    }
    let (x, w) = legendre_rule(n);
    cache.lock().unwrap().push((n, x.clone(), w.clone()));
    (x, w)
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed n-point Gauss–Legendre integral over [a, b].
pub fn gauss_legendre_integral<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
) -> V {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = V::zero();
    for (xi, wi) in x.iter().zip(w.iter()) {
        acc = acc.add(f(c + h * xi).scale(*wi));
    }
    acc.scale(h)
}

/// Trapezoid rule for a function of period `b - a`, with `n` nodes.
pub fn periodic_trapezoid<V: QuadValue, F: FnMut(f64) -> V>(mut f: F, a: f64, b: f64, n: usize) -> V {
    let h = (b - a) / n as f64;
    let mut acc = V::zero();
    for k in 0..n {
        acc = acc.add(f(a + (k as f64 + 0.5) * h));
    }
    acc.scale(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let (x, w) = gauss_legendre(12);
        for p in 0..24 {
            let q: f64 = x.iter().zip(w.iter()).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = integrate(|x: f64| x.sqrt().ln(), 0.0, 1.0, &[], Tolerance::new(1e-12, 0.0)).unwrap();
        assert!((est.value + 0.5).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_and_breaks() {
        let f = |x: f64| (x - 0.3).abs();
        let fwd = integrate(f, 0.0, 1.0, &[0.3], Tolerance::new(1e-14, 0.0)).unwrap();
        let back = integrate(f, 1.0, 0.0, &[0.3], Tolerance::new(1e-14, 0.0)).unwrap();
        assert!((fwd.value - (0.045 + 0.245)).abs() < 1e-14);
        assert!((fwd.value + back.value).abs() < 1e-15);
    }

    #[test]
    fn complex_integrand() {
        let est = integrate(
            |x: f64| Complex64::new(0.0, 3.0 * x).exp(),
            0.0,
            std::f64::consts::PI,
            &[],
            Tolerance::new(1e-13, 0.0),
        )
        .unwrap();
        // ∫ e^{3ix} over [0, π] = 2i/3
        assert!((est.value - Complex64::new(0.0, 2.0 / 3.0)).norm() < 1e-13);
    }

    #[test]
    fn budget_error_is_reported() {
        let r = integrate(|x: f64| 1.0 / x, 1e-300, 1.0, &[], Tolerance::new(1e-15, 0.0).with_panels(20));
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn periodic_rule_is_exact_for_trig_polynomials() {
        let v = periodic_trapezoid(|x: f64| (2.0 * std::f64::consts::PI * 5.0 * x).cos().powi(2), 0.0, 1.0, 16);
        assert!((v - 0.5).abs() < 1e-15);
    }
}
