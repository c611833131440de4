//! Modified Bessel function K_ν(x) for complex order and real x > 0.
//!
//! K_ν(x) = ∫_0^∞ e^{−x cosh u} cosh(νu) du. The integrand is analytic in a
//! strip around the real u-axis, so the trapezoid rule converges
//! geometrically; the step is halved until successive sums agree.

use num_complex::Complex64;

/// K_ν(x) for x > 0.
pub fn bessel_k(nu: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    if nu.im.abs() > 2.0 {
        return shifted_contour(nu, x);
    }
    let f = |u: f64| (-x * u.cosh()).exp() * (nu * u).cosh();
    let u_max = decay_radius(x, nu.re.abs());
    trapezoid(f, 0.0, u_max, 0.25f64.min(u_max / 8.0), 0.5)
}

// smallest u with x (cosh u − 1) − a u ≥ 46
fn decay_radius(x: f64, a: f64) -> f64 {
    let mut u_max = (1.0 + 46.0 / x).acosh();
    while x * (u_max.cosh() - 1.0) < 46.0 + a * u_max {
        u_max *= 1.25;
    }
    u_max
}

// trapezoid on [lo, hi] with endpoint weight `w_lo` at lo (½ for a symmetric
// half-line, 1 when lo is an interior cut), halving until stable
fn trapezoid<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, h0: f64, w_lo: f64) -> Complex64 {
    let mut n = ((hi - lo) / h0).ceil().max(1.0) as usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = f(lo) * w_lo;
    let mut scale = sum.norm();
    for k in 1..=n {
        let v = f(lo + k as f64 * h);
        scale += v.norm();
        sum += v;
    }
    let mut prev = sum * h;
    let mut prev_diff = f64::INFINITY;
    for _ in 0..14 {
        let mut mid = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let v = f(lo + (k as f64 + 0.5) * h);
            scale += v.norm();
            mid += v;
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let diff = (cur - prev).norm();
        let mass = scale * h;
        // stop once converged, or once the differences sit at the rounding level
        if diff <= 1e-15 * mass || (diff <= 1e-12 * mass && diff > 0.25 * prev_diff) {
            return cur;
        }
        prev = cur;
        prev_diff = diff;
    }
    prev
}

// K_ν(x) = ½ ∫ exp(−x cosh w + νw) dw along Im w = α. For |Im ν| large the
// real-axis integrand is O(e^{−x}) while the result is O(e^{−π|Im ν|/2}); the
// shifted line passes near the saddle and removes that cancellation.
fn shifted_contour(nu: Complex64, x: f64) -> Complex64 {
    let nu = if nu.im < 0.0 { -nu } else { nu };
    let b = nu.im;
    let delta = (2.0 / b).min(0.5 * std::f64::consts::FRAC_PI_2);
    let alpha = (b / x).min(1.0).asin().min(std::f64::consts::FRAC_PI_2 - delta);
    let shift = Complex64::new(0.0, alpha);
    let xc = x * alpha.cos();
    let u_max = decay_radius(xc, nu.re.abs());
    let rate = x * u_max.cosh() + b;
    let h0 = 0.25f64.min(2.0 / rate).min(u_max / 8.0);
    let f = |u: f64| {
        let w = Complex64::new(u, 0.0) + shift;
        (-x * w.cosh() + nu * w).exp()
    };
    // fold the line onto [0, ∞) so the trapezoid sees an even integrand
    trapezoid(|u| f(u) + f(-u), 0.0, u_max, h0, 0.5) * 0.5
}
