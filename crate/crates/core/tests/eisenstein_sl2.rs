use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_core::eisenstein_sl2::*;
use weyl_core::selberg_transform::{build_base_bump, smear, TransformTable};
use weyl_core::sl2_geometry::{moebius_act, IntegerMatrix2, UpperHalfPoint};
use weyl_core::zeta_toolkit::{ZetaConfig, ZetaEngine};
use weyl_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn engine() -> ZetaEngine {
    ZetaEngine::new(ZetaConfig::default())
}

fn random_gamma(rng: &mut ChaCha8Rng) -> IntegerMatrix2 {
    let mut g = IntegerMatrix2::IDENTITY;
    for _ in 0..rng.random_range(1..4) {
        g = g.mul(&IntegerMatrix2::translation(rng.random_range(-2..=2))).mul(&IntegerMatrix2::S);
    }
    g
}

fn random_reduced(rng: &mut ChaCha8Rng) -> UpperHalfPoint {
    loop {
        let z = UpperHalfPoint { u: rng.random_range(-0.5..0.5), v: rng.random_range(0.87..2.5) };
        if z.u * z.u + z.v * z.v > 1.0 {
            return z;
        }
    }
}

#[test]
fn constant_term_extraction() {
    let e = engine();
    for (s, v) in [(c(0.5, 3.0), 2.0), (c(0.5, 7.0), 1.2), (c(1.8, 0.0), 1.5), (c(0.4, 0.0), 3.0), (c(0.3, 2.0), 1.0)] {
        let ev = default_evaluator(&e, s).unwrap();
        let numeric = constant_term_numeric(|z| ev.value(z).unwrap(), v, 64);
        assert!((numeric - ev.constant_term(v)).norm() < 1e-8, "s = {s}, v = {v}");
    }
}

#[test]
fn functional_equation() {
    let e = engine();
    let s = c(0.5, 5.0);
    let a = default_evaluator(&e, s).unwrap();
    let b = default_evaluator(&e, 1.0 - s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let z = UpperHalfPoint { u: rng.random_range(-3.0..3.0), v: rng.random_range(0.2..4.0) };
        let lhs = a.value(z).unwrap();
        let rhs = a.phi * b.value(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn automorphy_of_the_expansion() {
    // evaluate the Fourier series directly at γz, without reducing
    let e = engine();
    let s = c(0.5, 3.0);
    let reduced = default_evaluator(&e, s).unwrap();
    let deep = EisensteinEvaluator::auto(&e, s, 0.2, 1e-13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 10 {
        let z = random_reduced(&mut rng);
        let w = moebius_act(&random_gamma(&mut rng), z);
        if w.v < 0.2 {
            continue;
        }
        let direct = deep.fourier_value(w);
        assert!((direct - reduced.value(z).unwrap()).norm() < 1e-8, "{z:?} -> {w:?}");
        checked += 1;
    }
}

#[test]
fn truncation_below_and_above_c() {
    let e = engine();
    let s = c(0.5, 3.0);
    let ev = default_evaluator(&e, s).unwrap();
    let cc = 2.0;
    let below = UpperHalfPoint { u: 0.2, v: 1.7 };
    assert_eq!(ev.truncated(below, cc).unwrap(), ev.value(below).unwrap());
    for u in [-0.4, 0.0, 0.33] {
        let high = UpperHalfPoint { u, v: cc + 6.0 };
        assert!(ev.truncated(high, cc).unwrap().norm() <= 1e-6);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let z = random_reduced(&mut rng);
        let z = UpperHalfPoint { u: z.u, v: z.v * 1.5 };
        let w = moebius_act(&random_gamma(&mut rng), z);
        let a = ev.truncated(z, cc).unwrap();
        let b = ev.truncated(w, cc).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn general_relation_against_quadrature() {
    let e = engine();
    let q = FundamentalQuadrature::default();
    let r = maass_selberg_general_checked(&e, c(1.8, 0.0), c(0.4, 0.0), 2.0, &q).unwrap();
    assert!(r.relative_discrepancy().unwrap() < 1e-4, "{r:?}");
    let (one_sided, _) = maass_selberg_quadrature(&e, c(1.8, 0.0), c(0.4, 0.0), 2.0, &q, true).unwrap();
    assert!((one_sided - r.closed_form).norm() < 1e-4 * r.closed_form.norm());
    let swapped = maass_selberg_general(&e, c(0.4, 0.0), c(1.8, 0.0), 2.0).unwrap();
    assert!((swapped.closed_form - r.closed_form).norm() < 1e-12);
}

#[test]
fn general_relation_off_the_real_axis() {
    let e = engine();
    let q = FundamentalQuadrature::default();
    let r = maass_selberg_general_checked(&e, c(0.7, 2.0), c(0.6, -1.0), 1.5, &q).unwrap();
    assert!(r.relative_discrepancy().unwrap() < 1e-4, "{r:?}");
}

#[test]
fn critical_value_real_and_matches_quadrature() {
    let e = engine();
    for t in [1.0, 5.0, 17.0] {
        assert!(maass_selberg_critical(&e, t, 2.0).unwrap().closed_form.im.abs() <= 1e-10);
    }
    let r = maass_selberg_critical_checked(&e, 5.0, 2.0, &FundamentalQuadrature::default()).unwrap();
    assert!(r.relative_discrepancy().unwrap() < 1e-4, "{r:?}");
}

#[test]
fn critical_growth_in_c() {
    let e = engine();
    let t = 3.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..=96 {
        let cc = 2.0 + 0.5 * k as f64;
        let v = maass_selberg_critical(&e, t, cc).unwrap().closed_form.re - 2.0 * cc.ln();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    // the oscillating part is bounded by 1/t
    assert!(hi - lo <= 2.0 / t + 1e-9, "{lo} {hi}");
}

#[test]
fn series_limit_matches_general_limit() {
    let e = engine();
    for t in [1e-4, 5e-4, 0.3] {
        let series = maass_selberg_critical(&e, t, 2.0).unwrap().closed_form;
        let limit = critical_limit_from_general(&e, t, 2.0, 1e-3).unwrap();
        assert!((series - limit).norm() < 1e-6, "t = {t}: {series} vs {limit}");
    }
}

#[test]
fn truncated_domain_bounded_by_truncated_norm() {
    let e = engine();
    let q = FundamentalQuadrature::default();
    let inner = truncated_domain_norm_quadrature(&e, 3.0, 2.0, &q).unwrap();
    let (full, _) = critical_norm_quadrature(&e, 3.0, 2.0, &q).unwrap();
    assert!(inner <= full + 1e-9);
}

fn smeared(sigma: f64, t: f64) -> TransformTable {
    let spec = Arc::new(build_base_bump(sigma).unwrap());
    smear(&TransformTable::for_smear(spec, t).unwrap(), t).unwrap()
}

#[test]
fn band_integral_scaling_and_monotonicity() {
    let e = engine();
    let mut ratios = Vec::new();
    for t in [10.0, 20.0, 40.0] {
        let table = smeared(3.0, t);
        let b2 = eisenstein_band_integral(&e, &table, 2.0).unwrap();
        let b3 = eisenstein_band_integral(&e, &table, 3.0).unwrap();
        assert!(b3 > b2);
        ratios.push(b2 / (t * t.ln()));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(lo > 0.0 && hi / lo < 2.0, "{ratios:?}");
}

#[test]
fn band_integral_against_double_quadrature() {
    let e = engine();
    let table = smeared(3.0, 10.0);
    let closed = eisenstein_band_integral(&e, &table, 2.0).unwrap();
    let q = FundamentalQuadrature { tol: 1e-3, periodic_nodes: 32, mode_tol: 1e-7, ..Default::default() };
    let double = eisenstein_band_quadrature(&e, &table, 2.0, 25.0, 1e-2, &q).unwrap();
    assert!(((closed - double) / closed).abs() < 0.1, "{closed} vs {double}");
}

#[test]
fn critical_report_csv() {
    let e = engine();
    let r = maass_selberg_critical(&e, 2.0, 2.0).unwrap();
    let mut buf = Vec::new();
    write_critical_report(&[(2.0, r)], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,ms_closed,ms_quadrature,discrepancy\n"));
}
