use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_core::numeric::quad::{integrate, Tolerance};
use weyl_core::selberg_transform::*;
use weyl_core::sl2_geometry::{hyperbolic_distance, UpperHalfPoint};
use weyl_core::Complex64;

fn smeared(sigma: f64, t: f64) -> TransformTable {
    let spec = Arc::new(build_base_bump(sigma).unwrap());
    let base = TransformTable::for_smear(spec, t).unwrap();
    smear(&base, t).unwrap()
}

#[test]
fn mellin_nonnegative_on_200_points() {
    let spec = build_base_bump(0.2).unwrap();
    for k in 0..200 {
        let g = harish_to_selberg(&spec, Complex64::new(0.0, k as f64 * 2.5)).unwrap();
        assert!(g.re >= -1e-10 && g.im.abs() < 1e-14, "t = {}", k as f64 * 2.5);
    }
}

#[test]
fn weyl_symmetry_off_axis() {
    let spec = build_base_bump(0.7).unwrap();
    for nu in [Complex64::new(0.3, 0.0), Complex64::new(0.25, 3.0), Complex64::new(-0.1, 7.5)] {
        let a = harish_to_selberg(&spec, nu).unwrap();
        let b = harish_to_selberg(&spec, -nu).unwrap();
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn rapid_decay_order_four() {
    let spec = build_base_bump(3.0).unwrap();
    let weighted = |t: f64| spec.ghat_imag(t).abs() * (1.0 + t).powi(4);
    let early = (0..=400).map(|k| weighted(10.0 + 0.1 * k as f64)).fold(0.0, f64::max);
    let late = (0..=500).map(|k| weighted(50.0 + 0.1 * k as f64)).fold(0.0, f64::max);
    assert!(late <= early, "{late} > {early}");
}

#[test]
fn window_property_at_t20() {
    let s = smeared(3.0, 20.0);
    for (k, &t) in s.grid.iter().enumerate() {
        let v = s.ghat_t[k];
        assert!(v >= 0.0);
        if t.abs() <= 15.0 {
            assert!((v - 1.0).abs() <= 0.01, "t = {t}");
        }
        if t.abs() >= 25.0 {
            assert!(v.abs() <= 0.01, "t = {t}");
        }
    }
    assert!(s.smear_value(40.0, 20.0) <= 1e-6);
    assert!((s.smear_value(0.0, 20.0) - 1.0).abs() < 1e-5);
}

#[test]
fn smeared_values_match_direct_transform() {
    let s = smeared(1.0, 5.0);
    for &t in &[0.0, 3.3, 5.0, 7.1, 12.0] {
        let direct = smeared_transform(&s.spec, 5.0, Complex64::new(0.0, t)).unwrap().re;
        assert!((s.smear_value(t, 5.0) - direct).abs() < 1e-9, "t = {t}");
    }
}

#[test]
fn identity_value_against_tanh_integral() {
    let t = 10.0;
    let s = smeared(6.0, t);
    let exact = integrate(|x: f64| x * (PI * x).tanh(), -t, t, &[0.0], Tolerance::new(1e-13, 1e-13)).unwrap().value / (4.0 * PI);
    let g = g_at_identity(&s);
    assert!(((g - exact) / exact).abs() < 0.01, "{g} vs {exact}");
    assert!(g > 0.0);
}

#[test]
fn pointwise_at_basepoint_and_maximum() {
    let s = smeared(1.0, 5.0);
    let gi = g_at_identity(&s);
    assert!((pointwise_from_transform(&s, UpperHalfPoint::I) - gi).abs() < 1e-10 * gi);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let z = UpperHalfPoint { u: rng.random_range(-1.5..1.5), v: rng.random_range(0.3..3.0) };
        assert!(pointwise_from_transform(&s, z).abs() <= gi * (1.0 + 1e-10));
    }
}

#[test]
fn support_preserved_under_smearing() {
    let sigma = 1.0;
    let s = smeared(sigma, 5.0);
    let gi = g_at_identity(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 40 {
        let z = UpperHalfPoint { u: rng.random_range(-4.0..4.0), v: rng.random_range(0.05..6.0) };
        let d = hyperbolic_distance(UpperHalfPoint::I, z);
        if d > sigma && d < 3.0 * sigma {
            assert!(pointwise_from_transform(&s, z).abs() <= 1e-4 * gi, "d = {d}");
            checked += 1;
        }
    }
}

#[test]
fn spherical_function_bounded_on_critical_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let s = Complex64::new(0.5, rng.random_range(-20.0..20.0));
        let z = UpperHalfPoint { u: rng.random_range(-2.0..2.0), v: rng.random_range(0.1..5.0) };
        assert!(spherical_function(s, z).norm() <= 1.0 + 1e-12);
    }
}

#[test]
fn eigen_identity_matches_mellin() {
    let spec = Arc::new(build_base_bump(1.0).unwrap());
    let base = TransformTable::base(spec.clone(), 250.0).unwrap();
    let s = smear(&TransformTable::for_smear(spec, 5.0).unwrap(), 5.0).unwrap();
    let nus = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(-0.3, 0.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(0.0, -2.0),
        Complex64::new(0.25, 3.0),
    ];
    for table in [&base, &s] {
        for p in roundtrip(table, &nus).unwrap() {
            assert!(p.discrepancy < 1e-4, "{:?}", p);
        }
    }
    let real = selberg_eigen_identity(&base, Complex64::new(0.3, 0.0)).unwrap();
    assert!(real.im.abs() < 1e-14);
}

#[test]
fn csv_export_header() {
    let spec = Arc::new(build_base_bump(3.0).unwrap());
    let base = TransformTable::base(spec, 5.0).unwrap();
    let mut buf = Vec::new();
    base.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,ghat,ghat_T\n"));
    assert_eq!(text.lines().count(), base.grid.len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn smear_is_nonnegative_and_even(t_half in 0.5f64..30.0, t in -60.0f64..60.0) {
        let spec = Arc::new(build_base_bump(2.0).unwrap());
        let base = TransformTable::base(spec, 120.0).unwrap();
        let a = base.smear_value(t, t_half);
        prop_assert!(a >= 0.0);
        prop_assert_eq!(a, base.smear_value(-t, t_half));
    }

    #[test]
    fn profile_reflection(sigma in 0.05f64..3.0, x in 0.0f64..1.0) {
        let spec = build_base_bump(sigma).unwrap();
        let v = (x * sigma).exp();
        prop_assert!((spec.profile(v) - spec.profile(1.0 / v)).abs() <= 1e-15 * spec.profile(1.0));
    }
}
