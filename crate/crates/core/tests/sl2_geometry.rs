use proptest::prelude::*;
use std::f64::consts::PI;
use weyl_core::sl2_geometry::*;

fn m(a: i64, b: i64, c: i64, d: i64) -> IntegerMatrix2 {
    IntegerMatrix2::new(a, b, c, d).unwrap()
}

fn pt(u: f64, v: f64) -> UpperHalfPoint {
    UpperHalfPoint::new(u, v).unwrap()
}

// words in T = (1 1; 0 1) and S = (0 −1; 1 0), kept while entries stay ≤ 50
fn word(steps: &[i8]) -> IntegerMatrix2 {
    let mut g = IntegerMatrix2::IDENTITY;
    for &k in steps {
        let next = if k == 0 { g.mul(&m(0, -1, 1, 0)) } else { g.mul(&IntegerMatrix2::translation(k as i64)) };
        if [next.a, next.b, next.c, next.d].iter().all(|x| x.abs() <= 50) {
            g = next;
        }
    }
    g
}

#[test]
fn action_examples() {
    let z = pt(0.3, 0.7);
    assert_eq!(moebius_act(&IntegerMatrix2::IDENTITY, z), z);
    let w = moebius_act(&m(1, 1, 0, 1), UpperHalfPoint::I);
    assert!((w.u - 1.0).abs() < 1e-15 && (w.v - 1.0).abs() < 1e-15);
    let w = moebius_act(&m(0, -1, 1, 0), pt(0.0, 2.0));
    assert!(w.u.abs() < 1e-15 && (w.v - 0.5).abs() < 1e-15);
}

#[test]
fn reduction_examples() {
    let (z, g) = reduce(UpperHalfPoint::I).unwrap();
    assert_eq!(z, UpperHalfPoint::I);
    assert!(g.is_plus_minus_identity());
    let (z, g) = reduce(pt(5.0, 1.0)).unwrap();
    assert!(z.u.abs() < 1e-15 && (z.v - 1.0).abs() < 1e-15);
    assert_eq!(g.psl2_normalized(), IntegerMatrix2::translation(-5).psl2_normalized());
    let start = pt(0.3, 0.1);
    let (z, g) = reduce(start).unwrap();
    assert!(z.u.abs() <= 0.5 && z.u * z.u + z.v * z.v >= 1.0 - 1e-12);
    let image = moebius_act(&g, start);
    assert!((image.u - z.u).abs() < 1e-12 && (image.v - z.v).abs() < 1e-12);
}

#[test]
fn truncated_area_by_quadrature() {
    for c in [1.5, 2.0, 5.0, 10.0] {
        let e = integrate_over_truncated(|_| 1.0, c, 1e-10).unwrap();
        assert!((e.value - (PI / 3.0 - 1.0 / c)).abs() < 1e-9, "C = {c}: {}", e.value);
    }
    assert!((area_truncated(2.0) - (PI / 3.0 - 0.5)).abs() < 1e-15);
}

#[test]
fn cusp_unfolding_and_odd_integrands() {
    // ∫_{F_3} v dA = ∫∫ dv/v: the strip √3/2 ≤ v ≤ 3 minus the sliver
    // between v = √3/2 and the arc
    let strip = 3f64.ln() - (3f64.sqrt() / 2.0).ln();
    let n = 20000;
    let h = 1.0 / n as f64;
    let under_arc: f64 = (0..n)
        .map(|k| {
            let u = -0.5 + (k as f64 + 0.5) * h;
            (1.0 - u * u).sqrt().ln() - (3f64.sqrt() / 2.0).ln()
        })
        .sum::<f64>()
        * h;
    let e = integrate_over_truncated(|z| z.v, 3.0, 1e-10).unwrap();
    assert!((e.value - (strip - under_arc)).abs() < 1e-8, "{} vs {}", e.value, strip - under_arc);
    let odd = integrate_over_truncated(|z| z.u.powi(3) * z.v, 3.0, 1e-10).unwrap();
    assert!(odd.value.abs() < 1e-10);
}

#[test]
fn support_at_tiny_sigma_matches_brute_force() {
    let dom = TruncatedDomain::new(2.0).unwrap();
    // fine grid on F_2 including the corners and i
    let mut grid = Vec::new();
    for i in 0..=80 {
        let u = -0.5 + i as f64 / 80.0;
        let lo = (1.0 - u * u).sqrt();
        for j in 0..=80 {
            grid.push(pt(u, lo + (2.0 - lo) * (j as f64 / 80.0).powi(2)));
        }
    }
    let mut brute: Vec<IntegerMatrix2> = Vec::new();
    for c in 0..=10i64 {
        for d in -10..=10i64 {
            for a in -10..=10i64 {
                for b in -10..=10i64 {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    let g = m(a, b, c, d).psl2_normalized();
                    if g.is_plus_minus_identity() || brute.contains(&g) {
                        continue;
                    }
                    let best = grid.iter().map(|z| hyperbolic_distance(*z, moebius_act(&g, *z))).fold(f64::INFINITY, f64::min);
                    if best < 0.05 {
                        brute.push(g);
                    }
                }
            }
        }
    }
    brute.sort_by_key(|g| (g.c, g.d, g.a, g.b));
    let found: Vec<IntegerMatrix2> =
        kernel_support_elements(2.0, 0.01).unwrap().elements.iter().map(|e| e.gamma).collect();
    assert_eq!(found, brute);
    for g in &found {
        assert!(g.trace().abs() < 2, "{g:?} is not elliptic");
        assert!(min_displacement(g, &dom).0 < 1e-6);
    }
}

#[test]
fn small_sigma_support_is_elliptic() {
    for c in [1.5, 2.0, 3.0] {
        let s = kernel_support_elements(c, 0.9 * translation_displacement(c)).unwrap();
        assert!(s.identity_included);
        assert!(s.elements.iter().all(|e| e.gamma.trace().abs() < 2));
    }
}

proptest! {
    #[test]
    fn action_is_an_action(
        w1 in proptest::collection::vec(-3i8..=3, 1..8),
        w2 in proptest::collection::vec(-3i8..=3, 1..8),
        u in -2.0f64..2.0, v in 0.05f64..3.0,
    ) {
        let (g, h) = (word(&w1), word(&w2));
        let z = pt(u, v);
        let a = moebius_act(&g.mul(&h), z);
        let b = moebius_act(&g, moebius_act(&h, z));
        let scale = 1.0 + a.u.abs() + a.v.abs();
        prop_assert!((a.u - b.u).abs() < 1e-12 * scale && (a.v - b.v).abs() < 1e-12 * scale);
    }

    #[test]
    fn point_pair_invariant_is_symmetric_and_invariant(
        w in proptest::collection::vec(-3i8..=3, 1..6),
        u1 in -1.0f64..1.0, v1 in 0.3f64..2.0, u2 in -1.0f64..1.0, v2 in 0.3f64..2.0,
    ) {
        let g = word(&w);
        let (z, x) = (pt(u1, v1), pt(u2, v2));
        let before = point_pair_u(z, x);
        prop_assert!((before - point_pair_u(x, z)).abs() <= 1e-15 * (1.0 + before));
        let after = point_pair_u(moebius_act(&g, z), moebius_act(&g, x));
        prop_assert!((before - after).abs() < 1e-12 * (1.0 + before), "{} vs {}", before, after);
    }

    #[test]
    fn reduce_lands_in_domain_and_is_idempotent(u in -20.0f64..20.0, v in 0.01f64..5.0) {
        let (z, g) = reduce(pt(u, v)).unwrap();
        prop_assert!(z.u >= -0.5 - 1e-12 && z.u <= 0.5 + 1e-12);
        prop_assert!(z.u * z.u + z.v * z.v >= 1.0 - 1e-9);
        let img = moebius_act(&g, pt(u, v));
        prop_assert!((img.u - z.u).abs() < 1e-9 * (1.0 + z.v) && (img.v - z.v).abs() < 1e-9 * (1.0 + z.v));
        let (z2, g2) = reduce(z).unwrap();
        prop_assert!(g2.is_plus_minus_identity(), "{:?} at {:?}", g2, z);
        prop_assert_eq!(z2, z);
    }
}
