use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use weyl_core::counting::*;
use weyl_core::sl3_spectral::{ball_radius, weyl_act, SpectralParameter3, WeylElement};
use weyl_core::spectra_io::*;

const VOLUME: f64 = 100.0;

// radius 40 needs eigenvalues up to 1 + 40²/2
fn big() -> &'static SpectralDataset {
    static DS: OnceLock<SpectralDataset> = OnceLock::new();
    DS.get_or_init(|| synthesize_weyl_spectrum(DatasetKind::SL3, 801.0, VOLUME, 7).unwrap())
}

fn manifest() -> Manifest {
    Manifest { kind: DatasetKind::SL3, provenance: "test".into(), completeness_height: 50.0, seed: None, volume: None }
}

fn from_entries(entries: Vec<SpectralParameter3>) -> SpectralDataset {
    let ds = SpectralDataset { manifest: manifest(), entries: Entries::Sl3(entries) };
    ds.validate().unwrap();
    ds
}

fn random_tempered(rng: &mut ChaCha8Rng, r: f64) -> SpectralParameter3 {
    SpectralParameter3::from_plane(rng.random_range(-r..r), rng.random_range(-r..r))
}

#[test]
fn empty_and_full_regions() {
    let ds = big();
    assert_eq!(count_in_region(ds, &RegionSpec::ball(0.0, 1.0).unwrap()).unwrap(), 0);
    assert_eq!(count_in_region(ds, &RegionSpec::ball(1.0, ball_radius(801.0)).unwrap()).unwrap(), ds.len());
    let sl2 = synthesize_weyl_spectrum(DatasetKind::SL2, 100.0, 1.0, 0).unwrap();
    assert!(count_in_region(&sl2, &RegionSpec::ball(1.0, 1.0).unwrap()).is_err());
}

#[test]
fn ball_ratio_at_twenty() {
    let ratio = equidistribution_ratio(big(), &RegionSpec::ball(1.0, 20.0).unwrap(), VOLUME).unwrap();
    assert!((0.9..=1.1).contains(&ratio), "{ratio}");
}

#[test]
fn ball_ratios_stabilize() {
    let ratios: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|&t| equidistribution_ratio(big(), &RegionSpec::ball(1.0, t).unwrap(), VOLUME).unwrap())
        .collect();
    let diffs: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] <= w[0]), "{ratios:?}");
    assert!(diffs[3] < 0.01, "{ratios:?}");
}

#[test]
fn region_and_complement_partition_the_ball() {
    let ds = big();
    let band = RegionSpec::new(Shape::WallBand { radius: 1.0, width: 2.0 }, 30.0).unwrap();
    let rest = band.complement_in_ball(1.0).unwrap();
    let ball = RegionSpec::ball(1.0, 30.0).unwrap();
    let (a, b, n) =
        (count_in_region(ds, &band).unwrap(), count_in_region(ds, &rest).unwrap(), count_in_region(ds, &ball).unwrap());
    assert_eq!(a + b, n);
    let mass = band.beta_integral(1e-10).unwrap() + rest.beta_integral(1e-10).unwrap();
    assert!((mass - ball.beta_integral(1e-10).unwrap()).abs() < 1e-8 * mass);
    let ann = RegionSpec::new(Shape::Annulus { r_in: 0.5, r_out: 1.0 }, 30.0).unwrap();
    let inner = RegionSpec::ball(0.5, 30.0).unwrap();
    let on_sphere = ds.sl3().unwrap().iter().filter(|l| inner.contains(l) && ann.contains(l)).count();
    assert_eq!(count_in_region(ds, &ann).unwrap() + count_in_region(ds, &inner).unwrap() - on_sphere, n);
    let unsupported = RegionSpec::new(
        Shape::Complement { outer: Box::new(Shape::Ball { radius: 0.5 }), inner: Box::new(Shape::Ball { radius: 1.0 }) },
        1.0,
    )
    .unwrap();
    assert!(unsupported.beta_integral(1e-9).is_err());
}

#[test]
fn wall_band_fraction_decreases() {
    let f: Vec<f64> =
        [10.0, 20.0, 40.0].iter().map(|&t| wall_band_fraction(big(), 1.0, 0.5, t).unwrap()).collect();
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
    assert!(f[2] < 0.01);
}

#[test]
fn synthetic_spectrum_is_tempered() {
    let c = classify_dataset(big(), TEMPERED_TOL).unwrap();
    assert_eq!(c.tempered, big().len());
    assert!(c.nontempered_rows.is_empty());
}

#[test]
fn injected_nontempered_entries_are_found() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut entries: Vec<SpectralParameter3> = (0..100).map(|_| random_tempered(&mut rng, 30.0)).collect();
    let rows = [4usize, 17, 60, 99];
    for &row in &rows {
        let a = rng.random_range(1.0..20.0);
        let i = Complex64::i();
        entries[row - 1] = SpectralParameter3::new(0.3 + a * i, -0.3 + a * i, -2.0 * a * i).unwrap();
    }
    let c = classify_dataset(&from_entries(entries.clone()), TEMPERED_TOL).unwrap();
    assert_eq!(c.nontempered_rows, rows.to_vec());
    assert_eq!(c.tempered, 96);
    for lam in &entries {
        assert!(unitary_dual_consistent(lam, 1e-12));
        assert!(nontempered_near_wall(lam, TEMPERED_TOL));
    }
}

#[test]
fn unitary_condition_examples() {
    let i = Complex64::i();
    let far = SpectralParameter3::new(0.2 + 5.0 * i, -0.2 - 2.0 * i, -3.0 * i).unwrap();
    assert!(!unitary_dual_consistent(&far, 1e-9));
    assert!(!classify_tempered(&far, TEMPERED_TOL));
    let sd = SpectralParameter3::new(0.4 + 0.0 * i, 0.0 * i, -0.4 + 0.0 * i).unwrap();
    assert!(unitary_dual_consistent(&sd, 1e-12));
    assert!(classify_self_dual(&sd, 1e-12));
    assert!(nontempered_near_wall(&sd, TEMPERED_TOL));
}

proptest! {
    #[test]
    fn classification_and_regions_are_weyl_invariant(a in -30.0f64..30.0, b in -30.0f64..30.0, re in 0.0f64..0.4, w in 1.0f64..3.0) {
        let i = Complex64::i();
        let lams = [
            SpectralParameter3::from_plane(a, b),
            SpectralParameter3::new(re + a * i, -re + a * i, -2.0 * a * i).unwrap(),
            SpectralParameter3::new(re + a * i, b * i, -re - (a + b) * i).unwrap(),
        ];
        let regions = [
            RegionSpec::ball(1.0, 25.0).unwrap(),
            RegionSpec::new(Shape::WallBand { radius: 1.0, width: w }, 30.0).unwrap(),
            RegionSpec::new(Shape::Annulus { r_in: 0.3, r_out: 0.8 }, 40.0).unwrap(),
        ];
        for lam in &lams {
            for s in WeylElement::all() {
                let img = weyl_act(&s, lam);
                prop_assert_eq!(classify_tempered(&img, TEMPERED_TOL), classify_tempered(lam, TEMPERED_TOL));
                prop_assert_eq!(classify_self_dual(&img, 1e-9), classify_self_dual(lam, 1e-9));
                prop_assert_eq!(unitary_dual_consistent(&img, 1e-9), unitary_dual_consistent(lam, 1e-9));
                for r in &regions {
                    prop_assert_eq!(r.contains(&img), r.contains(lam));
                }
            }
        }
    }
}
