use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::fs;
use weyl_core::counting::{classify_tempered, TEMPERED_TOL};
use weyl_core::error::Error;
use weyl_core::sl3_spectral::{ball_radius, shape_disc_integral, SpectralParameter3, C_BETA_STORED};
use weyl_core::spectra_io::*;
use weyl_core::zeta_toolkit::{primes_up_to, HeckeData};

fn manifest(kind: DatasetKind) -> Manifest {
    Manifest { kind, provenance: "hand-written".into(), completeness_height: 100.0, seed: None, volume: None }
}

fn write_manifest(dir: &std::path::Path, stem: &str, m: &Manifest) -> std::path::PathBuf {
    let csv = dir.join(format!("{stem}.csv"));
    fs::write(manifest_path(&csv), serde_json::to_string(m).unwrap()).unwrap();
    csv
}

#[test]
fn empty_file_loads_as_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [DatasetKind::SL2, DatasetKind::SL3] {
        let csv = write_manifest(dir.path(), &format!("{kind:?}"), &manifest(kind));
        fs::write(&csv, "").unwrap();
        let ds = load_dataset(&csv).unwrap();
        assert!(ds.is_empty());
        assert_eq!(ds.kind(), kind);
    }
}

#[test]
fn sum_zero_violation_is_reported_by_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_manifest(dir.path(), "bad", &manifest(DatasetKind::SL3));
    fs::write(&csv, "l1_re,l1_im,l2_re,l2_im,l3_re,l3_im\n0,1,0,2,0,-3\n0,1,0,2,0.001,-3\n0,4,0,-4,0,0\n").unwrap();
    match load_dataset(&csv) {
        Err(Error::ValidationError { rows, .. }) => assert_eq!(rows, vec![2]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unitarity_bound_violation_is_reported() {
    let text = "l1_re,l1_im,l2_re,l2_im,l3_re,l3_im\n0.6,1,-0.6,2,0,-3\n";
    assert!(matches!(parse_dataset(text, manifest(DatasetKind::SL3)), Err(Error::ValidationError { .. })));
    let text = "r\n3.5\n-1\n";
    match parse_dataset(text, manifest(DatasetKind::SL2)) {
        Err(Error::ValidationError { rows, .. }) => assert_eq!(rows, vec![2]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    match parse_dataset("r\n1\n2\n3,4\n", manifest(DatasetKind::SL2)) {
        Err(Error::ParseError { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    match parse_dataset("x\n1\n", manifest(DatasetKind::SL2)) {
        Err(Error::ParseError { line, .. }) => assert_eq!(line, 1),
        other => panic!("{other:?}"),
    }
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    fs::write(&csv, "r\n").unwrap();
    fs::write(manifest_path(&csv), "{\n\"kind\": \"SL2\",\n\"provenance\": 3\n}").unwrap();
    assert!(matches!(load_dataset(&csv), Err(Error::ParseError { line: 3, .. })));
    let missing = dir.path().join("absent.csv");
    assert!(matches!(load_dataset(&missing), Err(Error::Io(_))));
}

#[test]
fn negative_completeness_rejected() {
    let mut m = manifest(DatasetKind::SL2);
    m.completeness_height = -1.0;
    assert!(matches!(parse_dataset("r\n", m), Err(Error::ValidationError { .. })));
}

#[test]
fn synthesis_is_deterministic() {
    for kind in [DatasetKind::SL2, DatasetKind::SL3] {
        let a = synthesize_weyl_spectrum(kind, 400.0, 30.0, 42).unwrap();
        let b = synthesize_weyl_spectrum(kind, 400.0, 30.0, 42).unwrap();
        let c = synthesize_weyl_spectrum(kind, 400.0, 30.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.manifest.seed, Some(42));
    }
}

#[test]
fn sl2_synthesis_follows_weyl_density() {
    let ds = synthesize_weyl_spectrum(DatasetKind::SL2, 1e4, PI / 3.0, 2024).unwrap();
    let ratio = ds.len() as f64 / (1e4 / 12.0);
    assert!((0.97..=1.03).contains(&ratio), "{ratio}");
    let rs = ds.sl2().unwrap();
    assert!(rs.windows(2).all(|w| w[0] <= w[1]));
    assert!(rs.iter().all(|r| 0.25 + r * r <= 1e4));
}

#[test]
fn poisson_scheme_has_the_right_mean() {
    // mean 833.3 over 40 seeds; the standard error of the average is 4.6
    let counts: Vec<f64> = (0..40)
        .map(|seed| synthesize_with(DatasetKind::SL2, 1e4, PI / 3.0, seed, Scheme::Poisson).unwrap().len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let expected = (PI / 3.0) / (4.0 * PI) * (1e4 - 0.25);
    assert!((mean - expected).abs() < 4.0 * 4.6, "{mean} vs {expected}");
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!(var > 0.4 * expected && var < 1.8 * expected, "variance {var}");
}

#[test]
fn sl3_synthesis_is_tempered_and_matches_mass() {
    let t = 201.0;
    let volume = 50.0;
    let ds = synthesize_weyl_spectrum(DatasetKind::SL3, t, volume, 8).unwrap();
    let entries = ds.sl3().unwrap();
    assert!(entries.iter().all(|l| classify_tempered(l, TEMPERED_TOL)));
    assert!(entries.iter().all(|l| l.norm() <= ball_radius(t) + 1e-12));
    let expected = volume * C_BETA_STORED * shape_disc_integral(ball_radius(t), 1e-10).unwrap();
    assert!((ds.len() as f64 - expected).abs() <= 1.0 + 1e-9, "{} vs {expected}", ds.len());
    let mut p = synthesize_with(DatasetKind::SL3, t, volume, 8, Scheme::Poisson).unwrap();
    p.manifest.provenance.clear();
    assert!(p.sl3().unwrap().iter().all(|l| classify_tempered(l, TEMPERED_TOL)));
}

#[test]
fn synthesis_rejects_bad_arguments() {
    assert!(synthesize_weyl_spectrum(DatasetKind::SL2, 0.0, 1.0, 0).is_err());
    assert!(synthesize_weyl_spectrum(DatasetKind::SL2, 10.0, -1.0, 0).is_err());
    assert!(synthesize_weyl_spectrum(DatasetKind::Hecke, 10.0, 1.0, 0).is_err());
}

#[test]
fn synthetic_datasets_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, t) in [(DatasetKind::SL2, 2000.0), (DatasetKind::SL3, 120.0)] {
        let ds = synthesize_weyl_spectrum(kind, t, 40.0, 5).unwrap();
        let path = dir.path().join(format!("{kind:?}.csv"));
        save_dataset(&ds, &path).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(back, ds);
    }
}

#[test]
fn hecke_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = primes_up_to(50)
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, Complex64::from_polar(1.0, 0.37 * i as f64)))
        .collect();
    let data = HeckeData::new("test form", Complex64::new(0.0, 9.53), alpha, 50).unwrap();
    let path = dir.path().join("hecke.csv");
    save_hecke(&data, &path).unwrap();
    assert_eq!(load_hecke(&path).unwrap(), data);
    fs::write(&path, "p,alpha_re,alpha_im\n2,1,0\n3,x,0\n").unwrap();
    assert!(matches!(load_hecke(&path), Err(Error::ParseError { line: 3, .. })));
}

#[test]
fn config_from_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, r#"{"sigma": 0.1, "zeta": {"kappa": 0.25}}"#).unwrap();
    let cfg = load_config_file(&path).unwrap();
    assert_eq!(cfg.sigma, 0.1);
    assert_eq!(cfg.zeta.kappa, 0.25);
    assert_eq!(cfg.quad_tol, Config::default().quad_tol);
    std::env::set_var(CONFIG_ENV, &path);
    assert_eq!(load_config().unwrap(), cfg);
    std::env::remove_var(CONFIG_ENV);
    assert_eq!(load_config().unwrap(), Config::default());
    fs::write(&path, r#"{"sigma": -1}"#).unwrap();
    assert!(load_config_file(&path).is_err());
}

proptest! {
    #[test]
    fn arbitrary_rows_round_trip(rows in proptest::collection::vec((-0.49f64..0.49, -1e3f64..1e3, -0.49f64..0.49, -1e3f64..1e3), 0..20)) {
        let entries: Vec<SpectralParameter3> = rows
            .iter()
            .filter(|(a, _, c, _)| (a + c).abs() < 0.49)
            .map(|&(a, b, c, d)| {
                let l1 = Complex64::new(a, b);
                let l2 = Complex64::new(c, d);
                SpectralParameter3 { l: [l1, l2, -l1 - l2] }
            })
            .collect();
        let ds = SpectralDataset { manifest: manifest(DatasetKind::SL3), entries: Entries::Sl3(entries) };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        save_dataset(&ds, &path).unwrap();
        prop_assert_eq!(load_dataset(&path).unwrap(), ds);
    }
}
