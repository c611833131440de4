//! One function per subcommand. Each returns a report and, when asked for,
//! writes its CSV table.

use std::f64::consts::PI;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use weyl_core::counting::{
    classify_dataset, classify_self_dual, classify_tempered, count_in_region, equidistribution_ratio,
    nontempered_near_wall, RegionSpec,
};
use weyl_core::eisenstein_sl2::{maass_selberg_critical_checked, write_critical_report, FundamentalQuadrature};
use weyl_core::partial_trace_sl2::{lower_bound_check, weyl_ratio};
use weyl_core::selberg_transform::{build_base_bump, roundtrip, smear, TransformTable};
use weyl_core::sl3_spectral::{
    beta_asymptotic, beta_ball_integral_with, calibrate_c_beta, degenerate_residue_norm, diagonal_limit_extrapolated,
    diagonal_terms_complex, residue_pair_extrapolated, write_terms_csv, C_BETA_STORED, EPS_LADDER,
};
use weyl_core::spectra_io::{load_dataset, synthesize_weyl_spectrum, Config, DatasetKind, SpectralDataset};
use weyl_core::zeta_toolkit::{fit_zero_density_constant, ZetaEngine};
use weyl_core::{Complex64, Error, Result};

use crate::report::{num, Check, Report, Table};

const IDENTITY_TOL: f64 = 1e-10;
const ZERO_HEIGHTS: [f64; 3] = [20.0, 50.0, 100.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cnum(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn write_table(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => table.write(p),
        None => Ok(()),
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {x} must be positive")))
    }
}

pub fn zeta_check(engine: &ZetaEngine, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new("zeta check");
    let mut table = Table::new(&["identity", "s_re", "s_im", "residual"]);
    let mut worst = [0.0f64; 3];
    // 10 × 10 lattice of the strip −1 ≤ Re s ≤ 2, |Im s| ≤ 50
    for i in 0..10 {
        for j in 0..10 {
            let s = c(-1.0 + 3.0 * i as f64 / 9.0, -50.0 + 100.0 * j as f64 / 9.0);
            if s.norm() < 1e-3 || (s - 1.0).norm() < 1e-3 {
                continue;
            }
            let z = engine.completed_zeta(s)?;
            let scale = z.norm().max(1.0);
            let fe = (z - engine.completed_zeta(1.0 - s)?).norm() / scale;
            let conj = (z.conj() - engine.completed_zeta(s.conj())?).norm() / scale;
            let res = fe.max(conj);
            worst[0] = worst[0].max(res);
            table.push(vec!["completed_zeta".into(), num(s.re), num(s.im), num(res)]);
            let s = c(-3.0 + 6.0 * i as f64 / 9.0, s.im);
            if s.norm() < 1e-2 || (s.norm() - 1.0).abs() < 1e-2 {
                continue;
            }
            let p = engine.scattering_ratio_r(s)? * engine.scattering_ratio_r(-s)?;
            let res = (p - 1.0).norm();
            worst[1] = worst[1].max(res);
            table.push(vec!["ratio_reflection".into(), num(s.re), num(s.im), num(res)]);
        }
    }
    for k in 0..100 {
        let t = 0.1 + k as f64 * (50.0 - 0.1) / 99.0;
        for t in [t, -t] {
            let res = (engine.phi_scattering(c(0.5, t))?.norm() - 1.0).abs();
            worst[2] = worst[2].max(res);
            table.push(vec!["phi_unimodular".into(), "0.5".into(), num(t), num(res)]);
        }
    }
    report.check(Check::at_most("functional_equation", worst[0], IDENTITY_TOL));
    report.check(Check::at_most("ratio_reflection", worst[1], IDENTITY_TOL));
    report.check(Check::at_most("phi_unimodular", worst[2], IDENTITY_TOL));
    let kappa = fit_zero_density_constant(engine, &ZERO_HEIGHTS)?;
    let mut windows = Vec::new();
    for h in ZERO_HEIGHTS {
        let n = engine.count_critical_zeros(h, 1.0)?.count;
        windows.push(json!({"height": h, "count": n, "bound": kappa * h.ln()}));
    }
    report.set("kappa_fit", kappa);
    report.set("zero_windows", windows);
    write_table(&table, out)?;
    Ok(report)
}

pub fn ms2_verify(engine: &ZetaEngine, cfg: &Config, t: f64, c_height: f64, tol: f64, out: Option<&Path>) -> Result<Report> {
    positive("tol", tol)?;
    let q = FundamentalQuadrature { tol: cfg.quad_tol, periodic_nodes: cfg.periodic_nodes, ..Default::default() };
    let r = maass_selberg_critical_checked(engine, t, c_height, &q)?;
    let mut report = Report::new("ms2 verify");
    let rel = r.relative_discrepancy().unwrap_or(f64::INFINITY);
    report.check(Check::at_most("relative_discrepancy", rel, tol));
    report.set("t", t);
    report.set("c", c_height);
    report.set("closed_form", r.closed_form.re);
    report.set("quadrature", r.quadrature.map(|q| q.re));
    report.set("discrepancy", r.discrepancy);
    report.set("tail_bound", r.tail_bound);
    if let Some(p) = out {
        write_critical_report(&[(t, r)], File::create(p)?)?;
    }
    Ok(report)
}

fn smeared_pair(sigma: f64, t_half: f64) -> Result<(TransformTable, TransformTable)> {
    let spec = Arc::new(build_base_bump(sigma)?);
    let base = TransformTable::for_smear(spec, t_half)?;
    let smeared = smear(&base, t_half)?;
    Ok((base, smeared))
}

pub fn transform_roundtrip(sigma: f64, t_half: f64, tol: f64, out: Option<&Path>) -> Result<Report> {
    positive("tol", tol)?;
    let (base, smeared) = smeared_pair(sigma, t_half)?;
    let nus = [c(0.0, 0.0), c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 2.0), c(0.25, 3.0)];
    let points = roundtrip(&base, &nus)?;
    let mut report = Report::new("transform roundtrip");
    let worst = points.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
    report.check(Check::at_most("roundtrip_discrepancy", worst, tol));
    // |ĝ_T − 1| on |t| ≤ T − 5 and |ĝ_T| on |t| ≥ T + 5
    let (mut inside, mut outside) = (0.0f64, 0.0f64);
    for (&t, &v) in smeared.grid.iter().zip(smeared.values()) {
        if t.abs() <= t_half - 5.0 {
            inside = inside.max((v - 1.0).abs());
        }
        if t.abs() >= t_half + 5.0 {
            outside = outside.max(v.abs());
        }
    }
    report.check(Check::at_most("window_inside", inside, 0.01));
    report.check(Check::at_most("window_outside", outside, 0.01));
    let rows: Vec<Value> = points
        .iter()
        .map(|p| json!({"nu": cnum(p.nu), "mellin": cnum(p.mellin), "quadrature": cnum(p.quadrature), "discrepancy": p.discrepancy}))
        .collect();
    report.set("sigma", sigma);
    report.set("t_half", t_half);
    report.set("points", rows);
    if let Some(p) = out {
        smeared.write_csv(File::create(p)?)?;
    }
    Ok(report)
}

fn dataset_or_synthetic(path: Option<&PathBuf>, kind: DatasetKind, t_max: f64, volume: f64, seed: u64) -> Result<SpectralDataset> {
    match path {
        Some(p) => load_dataset(p),
        None => synthesize_weyl_spectrum(kind, t_max, volume, seed),
    }
}

pub struct TraceArgs<'a> {
    pub t_half: f64,
    pub c_height: f64,
    pub sigma: f64,
    pub dataset: Option<&'a PathBuf>,
    pub seed: u64,
}

pub fn trace_report(engine: &ZetaEngine, a: TraceArgs, out: Option<&Path>) -> Result<Report> {
    let (_, table) = smeared_pair(a.sigma, a.t_half)?;
    // a synthetic spectrum must reach past the support of ĝ_T
    let support = 0.25 + table.t_max().powi(2);
    let ds = dataset_or_synthetic(a.dataset, DatasetKind::SL2, support + 1.0, PI / 3.0, a.seed)?;
    let r = lower_bound_check(engine, &ds, &table, a.c_height)?;
    let mut report = Report::new("trace report");
    let floor = -(r.tolerance + 2.0 * r.sampling_noise);
    report.check(Check::at_least("inequality_slack", r.inequality_slack, floor));
    report.set("report", serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?);
    report.set("synthetic", a.dataset.is_none());
    report.set("complete_to_support", ds.manifest.completeness_height >= support);
    let mut t = Table::new(&[
        "T", "C", "sigma", "identity", "elliptic", "elliptic_error", "eisenstein", "spectral", "constant", "noise",
        "slack", "tolerance", "violation",
    ]);
    t.push(
        [r.t, r.c, r.sigma, r.identity_term, r.elliptic_term, r.elliptic_error, r.eisenstein_term, r.spectral_sum]
            .iter()
            .chain(&[r.constant_term, r.sampling_noise, r.inequality_slack, r.tolerance])
            .map(|&x| num(x))
            .chain([r.violation.to_string()])
            .collect(),
    );
    write_table(&t, out)?;
    Ok(report)
}

pub fn weyl_sweep(
    dataset: Option<&PathBuf>,
    t_max: f64,
    steps: usize,
    band: (f64, f64),
    seed: u64,
    out: Option<&Path>,
) -> Result<Report> {
    positive("tmax", t_max)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let ds = dataset_or_synthetic(dataset, DatasetKind::SL2, t_max, PI / 3.0, seed)?;
    let rs = ds.sl2().ok_or_else(|| Error::InvalidArgument("Weyl sweep needs an SL2 dataset".into()))?;
    let mut table = Table::new(&["T", "count", "ratio"]);
    let mut rows = Vec::new();
    let mut last = f64::NAN;
    for k in 1..=steps {
        let t = t_max * k as f64 / steps as f64;
        let ratio = weyl_ratio(&ds, t)?;
        let count = 1 + rs.iter().filter(|&&r| 0.25 + r * r <= t).count();
        table.push(vec![num(t), count.to_string(), num(ratio)]);
        rows.push(json!({"T": t, "count": count, "ratio": ratio}));
        last = ratio;
    }
    let mut report = Report::new("weyl sweep");
    report.check(Check::at_least("ratio_lower", last, band.0));
    report.check(Check::at_most("ratio_upper", last, band.1));
    report.set("provenance", ds.manifest.provenance.clone());
    report.set("completeness_height", ds.manifest.completeness_height);
    report.set("sweep", rows);
    write_table(&table, out)?;
    Ok(report)
}

pub fn sl3_diagonal(engine: &ZetaEngine, t: [f64; 3], c_trunc: f64, tol: f64, out: Option<&Path>) -> Result<Report> {
    positive("tol", tol)?;
    let closed = diagonal_terms_complex(engine, t[0], t[1], t[2], c_trunc)?;
    let x = diagonal_limit_extrapolated(engine, t, c_trunc, EPS_LADDER)?;
    let mut report = Report::new("sl3 diagonal");
    report.check(Check::at_most("extrapolation_discrepancy", (x.limit - closed).norm(), tol));
    report.set("t", t.to_vec());
    report.set("c", c_trunc);
    report.set("closed_form", cnum(closed));
    report.set("extrapolated", cnum(x.limit));
    report.set("extrapolation_error", x.error);
    report.set("observed_order", x.observed_order);
    report.set("ladder", EPS_LADDER.to_vec());
    let mut table = Table::new(&["t1", "t2", "t3", "c", "closed_re", "closed_im", "limit_re", "limit_im", "error"]);
    table.push(
        [t[0], t[1], t[2], c_trunc, closed.re, closed.im, x.limit.re, x.limit.im, x.error].iter().map(|&v| num(v)).collect(),
    );
    write_table(&table, out)?;
    Ok(report)
}

pub fn sl3_residue(engine: &ZetaEngine, t: f64, c_trunc: f64, out: Option<&Path>) -> Result<Report> {
    let r = degenerate_residue_norm(engine, t, c_trunc)?;
    let x = residue_pair_extrapolated(engine, t, c_trunc, [1e-2, 1e-3, 1e-4])?;
    let mut report = Report::new("sl3 residue");
    let finite = r.total.re.is_finite() && r.total.im.is_finite();
    report.check(Check::at_most("total_finite", if finite { 0.0 } else { f64::INFINITY }, 0.0));
    report.check(Check::at_most("total_imaginary", r.total.im.abs(), 1e-8));
    report.check(Check::at_most("pair_limit_discrepancy", (x.limit - r.pair).norm(), 1e-6));
    report.set("t", t);
    report.set("c", c_trunc);
    report.set("total", cnum(r.total));
    report.set("pair", cnum(r.pair));
    report.set("pair_extrapolated", cnum(x.limit));
    report.set("terms", r.terms.iter().map(|term| json!({"s1": term.s1, "s2": term.s2, "value": cnum(term.value)})).collect::<Vec<_>>());
    if let Some(p) = out {
        write_terms_csv(&r.terms, File::create(p)?)?;
    }
    Ok(report)
}

pub fn sl3_beta(t_eig: f64, out: Option<&Path>) -> Result<Report> {
    positive("T", t_eig)?;
    let calibrated = calibrate_c_beta(t_eig)?;
    let at = |t: f64| beta_ball_integral_with(t, calibrated, 1e-10);
    let (b1, b2) = (at(t_eig)?, at(2.0 * t_eig)?);
    let check_ratio = b2 / beta_asymptotic(2.0 * t_eig);
    let doubling = b2 / b1 / 2f64.powf(2.5);
    let mut report = Report::new("sl3 beta");
    report.check(Check::at_most("ratio_at_2T", (check_ratio - 1.0).abs(), 0.02));
    report.check(Check::at_most("doubling_law", (doubling - 1.0).abs(), 0.01));
    report.set("T", t_eig);
    report.set("c_beta_calibrated", calibrated);
    report.set("c_beta_stored", C_BETA_STORED);
    report.set("ball_integral", b1);
    report.set("ball_integral_2T", b2);
    report.set("asymptotic", beta_asymptotic(t_eig));
    report.set("ratio_at_2T", check_ratio);
    report.set("doubling", doubling);
    let mut table = Table::new(&["T", "ball_integral", "asymptotic", "ratio"]);
    for (t, b) in [(t_eig, b1), (2.0 * t_eig, b2)] {
        let a = beta_asymptotic(t);
        table.push(vec![num(t), num(b), num(a), num(b / a)]);
    }
    write_table(&table, out)?;
    Ok(report)
}

/// `region` is inline JSON or the path of a JSON file.
pub fn parse_region(region: &str) -> Result<RegionSpec> {
    let text = if region.trim_start().starts_with('{') { region.to_string() } else { std::fs::read_to_string(region)? };
    let spec: RegionSpec = serde_json::from_str(&text)
        .map_err(|e| Error::ParseError { line: e.line(), message: format!("region: {e}") })?;
    RegionSpec::new(spec.shape, spec.scale)
}

pub fn count(cfg: &Config, dataset: &Path, region: &str, volume: Option<f64>, out: Option<&Path>) -> Result<Report> {
    let region = parse_region(region)?;
    let ds = load_dataset(dataset)?;
    let n = count_in_region(&ds, &region)?;
    let class = classify_dataset(&ds, cfg.tempered_tol)?;
    let entries = ds.sl3().unwrap_or(&[]);
    let off_wall = entries.iter().filter(|l| !nontempered_near_wall(l, cfg.tempered_tol)).count();
    let mut report = Report::new("count");
    report.check(Check::at_most("nontempered_off_wall", off_wall as f64, 0.0));
    report.set("count", n);
    report.set("size", ds.len());
    report.set("region", serde_json::to_value(&region).map_err(|e| Error::Io(e.to_string()))?);
    match volume.or(ds.manifest.volume) {
        Some(v) => report.set("equidistribution_ratio", equidistribution_ratio(&ds, &region, v)?),
        None => report.set("equidistribution_ratio", Value::Null),
    }
    report.set("tempered", class.tempered);
    report.set("nontempered_rows", class.nontempered_rows.clone());
    report.set("self_dual", class.self_dual);
    let mut table = Table::new(&["row", "in_region", "tempered", "self_dual"]);
    for (i, l) in entries.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            region.contains(l).to_string(),
            classify_tempered(l, cfg.tempered_tol).to_string(),
            classify_self_dual(l, cfg.tempered_tol).to_string(),
        ]);
    }
    write_table(&table, out)?;
    Ok(report)
}
