//! The acceptance criteria, each evaluated to a single verdict with the
//! numbers behind it.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weyl_core::counting::{
    classify_self_dual, classify_tempered, count_in_region, wall_band_fraction, RegionSpec, Shape, TEMPERED_TOL,
};
use weyl_core::eisenstein_sl2::{eisenstein_band_integral, maass_selberg_critical_checked, FundamentalQuadrature};
use weyl_core::partial_trace_sl2::{geometric_side, log_log_slope, lower_bound_check_many, ELLIPTIC_REL_TOL};
use weyl_core::selberg_transform::{build_base_bump, roundtrip, smear, TransformTable};
use weyl_core::sl3_spectral::{
    beta_asymptotic, beta_ball_integral_with, calibrate_c_beta, degenerate_residue_norm, diagonal_limit_extrapolated,
    diagonal_terms, residue_pair_extrapolated, weyl_act, SpectralParameter3, WeylElement, EPS_LADDER,
};
use weyl_core::spectra_io::{load_dataset, synthesize_weyl_spectrum, DatasetKind, SpectralDataset};
use weyl_core::zeta_toolkit::{fit_zero_density_constant, ZetaEngine};
use weyl_core::{Complex64, Result};

pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} {:<28} {:>7.2}s  {}", self.id, self.name, self.seconds, self.detail)
    }
}

struct Verdict {
    passed: bool,
    detail: String,
    /// wall-clock limit in seconds, if the criterion has one
    limit: Option<f64>,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail, limit: None })
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> Result<Verdict>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(v) => {
            let slow = v.limit.is_some_and(|l| seconds >= l);
            let detail = if slow { format!("{}; over the {}s limit", v.detail, v.limit.unwrap()) } else { v.detail };
            Outcome { id, name, passed: v.passed && !slow, detail, seconds }
        }
        Err(e) => Outcome { id, name, passed: false, detail: format!("error: {e}"), seconds },
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn smeared(sigma: f64, t: f64) -> Result<TransformTable> {
    let spec = Arc::new(build_base_bump(sigma)?);
    smear(&TransformTable::for_smear(spec, t)?, t)
}

pub fn functional_equations() -> Outcome {
    timed(1, "functional equations", || {
        let e = ZetaEngine::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut fe, mut rr, mut phi) = (0.0f64, 0.0f64, 0.0f64);
        let mut n = 0;
        while n < 100 {
            let s = c(rng.random_range(-1.0..2.0), rng.random_range(-50.0..50.0));
            if s.norm() < 1e-3 || (s - 1.0).norm() < 1e-3 {
                continue;
            }
            let z = e.completed_zeta(s)?;
            let scale = z.norm().max(1.0);
            fe = fe.max((z - e.completed_zeta(1.0 - s)?).norm() / scale);
            fe = fe.max((z.conj() - e.completed_zeta(s.conj())?).norm() / scale);
            n += 1;
        }
        for _ in 0..100 {
            let s = c(rng.random_range(-3.0..3.0), rng.random_range(-50.0..50.0));
            if [0.0, 1.0, -1.0, 2.0, -2.0].iter().any(|p| (s - *p).norm() < 1e-2) {
                continue;
            }
            rr = rr.max((e.scattering_ratio_r(s)? * e.scattering_ratio_r(-s)? - 1.0).norm());
        }
        for k in 0..200 {
            let t = 0.1 + k as f64 * (50.0 - 0.1) / 199.0;
            for t in [t, -t] {
                phi = phi.max((e.phi_scattering(c(0.5, t))?.norm() - 1.0).abs());
            }
        }
        let passed = fe <= 1e-10 && rr <= 1e-10 && phi <= 1e-10;
        let detail = format!("max residuals Z(s)=Z(1-s) {fe:.1e}, R(s)R(-s)=1 {rr:.1e}, |phi|=1 {phi:.1e} (tol 1e-10)");
        Ok(Verdict { passed, detail, limit: Some(10.0) })
    })
}

pub fn maass_selberg() -> Outcome {
    timed(2, "Maass-Selberg vs quadrature", || {
        let e = ZetaEngine::default();
        let q = FundamentalQuadrature::default();
        let mut worst: f64 = 0.0;
        let mut slowest: f64 = 0.0;
        for (t, cc) in [(3.0, 2.0), (7.0, 2.0), (13.0, 3.0)] {
            let start = Instant::now();
            let r = maass_selberg_critical_checked(&e, t, cc, &q)?;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.max(r.relative_discrepancy().unwrap_or(f64::INFINITY));
        }
        let passed = worst <= 1e-4 && slowest < 60.0;
        verdict(passed, format!("max relative discrepancy {worst:.2e} (tol 1e-4), slowest case {slowest:.2}s"))
    })
}

pub fn transform_roundtrip() -> Outcome {
    timed(3, "transform roundtrip + window", || {
        let sigma = 3.0;
        let t_half = 20.0;
        let spec = Arc::new(build_base_bump(sigma)?);
        let base = TransformTable::for_smear(spec, t_half)?;
        let nus = [c(0.0, 0.0), c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 2.0), c(0.25, 3.0)];
        let worst = roundtrip(&base, &nus)?.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
        let s = smear(&base, t_half)?;
        let (mut inside, mut outside) = (0.0f64, 0.0f64);
        for (&t, &v) in s.grid.iter().zip(s.values()) {
            if t.abs() <= t_half - 5.0 {
                inside = inside.max((v - 1.0).abs());
            }
            if t.abs() >= t_half + 5.0 {
                outside = outside.max(v.abs());
            }
        }
        let passed = worst <= 1e-4 && inside <= 0.01 && outside <= 0.01;
        let detail = format!(
            "sigma {sigma}: roundtrip {worst:.1e} (tol 1e-4); window |g_T-1| {inside:.1e}, |g_T| {outside:.1e} (tol 1e-2)"
        );
        Ok(Verdict { passed, detail, limit: Some(30.0) })
    })
}

pub fn partial_trace() -> Outcome {
    timed(4, "partial-trace consistency", || {
        let e = ZetaEngine::default();
        let table = smeared(0.2, 15.0)?;
        let height = table.t_max().powi(2) + 1.0;
        let datasets = (0..20)
            .map(|seed| synthesize_weyl_spectrum(DatasetKind::SL2, height, PI / 3.0, seed))
            .collect::<Result<Vec<_>>>()?;
        let reports = lower_bound_check_many(&e, &datasets, &table, 3.0)?;
        let ok = reports.iter().filter(|r| r.inequality_slack >= -2.0 * r.sampling_noise).count();
        let min_z = reports.iter().map(|r| r.inequality_slack / r.sampling_noise).fold(f64::INFINITY, f64::min);
        let sigmas = [0.4, 0.2, 0.1, 0.05];
        let shares = sigmas
            .iter()
            .map(|&s| {
                let g = geometric_side(&smeared(s, 0.5)?, 2.0, ELLIPTIC_REL_TOL)?;
                Ok(g.elliptic.abs() / g.identity)
            })
            .collect::<Result<Vec<_>>>()?;
        let slope = log_log_slope(&sigmas, &shares)?;
        let passed = ok == 20 && (slope - 2.0).abs() <= 0.2;
        verdict(passed, format!("{ok}/20 seeds with slack >= -2 noise (min slack/noise {min_z:.2}); elliptic/identity slope {slope:.3} (2 +- 0.2)"))
    })
}

pub fn eisenstein_growth() -> Outcome {
    timed(5, "Eisenstein band growth", || {
        let e = ZetaEngine::default();
        let ratios = [10.0, 20.0, 40.0]
            .iter()
            .map(|&t| Ok(eisenstein_band_integral(&e, &smeared(0.2, t)?, 2.0)? / (t * f64::ln(t))))
            .collect::<Result<Vec<_>>>()?;
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        verdict(lo > 0.0 && hi / lo <= 3.0, format!("band/(T log T) at T = 10, 20, 40: {ratios:.3?}; spread {:.3} (max 3)", hi / lo))
    })
}

fn weyl_count_ratio(ds: &SpectralDataset, t: f64) -> Result<f64> {
    weyl_core::partial_trace_sl2::weyl_ratio(ds, t)
}

/// `maass` is an ingested SL2 dataset; the ratio is taken at its top eigenvalue.
pub fn weyl_constant(maass: &Path) -> Outcome {
    timed(6, "SL2 Weyl constant", || {
        let syn = synthesize_weyl_spectrum(DatasetKind::SL2, 1e4, PI / 3.0, 0)?;
        let synthetic = weyl_count_ratio(&syn, 1e4)?;
        let ds = load_dataset(maass)?;
        let top = ds.sl2().unwrap_or(&[]).iter().map(|r| 0.25 + r * r).fold(0.0, f64::max);
        let ingested = weyl_count_ratio(&ds, top)?;
        let passed = (0.97..=1.03).contains(&synthetic) && (0.8..=1.2).contains(&ingested);
        verdict(
            passed,
            format!(
                "synthetic N/(T/12) {synthetic:.4} in [0.97, 1.03]; ingested ({} forms) {ingested:.4} at T = {top:.2}, want [0.8, 1.2]",
                ds.len()
            ),
        )
    })
}

pub fn diagonal() -> Outcome {
    timed(7, "SL3 diagonal terms", || {
        let e = ZetaEngine::default();
        let mut worst: f64 = 0.0;
        for (t, cc) in [([2.0, 3.0, -5.0], 1.0), ([0.7, -2.9, 2.2], 2.0), ([4.5, -1.25, -3.25], 0.5)] {
            let closed = diagonal_terms(&e, t[0], t[1], t[2], cc)?;
            let x = diagonal_limit_extrapolated(&e, t, cc, EPS_LADDER)?;
            worst = worst.max((x.limit - closed).norm());
        }
        Ok(Verdict { passed: worst <= 1e-6, detail: format!("max |closed - extrapolated| {worst:.1e} (tol 1e-6)"), limit: Some(60.0) })
    })
}

pub fn degenerate_residue() -> Outcome {
    timed(8, "SL3 degenerate residue", || {
        let e = ZetaEngine::default();
        let (mut imag, mut pair): (f64, f64) = (0.0, 0.0);
        let mut finite = true;
        for t in [1.0, 5.0, 20.0] {
            let r = degenerate_residue_norm(&e, t, 1.0)?;
            finite &= r.total.re.is_finite() && r.total.im.is_finite();
            imag = imag.max(r.total.im.abs());
            let x = residue_pair_extrapolated(&e, t, 1.0, [1e-2, 1e-3, 1e-4])?;
            pair = pair.max((x.limit - r.pair).norm());
        }
        let ts: Vec<f64> = (0..20).map(|k| 5.0 * 20f64.powf(k as f64 / 19.0)).collect();
        let vals = ts.iter().map(|&t| Ok(degenerate_residue_norm(&e, t, 5.0)?.total.re.abs())).collect::<Result<Vec<_>>>()?;
        let slope = log_log_slope(&ts, &vals)?;
        let passed = finite && imag <= 1e-8 && pair <= 1e-6 && slope <= 0.1;
        verdict(passed, format!("max |Im| {imag:.1e} (1e-8); pair limit {pair:.1e} (1e-6); log-slope on [5, 100] at c = 5: {slope:.3} (<= 0.1)"))
    })
}

pub fn beta_normalization() -> Outcome {
    timed(9, "beta normalization", || {
        let t = 200.0;
        let cb = calibrate_c_beta(t)?;
        let at_2t = beta_ball_integral_with(2.0 * t, cb, 1e-10)?;
        let ratio = at_2t / beta_asymptotic(2.0 * t);
        let doubling = at_2t / beta_ball_integral_with(t, cb, 1e-10)? / 2f64.powf(2.5);
        let passed = (ratio - 1.0).abs() <= 0.02 && (doubling - 1.0).abs() <= 0.01;
        verdict(passed, format!("calibrated at T = {t}: ratio at 2T {ratio:.5} (2%); doubling / 2^(5/2) {doubling:.5} (1%)"))
    })
}

pub fn counting() -> Outcome {
    timed(10, "counting and classification", || {
        let ds = synthesize_weyl_spectrum(DatasetKind::SL3, 801.0, 100.0, 7)?;
        let band = RegionSpec::new(Shape::WallBand { radius: 1.0, width: 2.0 }, 30.0)?;
        let ball = RegionSpec::ball(1.0, 30.0)?;
        let parts = count_in_region(&ds, &band)? + count_in_region(&ds, &band.complement_in_ball(1.0)?)?;
        let conserved = parts == count_in_region(&ds, &ball)?;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let i = Complex64::i();
        let mut invariant = 0;
        for k in 0..100 {
            let (a, b) = (rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
            let re = rng.random_range(0.0..0.4);
            let lam = match k % 3 {
                0 => SpectralParameter3::from_plane(a, b),
                1 => SpectralParameter3::new(re + a * i, -re + a * i, -2.0 * a * i)?,
                _ => SpectralParameter3::new(a * i, 0.0 * i, -a * i)?,
            };
            let same = WeylElement::all().iter().all(|s| {
                let img = weyl_act(s, &lam);
                classify_tempered(&img, TEMPERED_TOL) == classify_tempered(&lam, TEMPERED_TOL)
                    && classify_self_dual(&img, TEMPERED_TOL) == classify_self_dual(&lam, TEMPERED_TOL)
            });
            invariant += same as usize;
        }
        let fractions = [10.0, 20.0, 40.0].iter().map(|&t| wall_band_fraction(&ds, 1.0, 0.5, t)).collect::<Result<Vec<_>>>()?;
        let monotone = fractions[0] > fractions[1] && fractions[1] > fractions[2];
        let passed = conserved && invariant == 100 && monotone;
        verdict(
            passed,
            format!("mass conservation {conserved}; Weyl-invariant {invariant}/100; wall-band fraction at t = 10, 20, 40: {fractions:.4?}"),
        )
    })
}

pub fn zero_density() -> Outcome {
    timed(11, "zero-count density", || {
        let e = ZetaEngine::default();
        let heights = [20.0, 50.0, 100.0];
        let kappa = fit_zero_density_constant(&e, &heights)?;
        let mut counts = Vec::new();
        let mut ok = true;
        for h in heights {
            let n = e.count_critical_zeros(h, 1.0)?.count;
            ok &= n as f64 <= kappa * h.ln() + 1e-12;
            counts.push(n);
        }
        verdict(ok, format!("counts on [H-1, H+1] for H = 20, 50, 100: {counts:?}; kappa_fit {kappa:.4}"))
    })
}

/// Every criterion in order.
pub fn all(maass: &Path) -> Vec<Outcome> {
    vec![
        functional_equations(),
        maass_selberg(),
        transform_roundtrip(),
        partial_trace(),
        eisenstein_growth(),
        weyl_constant(maass),
        diagonal(),
        degenerate_residue(),
        beta_normalization(),
        counting(),
        zero_density(),
    ]
}
