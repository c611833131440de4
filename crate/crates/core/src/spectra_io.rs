//! Spectral datasets on disk, synthetic spectra and configuration.
//!
//! A dataset is a CSV file plus a JSON manifest next to it (same stem,
//! extension `json`). SL2 files have the single column `r`, with eigenvalue
//! 1/4 + r²; the constant eigenfunction is implicit and never listed. SL3
//! files have the columns `l1_re,l1_im,l2_re,l2_im,l3_re,l3_im`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sl3_spectral::{
    ball_radius, beta_shape, radial_mass_table, SpectralParameter3, C_BETA_STORED, SUM_ZERO_TOL,
};
use crate::zeta_toolkit::{HeckeData, ZetaConfig};

/// Environment variable naming a JSON configuration file.
pub const CONFIG_ENV: &str = "WEYLBENCH_CONFIG";
/// Relative tolerance of the sum-zero check on loaded SL3 rows.
pub const LOAD_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetKind {
    SL2,
    SL3,
    #[serde(rename = "hecke")]
    Hecke,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: DatasetKind,
    pub provenance: String,
    /// Eigenvalue height up to which the list is complete.
    pub completeness_height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Area (SL2) or volume (SL3) of the quotient the spectrum belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        if !(self.completeness_height >= 0.0) {
            return Err(Error::ValidationError {
                rows: Vec::new(),
                message: format!("completeness_height {} is negative", self.completeness_height),
            });
        }
        if let Some(v) = self.volume {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ValidationError { rows: Vec::new(), message: format!("volume {v} must be positive") });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Entries {
    /// r-values
    Sl2(Vec<f64>),
    Sl3(Vec<SpectralParameter3>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDataset {
    pub manifest: Manifest,
    pub entries: Entries,
}

impl SpectralDataset {
    pub fn kind(&self) -> DatasetKind {
        self.manifest.kind
    }

    pub fn len(&self) -> usize {
        match &self.entries {
            Entries::Sl2(v) => v.len(),
            Entries::Sl3(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sl2(&self) -> Option<&[f64]> {
        match &self.entries {
            Entries::Sl2(v) => Some(v),
            Entries::Sl3(_) => None,
        }
    }

    pub fn sl3(&self) -> Option<&[SpectralParameter3]> {
        match &self.entries {
            Entries::Sl3(v) => Some(v),
            Entries::Sl2(_) => None,
        }
    }

    /// Keeps every entry for which `keep(index)` holds; the manifest is
    /// copied with a note appended to the provenance.
    pub fn filtered<F: Fn(usize) -> bool>(&self, keep: F, note: &str) -> SpectralDataset {
        let entries = match &self.entries {
            Entries::Sl2(v) => Entries::Sl2(v.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, x)| *x).collect()),
            Entries::Sl3(v) => Entries::Sl3(v.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, x)| *x).collect()),
        };
        let mut manifest = self.manifest.clone();
        manifest.provenance = format!("{} [{note}]", manifest.provenance);
        SpectralDataset { manifest, entries }
    }

    /// Checks every entry; offending rows are reported 1-based.
    pub fn validate(&self) -> Result<()> {
        self.manifest.validate()?;
        let mut bad = Vec::new();
        let message;
        match (&self.entries, self.manifest.kind) {
            (Entries::Sl2(v), DatasetKind::SL2) => {
                for (i, r) in v.iter().enumerate() {
                    if !(r.is_finite() && *r >= 0.0) {
                        bad.push(i + 1);
                    }
                }
                message = "r must be finite and nonnegative".to_string();
            }
            (Entries::Sl3(v), DatasetKind::SL3) => {
                for (i, p) in v.iter().enumerate() {
                    let sum: Complex64 = p.l.iter().sum();
                    let scale = 1.0 + p.l.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    let finite = p.l.iter().all(|z| crate::is_finite_point(*z));
                    if !finite || sum.norm() > LOAD_SUM_TOL * scale || !p.within_unitarity_bound() {
                        bad.push(i + 1);
                    }
                }
                message = "rows violate l1 + l2 + l3 = 0 or |Re l_i| < 1/2".to_string();
            }
            _ => {
                return Err(Error::ValidationError { rows: Vec::new(), message: "entries do not match manifest kind".into() })
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::ValidationError { rows: bad, message })
        }
    }
}

/// `foo.csv` → `foo.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::ParseError { line, message: e.to_string() }
}

const SL3_HEADER: [&str; 6] = ["l1_re", "l1_im", "l2_re", "l2_im", "l3_re", "l3_im"];

/// Parses CSV text against a manifest; the result is validated.
pub fn parse_dataset(text: &str, manifest: Manifest) -> Result<SpectralDataset> {
    manifest.validate()?;
    if manifest.kind == DatasetKind::Hecke {
        return Err(Error::InvalidArgument("hecke data is loaded with load_hecke".into()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut records = reader.records();
    let expected: Vec<&str> = match manifest.kind {
        DatasetKind::SL2 => vec!["r"],
        _ => SL3_HEADER.to_vec(),
    };
    let mut sl2 = Vec::new();
    let mut sl3 = Vec::new();
    match records.next() {
        None => {}
        Some(header) => {
            let header = header.map_err(csv_error)?;
            let got: Vec<&str> = header.iter().collect();
            if got != expected {
                return Err(Error::ParseError { line: 1, message: format!("header {got:?}, expected {expected:?}") });
            }
        }
    }
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != expected.len() {
            return Err(Error::ParseError { line, message: format!("{} fields, expected {}", rec.len(), expected.len()) });
        }
        let mut vals = Vec::with_capacity(rec.len());
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::ParseError { line, message: format!("'{field}' is not a number") })?;
            vals.push(v);
        }
        match manifest.kind {
            DatasetKind::SL2 => sl2.push(vals[0]),
            _ => sl3.push(SpectralParameter3 {
                l: [
                    Complex64::new(vals[0], vals[1]),
                    Complex64::new(vals[2], vals[3]),
                    Complex64::new(vals[4], vals[5]),
                ],
            }),
        }
    }
    let entries = match manifest.kind {
        DatasetKind::SL2 => Entries::Sl2(sl2),
        _ => Entries::Sl3(sl3),
    };
    let ds = SpectralDataset { manifest, entries };
    ds.validate()?;
    Ok(ds)
}

fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::ParseError { line: e.line(), message: format!("manifest: {e}") })
}

/// Loads `path` and its manifest.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<SpectralDataset> {
    let path = path.as_ref();
    let manifest = read_manifest(&manifest_path(path))?;
    let text = fs::read_to_string(path)?;
    parse_dataset(&text, manifest)
}

/// Writes the CSV and its manifest. Numbers use the shortest
/// representation that parses back to the same double.
pub fn save_dataset(ds: &SpectralDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    match &ds.entries {
        Entries::Sl2(v) => {
            w.write_record(["r"]).map_err(io)?;
            for r in v {
                w.write_record([r.to_string()]).map_err(io)?;
            }
        }
        Entries::Sl3(v) => {
            w.write_record(SL3_HEADER).map_err(io)?;
            for p in v {
                let row: Vec<String> = p.l.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
                w.write_record(&row).map_err(io)?;
            }
        }
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&ds.manifest).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(manifest_path(path), json + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Scheme {
    /// One point per unit of expected mass, uniform inside its cell.
    #[default]
    Stratified,
    Poisson,
}

/// Synthetic spectrum with intensity `volume` × Weyl density up to the
/// eigenvalue height `t_max`, using the stratified scheme.
pub fn synthesize_weyl_spectrum(kind: DatasetKind, t_max: f64, volume: f64, seed: u64) -> Result<SpectralDataset> {
    synthesize_with(kind, t_max, volume, seed, Scheme::Stratified)
}

/// Mass levels in [0, total): stratified or Poisson.
fn mass_levels(total: f64, scheme: Scheme, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match scheme {
        Scheme::Stratified => {
            let mut out = Vec::with_capacity(total as usize + 1);
            let mut k = 0.0;
            loop {
                let level = k + rng.random::<f64>();
                if level >= total {
                    break;
                }
                out.push(level);
                k += 1.0;
            }
            out
        }
        Scheme::Poisson => {
            let n = if total > 0.0 { Poisson::new(total).map(|p| p.sample(rng) as usize).unwrap_or(0) } else { 0 };
            let mut out: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * total).collect();
            out.sort_by(f64::total_cmp);
            out
        }
    }
}

pub fn synthesize_with(kind: DatasetKind, t_max: f64, volume: f64, seed: u64, scheme: Scheme) -> Result<SpectralDataset> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("T_max = {t_max} must be positive")));
    }
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::InvalidArgument(format!("volume = {volume} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let manifest = Manifest {
        kind,
        provenance: format!("synthetic {scheme:?} Weyl-density spectrum"),
        completeness_height: t_max,
        seed: Some(seed),
        volume: Some(volume),
    };
    let entries = match kind {
        DatasetKind::SL2 => {
            // dN = (area/4π) dλ, starting at λ = 1/4 so every point has a real r
            let rate = volume / (4.0 * PI);
            let total = rate * (t_max - 0.25).max(0.0);
            let r = mass_levels(total, scheme, &mut rng).into_iter().map(|m| (m / rate).sqrt()).collect();
            Entries::Sl2(r)
        }
        DatasetKind::SL3 => Entries::Sl3(sample_sl3(ball_radius(t_max), volume, scheme, &mut rng)),
        DatasetKind::Hecke => return Err(Error::InvalidArgument("cannot synthesize hecke data".into())),
    };
    let ds = SpectralDataset { manifest, entries };
    ds.validate()?;
    Ok(ds)
}

fn sample_sl3(radius: f64, volume: f64, scheme: Scheme, rng: &mut ChaCha8Rng) -> Vec<SpectralParameter3> {
    let table = radial_mass_table();
    let scale = volume * C_BETA_STORED;
    let total = scale * table.eval(radius);
    let levels = mass_levels(total, scheme, rng);
    let envelope_const = 2f64.sqrt() / 2.0;
    levels
        .into_iter()
        .map(|m| {
            let r = table.inverse(m / scale).min(radius);
            loop {
                // θ from the density |cos 3θ| on one of six lobes
                let lobe = rng.random_range(0..6) as f64;
                let u: f64 = rng.random();
                let theta = (2.0 * u - 1.0).asin() / 3.0 + lobe * PI / 3.0;
                let lam = SpectralParameter3::from_plane(r * theta.cos(), r * theta.sin());
                let env = envelope_const * r.powi(3) * (3.0 * theta).cos().abs();
                if env == 0.0 {
                    continue;
                }
                if rng.random::<f64>() * env <= beta_shape(&lam.imag()) {
                    break lam;
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HeckeSidecar {
    symbol: String,
    nu_re: f64,
    nu_im: f64,
    p_max: u64,
}

/// Hecke data from `p,alpha_re,alpha_im` and its JSON sidecar.
pub fn load_hecke(path: impl AsRef<Path>) -> Result<HeckeData> {
    let path = path.as_ref();
    let side_text = fs::read_to_string(manifest_path(path))?;
    let side: HeckeSidecar = serde_json::from_str(&side_text)
        .map_err(|e| Error::ParseError { line: e.line(), message: format!("hecke sidecar: {e}") })?;
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
    if header != ["p", "alpha_re", "alpha_im"] {
        return Err(Error::ParseError { line: 1, message: format!("header {header:?}, expected p,alpha_re,alpha_im") });
    }
    let mut alpha = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 3 {
            return Err(Error::ParseError { line, message: format!("{} fields, expected 3", rec.len()) });
        }
        let p: u64 = rec[0].parse().map_err(|_| Error::ParseError { line, message: format!("bad prime '{}'", &rec[0]) })?;
        let re: f64 = rec[1].parse().map_err(|_| Error::ParseError { line, message: format!("bad number '{}'", &rec[1]) })?;
        let im: f64 = rec[2].parse().map_err(|_| Error::ParseError { line, message: format!("bad number '{}'", &rec[2]) })?;
        alpha.push((p, Complex64::new(re, im)));
    }
    HeckeData::new(side.symbol, Complex64::new(side.nu_re, side.nu_im), alpha, side.p_max)
}

pub fn save_hecke(data: &HeckeData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["p", "alpha_re", "alpha_im"]).map_err(io)?;
    for (p, a) in &data.alpha {
        w.write_record([p.to_string(), a.re.to_string(), a.im.to_string()]).map_err(io)?;
    }
    w.flush()?;
    let side = HeckeSidecar { symbol: data.symbol.clone(), nu_re: data.nu.re, nu_im: data.nu.im, p_max: data.p_max };
    fs::write(manifest_path(path), serde_json::to_string_pretty(&side).map_err(|e| Error::Io(e.to_string()))? + "\n")?;
    Ok(())
}

/// Defaults shared by the command-line front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Support radius of the test function.
    pub sigma: f64,
    /// Tolerance of domain quadratures.
    pub quad_tol: f64,
    /// Trapezoid nodes per row for periodic integrands.
    pub periodic_nodes: usize,
    /// |Re ℓ| below which a parameter counts as tempered.
    pub tempered_tol: f64,
    /// Euler–Maclaurin parameters and the zero-free region width κ.
    pub zeta: ZetaConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config { sigma: 0.2, quad_tol: 1e-7, periodic_nodes: 48, tempered_tol: 1e-8, zeta: ZetaConfig::default() }
    }
}

pub fn load_config_file(path: impl AsRef<Path>) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    let cfg: Config =
        serde_json::from_str(&text).map_err(|e| Error::ParseError { line: e.line(), message: format!("config: {e}") })?;
    if !(cfg.sigma > 0.0 && cfg.quad_tol > 0.0 && cfg.tempered_tol >= 0.0 && cfg.periodic_nodes > 0) {
        return Err(Error::ValidationError { rows: Vec::new(), message: "config values must be positive".into() });
    }
    Ok(cfg)
}

/// Configuration from the file named by [`CONFIG_ENV`], or defaults.
pub fn load_config() -> Result<Config> {
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => load_config_file(p),
        _ => Ok(Config::default()),
    }
}

/// Sum-zero tolerance applied to synthesized rows.
pub fn synthesis_sum_tol() -> f64 {
    SUM_ZERO_TOL
}
