//! Partial trace of the smeared kernel over F_C for SL2(Z), the resulting
//! lower bound for the spectral sum, and the Weyl counting ratio.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eisenstein_sl2::eisenstein_band_integral;
use crate::error::{Error, Result};
use crate::selberg_transform::{g_at_identity, TransformTable};
use crate::sl2_geometry::{
    area_truncated, hyperbolic_distance, integrate_domain, kernel_support_elements, moebius_act, DomainQuadrature,
    IntegerMatrix2,
};
use crate::spectra_io::SpectralDataset;
use crate::zeta_toolkit::ZetaEngine;

/// Relative tolerance of the elliptic quadratures.
pub const ELLIPTIC_REL_TOL: f64 = 1e-9;
/// Violations are flagged beyond this multiple of the error estimates.
pub const VIOLATION_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticContribution {
    pub gamma: IntegerMatrix2,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricSide {
    pub identity: f64,
    pub elliptic: f64,
    pub elliptic_error: f64,
    pub contributions: Vec<EllipticContribution>,
}

/// identity = area(F_C)·g_T(i); elliptic = Σ_γ ∫_{F_C} g_T(d(z, γz)) dA over
/// the non-identity elements whose displacement on F_C can be below σ.
pub fn geometric_side(table: &TransformTable, c_height: f64, tol: f64) -> Result<GeometricSide> {
    let sigma = table.spec.sigma;
    let identity = area_truncated(c_height) * g_at_identity(table);
    let support = kernel_support_elements(c_height, sigma)?;
    let radial = table.radial();
    let mut opts = DomainQuadrature::new(c_height, (tol * identity.abs()).max(1e-300));
    // the integrands live near i and ρ
    opts.u_breaks = vec![-0.5 + sigma, -sigma, 0.0, sigma, 0.5 - sigma];
    opts.u_breaks.retain(|&u| u > -0.5 && u < 0.5);
    opts.v_breaks = vec![sigma.exp()];
    let contributions = support
        .elements
        .par_iter()
        .map(|e| {
            let g = e.gamma;
            let est = integrate_domain(|z| radial.eval(hyperbolic_distance(z, moebius_act(&g, z))), &opts)?;
            Ok(EllipticContribution { gamma: g, value: est.value, error: est.error })
        })
        .collect::<Result<Vec<_>>>()?;
    let elliptic = contributions.iter().map(|c| c.value).sum();
    let elliptic_error = contributions.iter().map(|c| c.error).sum();
    Ok(GeometricSide { identity, elliptic, elliptic_error, contributions })
}

fn ghat_at_r(table: &TransformTable, r: f64) -> Result<f64> {
    if r.abs() > table.t_max() {
        return Ok(0.0);
    }
    match table.smear_half_width {
        Some(t) => Ok(table.smear_value(r, t)),
        None => Ok(table.transform_at(Complex64::new(0.0, r))?.re),
    }
}

/// ĝ at ν = 1/2, the constant eigenfunction.
pub fn constant_contribution(table: &TransformTable) -> Result<f64> {
    Ok(table.transform_at(Complex64::new(0.5, 0.0))?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSum {
    /// Σ_j ĝ_T(i r_j) + ĝ_T(1/2)
    pub total: f64,
    pub constant: f64,
    /// √Σ ĝ_T(i r_j)², the standard deviation of the sum for a Poisson
    /// spectrum with the same intensity.
    pub noise: f64,
}

/// Σ_{j ≥ 0} ĝ_T(ν_j) with ν_j = i r_j and the constant at ν = 1/2.
pub fn spectral_sum(ds: &SpectralDataset, table: &TransformTable) -> Result<SpectralSum> {
    let rs = ds.sl2().ok_or_else(|| Error::InvalidArgument("spectral sum needs an SL2 dataset".into()))?;
    let vals = rs.iter().map(|&r| ghat_at_r(table, r)).collect::<Result<Vec<_>>>()?;
    let constant = constant_contribution(table)?;
    Ok(SpectralSum {
        total: vals.iter().sum::<f64>() + constant,
        constant,
        noise: vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
    })
}

/// N(T)/(T/12), counting the constant eigenvalue 0.
pub fn weyl_ratio(ds: &SpectralDataset, t_eig: f64) -> Result<f64> {
    if !(t_eig > 0.0) {
        return Err(Error::InvalidArgument(format!("T = {t_eig} must be positive")));
    }
    let rs = ds.sl2().ok_or_else(|| Error::InvalidArgument("Weyl ratio needs an SL2 dataset".into()))?;
    if ds.manifest.completeness_height < t_eig {
        return Err(Error::IncompleteDataset { completeness: ds.manifest.completeness_height, requested: t_eig });
    }
    let n = 1 + rs.iter().filter(|&&r| 0.25 + r * r <= t_eig).count();
    Ok(n as f64 / (t_eig / 12.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialTraceReport {
    pub t: f64,
    pub c: f64,
    pub sigma: f64,
    pub identity_term: f64,
    pub elliptic_term: f64,
    pub elliptic_error: f64,
    /// (1/4π) ∫ ĝ_T ‖Λ^C E‖²
    pub eisenstein_term: f64,
    pub spectral_sum: f64,
    pub constant_term: f64,
    pub sampling_noise: f64,
    /// spectral + eisenstein + |elliptic| − identity
    pub inequality_slack: f64,
    pub tolerance: f64,
    pub violation: bool,
    pub dataset_size: usize,
    pub completeness_height: f64,
    pub elliptic_contributions: Vec<EllipticContribution>,
}

/// Assembles both sides of identity − |elliptic| ≤ spectral + eisenstein
/// for a table smeared over [−T, T]. Violations are reported, not raised.
pub fn lower_bound_check(
    engine: &ZetaEngine,
    ds: &SpectralDataset,
    table: &TransformTable,
    c_height: f64,
) -> Result<PartialTraceReport> {
    Ok(lower_bound_check_many(engine, std::slice::from_ref(ds), table, c_height)?.remove(0))
}

/// The same check for several spectra, sharing the geometric side and the
/// Eisenstein term.
pub fn lower_bound_check_many(
    engine: &ZetaEngine,
    datasets: &[SpectralDataset],
    table: &TransformTable,
    c_height: f64,
) -> Result<Vec<PartialTraceReport>> {
    let t = table
        .smear_half_width
        .ok_or_else(|| Error::InvalidArgument("partial trace needs a smeared table".into()))?;
    let (geo, band) = rayon::join(
        || geometric_side(table, c_height, ELLIPTIC_REL_TOL),
        || eisenstein_band_integral(engine, table, c_height),
    );
    let geo = geo?;
    let eisenstein_term = band? / (4.0 * std::f64::consts::PI);
    datasets
        .iter()
        .map(|ds| {
            let spec = spectral_sum(ds, table)?;
            let slack = spec.total + eisenstein_term + geo.elliptic.abs() - geo.identity;
            let tolerance = VIOLATION_FACTOR * (geo.elliptic_error + 1e-12 * (geo.identity.abs() + spec.total.abs()));
            Ok(PartialTraceReport {
                t,
                c: c_height,
                sigma: table.spec.sigma,
                identity_term: geo.identity,
                elliptic_term: geo.elliptic,
                elliptic_error: geo.elliptic_error,
                eisenstein_term,
                spectral_sum: spec.total,
                constant_term: spec.constant,
                sampling_noise: spec.noise,
                inequality_slack: slack,
                tolerance,
                violation: slack < -tolerance,
                dataset_size: ds.len(),
                completeness_height: ds.manifest.completeness_height,
                elliptic_contributions: geo.contributions.clone(),
            })
        })
        .collect()
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs two or more matched points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
