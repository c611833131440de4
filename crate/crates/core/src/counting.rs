//! Counting SL3 spectral parameters in Weyl-invariant regions, and
//! temperedness and self-duality tests.
//!
//! Regions are built from ‖Im λ‖ and the distance from Im λ to the nearest
//! wall, so each one is invariant under the Weyl group by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl3_spectral::{
    shape_annulus_integral, shape_disc_integral, shape_wall_band_integral, wall_distance, SpectralParameter3,
    C_BETA_STORED,
};
use crate::spectra_io::SpectralDataset;

/// Points this close to a boundary count as inside.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Default tolerance of [`classify_tempered`].
pub const TEMPERED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Ball { radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    /// Points of the ball within `width` of some wall.
    WallBand { radius: f64, width: f64 },
    /// Points of `outer` that are not in `inner`.
    Complement { outer: Box<Shape>, inner: Box<Shape> },
}

impl Shape {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            Shape::Ball { radius } => *radius >= 0.0,
            Shape::Annulus { r_in, r_out } => *r_in >= 0.0 && r_out >= r_in,
            Shape::WallBand { radius, width } => *radius >= 0.0 && *width >= 0.0,
            Shape::Complement { outer, inner } => {
                outer.validate()?;
                inner.validate()?;
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("malformed region {self:?}")))
        }
    }

    fn contains(&self, norm: f64, wall: f64, t: f64) -> bool {
        match self {
            Shape::Ball { radius } => norm <= t * radius + BOUNDARY_TOL,
            Shape::Annulus { r_in, r_out } => norm >= t * r_in - BOUNDARY_TOL && norm <= t * r_out + BOUNDARY_TOL,
            Shape::WallBand { radius, width } => norm <= t * radius + BOUNDARY_TOL && wall <= width + BOUNDARY_TOL,
            Shape::Complement { outer, inner } => outer.contains(norm, wall, t) && !inner.contains(norm, wall, t),
        }
    }

    fn outer_radius(&self) -> f64 {
        match self {
            Shape::Ball { radius } | Shape::WallBand { radius, .. } => *radius,
            Shape::Annulus { r_out, .. } => *r_out,
            Shape::Complement { outer, .. } => outer.outer_radius(),
        }
    }

    fn shape_integral(&self, t: f64, tol: f64) -> Result<f64> {
        match self {
            Shape::Ball { radius } => shape_disc_integral(t * radius, tol),
            Shape::Annulus { r_in, r_out } => shape_annulus_integral(t * r_in, t * r_out, tol),
            Shape::WallBand { radius, width } => shape_wall_band_integral(t * radius, *width, tol),
            Shape::Complement { outer, inner } => {
                // only nested complements: inner inside a ball
                match outer.as_ref() {
                    Shape::Ball { radius } if inner.outer_radius() <= *radius => {
                        Ok(outer.shape_integral(t, tol)? - inner.shape_integral(t, tol)?)
                    }
                    _ => Err(Error::InvalidArgument("β integral needs an inner region inside an outer ball".into())),
                }
            }
        }
    }
}

/// A shape dilated by `scale`. Radii scale; wall-band widths do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub shape: Shape,
    pub scale: f64,
}

impl RegionSpec {
    pub fn new(shape: Shape, scale: f64) -> Result<Self> {
        shape.validate()?;
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale {scale} must be nonnegative")));
        }
        Ok(RegionSpec { shape, scale })
    }

    pub fn ball(radius: f64, scale: f64) -> Result<Self> {
        Self::new(Shape::Ball { radius }, scale)
    }

    /// The ball minus this region, at the same scale.
    pub fn complement_in_ball(&self, radius: f64) -> Result<Self> {
        Self::new(
            Shape::Complement { outer: Box::new(Shape::Ball { radius }), inner: Box::new(self.shape.clone()) },
            self.scale,
        )
    }

    pub fn contains(&self, lam: &SpectralParameter3) -> bool {
        let y = lam.imag();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.shape.contains(norm, wall_distance(lam), self.scale)
    }

    /// ∫_region β with the stored c_β.
    pub fn beta_integral(&self, tol: f64) -> Result<f64> {
        Ok(C_BETA_STORED * self.shape.shape_integral(self.scale, tol)?)
    }
}

fn sl3_entries(ds: &SpectralDataset) -> Result<&[SpectralParameter3]> {
    ds.sl3().ok_or_else(|| Error::InvalidArgument("region counting needs an SL3 dataset".into()))
}

/// Number of entries whose imaginary part lies in the region.
pub fn count_in_region(ds: &SpectralDataset, region: &RegionSpec) -> Result<usize> {
    Ok(sl3_entries(ds)?.par_iter().filter(|lam| region.contains(lam)).count())
}

/// count / (volume × ∫_region β).
pub fn equidistribution_ratio(ds: &SpectralDataset, region: &RegionSpec, volume: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::InvalidArgument(format!("volume {volume} must be positive")));
    }
    let mass = region.beta_integral(1e-9)?;
    if mass <= 0.0 {
        return Err(Error::InvalidArgument("region has zero β mass".into()));
    }
    Ok(count_in_region(ds, region)? as f64 / (volume * mass))
}

/// Fraction of the entries in a ball that lie in its wall band.
pub fn wall_band_fraction(ds: &SpectralDataset, radius: f64, width: f64, scale: f64) -> Result<f64> {
    let ball = RegionSpec::ball(radius, scale)?;
    let band = RegionSpec::new(Shape::WallBand { radius, width }, scale)?;
    let total = count_in_region(ds, &ball)?;
    if total == 0 {
        return Err(Error::DatasetEmpty);
    }
    Ok(count_in_region(ds, &band)? as f64 / total as f64)
}

/// max |Re ℓ_i| ≤ tol.
pub fn classify_tempered(lam: &SpectralParameter3, tol: f64) -> bool {
    lam.real().iter().all(|x| x.abs() <= tol)
}

/// {ℓ1, ℓ2, ℓ3} = {μ, 0, −μ} within tol.
pub fn classify_self_dual(lam: &SpectralParameter3, tol: f64) -> bool {
    (0..3).any(|k| lam.l[k].norm() <= tol && (lam.l[(k + 1) % 3] + lam.l[(k + 2) % 3]).norm() <= tol)
}

/// {ℓ_i} = {−conj ℓ_i} as multisets within tol, the condition every
/// unitary parameter satisfies.
pub fn unitary_dual_consistent(lam: &SpectralParameter3, tol: f64) -> bool {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS.iter().any(|p| (0..3).all(|i| (lam.l[i] + lam.l[p[i]].conj()).norm() <= tol))
}

/// A nontempered parameter satisfying the unitary condition has Im λ
/// within 1/2 of a wall; tempered parameters pass trivially.
pub fn nontempered_near_wall(lam: &SpectralParameter3, tol: f64) -> bool {
    classify_tempered(lam, tol) || wall_distance(lam) <= 0.5
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub tempered: usize,
    pub nontempered_rows: Vec<usize>,
    pub self_dual: usize,
}

/// Classifies every entry; nontempered rows are 1-based.
pub fn classify_dataset(ds: &SpectralDataset, tol: f64) -> Result<Classification> {
    let entries = sl3_entries(ds)?;
    let nontempered_rows: Vec<usize> =
        entries.iter().enumerate().filter(|(_, l)| !classify_tempered(l, tol)).map(|(i, _)| i + 1).collect();
    Ok(Classification {
        tempered: entries.len() - nontempered_rows.len(),
        nontempered_rows,
        self_dual: entries.par_iter().filter(|l| classify_self_dual(l, tol)).count(),
    })
}
