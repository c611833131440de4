//! Numerical workbench for partial-trace Weyl-law computations on
//! SL2(Z)\H and SL3(Z)\H.

pub mod counting;
pub mod eisenstein_sl2;
pub mod error;
pub mod numeric;
pub mod partial_trace_sl2;
pub mod selberg_transform;
pub mod sl2_geometry;
pub mod sl3_spectral;
pub mod spectra_io;
pub mod zeta_toolkit;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point of the complex plane. Constructors of every public type check
/// that components are finite.
pub type ComplexPoint = Complex64;

/// True when both components are finite.
pub fn is_finite_point(z: ComplexPoint) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
