//! Spectral zeta functions on the whole complex plane.
//!
//! The crate evaluates inhomogeneous and homogeneous Epstein zeta functions
//! through exponentially convergent Bessel-series representations, the
//! two-dimensional Chowla–Selberg series, the truncated (half-line) zeta
//! through its asymptotic continuation, and a generic heat-kernel/Mellin
//! continuation of arbitrary spectra. On top of these sit Casimir energies on
//! flat tori, zeta-regularized determinants, the multiplicative anomaly and a
//! finite-dimensional check of the operator-regularization identities.
//!
//! Every evaluator returns a value together with an error estimate.

pub mod epstein;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod opreg;
pub mod physics;
pub mod spectral;
pub mod specfun;
mod sum;
pub mod truncated;
pub mod types;

pub use error::{Result, ZetaError};
pub use exec::Execution;
pub use lattice::{EpsteinParams, QuadraticFormSpec};
pub use types::{AccuracyTarget, ComplexValue, PoleInfo, ZetaValue};
