use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZetaError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ZetaError {
    /// Evaluation requested exactly at a simple pole.
    #[error("pole at s = {location}, residue {residue}")]
    Pole {
        location: Complex64,
        residue: Complex64,
    },
    /// Arguments outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A retained term of a direct sum has a vanishing base.
    #[error("singular term: {0}")]
    SingularTerm(String),
    #[error("no convergence after {terms} terms (last estimate {estimate:e})")]
    NonConvergence { terms: usize, estimate: f64 },
    /// Re s lies left of the strip covered by the supplied heat coefficients.
    #[error("heat coefficients cover Re s > {covered}, requested Re s = {requested}")]
    InsufficientHeatDepth { covered: f64, requested: f64 },
    /// Finite-difference extrapolation levels disagree.
    #[error("stencil instability: extrapolation disagreement {disagreement:e} exceeds {limit:e}")]
    StencilInstability { disagreement: f64, limit: f64 },
}

impl ZetaError {
    pub fn domain(msg: impl Into<String>) -> Self {
        ZetaError::Domain(msg.into())
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, ZetaError::Pole { .. })
    }
}
