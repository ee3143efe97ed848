use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::exec::Execution;

/// Complex argument or value.
pub type ComplexValue = Complex64;

/// Requested accuracy for series and quadrature evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTarget {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_terms: usize,
    #[serde(default)]
    pub exec: Execution,
}

impl AccuracyTarget {
    pub fn new(rel_tol: f64, abs_floor: f64, max_terms: usize) -> Result<Self> {
        let acc = AccuracyTarget {
            rel_tol,
            abs_floor,
            max_terms,
            exec: Execution::default(),
        };
        acc.validate()?;
        Ok(acc)
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 10.0 * f64::EPSILON && self.rel_tol < 1.0) {
            return Err(ZetaError::domain(format!(
                "rel_tol must lie in [10 eps, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_floor >= 0.0) {
            return Err(ZetaError::domain("abs_floor must be >= 0"));
        }
        if self.max_terms < 8 {
            return Err(ZetaError::domain("max_terms must be >= 8"));
        }
        Ok(())
    }
}

impl Default for AccuracyTarget {
    fn default() -> Self {
        AccuracyTarget {
            rel_tol: 1e-13,
            abs_floor: 1e-300,
            max_terms: 1_000_000,
            exec: Execution::default(),
        }
    }
}

/// Closest simple pole of the continued function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleInfo {
    pub location: ComplexValue,
    pub residue: ComplexValue,
    pub distance: f64,
}

/// Result of a zeta evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: ComplexValue,
    pub err_estimate: f64,
    /// Populated whenever a pole lies within [`POLE_FLAG_RADIUS`] of `s`.
    pub nearest_pole: Option<PoleInfo>,
}

/// Distance below which [`ZetaValue::nearest_pole`] is populated.
pub const POLE_FLAG_RADIUS: f64 = 0.01;

impl ZetaValue {
    pub fn new(value: ComplexValue, err_estimate: f64) -> Self {
        ZetaValue {
            value,
            err_estimate,
            nearest_pole: None,
        }
    }

    /// Attaches `pole` when it lies within the flag radius of `s`.
    pub fn flag_pole(mut self, s: ComplexValue, location: ComplexValue, residue: ComplexValue) -> Self {
        let distance = (s - location).norm();
        if distance < POLE_FLAG_RADIUS {
            let closer = self.nearest_pole.map_or(true, |p| distance < p.distance);
            if closer {
                self.nearest_pole = Some(PoleInfo {
                    location,
                    residue,
                    distance,
                });
            }
        }
        self
    }
}

impl std::ops::Add for ZetaValue {
    type Output = ZetaValue;
    fn add(self, rhs: ZetaValue) -> ZetaValue {
        ZetaValue {
            value: self.value + rhs.value,
            err_estimate: self.err_estimate + rhs.err_estimate,
            nearest_pole: self.nearest_pole.or(rhs.nearest_pole),
        }
    }
}
