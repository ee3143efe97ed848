//! Spectrum files for `det spectrum` and `anomaly`.
//!
//! A file is either an explicit finite spectrum
//!
//! ```json
//! {"eigenvalues": [{"lambda": 1.0, "mult": 2}], "heat": [{"alpha": 0, "coeff": 2}]}
//! ```
//!
//! or a built-in infinite family such as
//! `{"family": {"kind": "torus", "matrix": [[2]], "q": 0.5}}`.
//! A finite spectrum fixes its own heat expansion Σ d e^{−tλ}; a supplied
//! `heat` list is checked against it term by term.

use serde::Deserialize;
use serde_json::Value;

use zetareg::lattice::QuadraticFormSpec;
use zetareg::spectral::SpectrumModel;

use crate::job::{decode_at, split_tag, CliError, MatrixIn};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SpectrumSource {
    Path(String),
    Inline(Value),
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Eigen {
    lambda: f64,
    #[serde(default = "one", alias = "multiplicity")]
    mult: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Heat {
    alpha: f64,
    coeff: f64,
}

/// ½nᵀAn + q over Z^p, zero mode dropped when q = 0
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Torus {
    matrix: MatrixIn,
    q: f64,
}

/// a n² + q for n ≥ 1
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfLineSquares {
    a: f64,
    q: f64,
}

/// (½nᵀAn + q1)(½nᵀAn + q2) over Z^p
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusProduct {
    matrix: MatrixIn,
    q1: f64,
    q2: f64,
}

fn family(value: &Value, base: &str) -> Result<SpectrumModel, CliError> {
    let (kind, rest) = split_tag(value, base, &["torus", "half_line_squares", "torus_product"])?;
    Ok(match kind.as_str() {
        "torus" => {
            let t: Torus = decode_at(&rest, base)?;
            SpectrumModel::torus(&form(&t.matrix)?, t.q)?
        }
        "half_line_squares" => {
            let h: HalfLineSquares = decode_at(&rest, base)?;
            SpectrumModel::half_line_squares(h.a, h.q)?
        }
        _ => {
            let t: TorusProduct = decode_at(&rest, base)?;
            SpectrumModel::torus_product(&form(&t.matrix)?, t.q1, t.q2)?
        }
    })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumFile {
    eigenvalues: Option<Vec<Eigen>>,
    #[serde(default)]
    heat: Vec<Heat>,
    family: Option<Value>,
    heat_depth: Option<f64>,
}

/// Relative tolerance for supplied heat coefficients of a finite spectrum.
const HEAT_MATCH_TOL: f64 = 1e-10;

fn check_finite_heat(pairs: &[(f64, u64)], heat: &[Heat], base: &str) -> Result<(), CliError> {
    for (i, h) in heat.iter().enumerate() {
        let j = h.alpha.round();
        let at = format!("{base}/heat/{i}");
        if h.alpha != j || j < 0.0 {
            return Err(CliError::schema(
                at,
                "a finite spectrum only has heat terms at alpha = 0, 1, 2, ...",
            ));
        }
        let k = j as i32;
        let fact: f64 = (1..=k).map(f64::from).product();
        let expected: f64 = pairs.iter().map(|&(l, d)| d as f64 * (-l).powi(k)).sum::<f64>() / fact;
        let scale: f64 = pairs.iter().map(|&(l, d)| d as f64 * l.abs().powi(k)).sum::<f64>() / fact;
        if (h.coeff - expected).abs() > HEAT_MATCH_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(CliError::schema(
                format!("{at}/coeff"),
                format!("the eigenvalues give coefficient {expected:e} at alpha = {k}, not {:e}", h.coeff),
            ));
        }
    }
    Ok(())
}

fn form(m: &MatrixIn) -> Result<QuadraticFormSpec, CliError> {
    QuadraticFormSpec::new(&m.0).map_err(CliError::Eval)
}

fn build(file: &SpectrumFile, base: &str) -> Result<SpectrumModel, CliError> {
    let model = match (&file.eigenvalues, &file.family) {
        (Some(list), None) => {
            let pairs: Vec<(f64, u64)> = list.iter().map(|e| (e.lambda, e.mult)).collect();
            check_finite_heat(&pairs, &file.heat, base)?;
            if file.heat_depth.is_some() {
                return Err(CliError::schema(format!("{base}/heat_depth"), "finite spectra are evaluated exactly"));
            }
            return SpectrumModel::finite(&pairs).map_err(CliError::Eval);
        }
        (None, Some(f)) => {
            if !file.heat.is_empty() {
                return Err(CliError::schema(
                    format!("{base}/heat"),
                    "built-in families carry their own heat expansion",
                ));
            }
            family(f, &format!("{base}/family"))?
        }
        _ => {
            return Err(CliError::schema(
                base.to_string(),
                "give exactly one of `eigenvalues` and `family`",
            ))
        }
    };
    Ok(match file.heat_depth {
        Some(d) => model.with_heat_depth(d),
        None => model,
    })
}

impl SpectrumSource {
    /// Reads and validates the spectrum; `base` is the pointer of this field.
    pub fn load(&self, base: &str) -> Result<SpectrumModel, CliError> {
        let value = match self {
            SpectrumSource::Inline(v) => v.clone(),
            SpectrumSource::Path(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::schema(base.to_string(), format!("cannot read {path}: {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::schema(base.to_string(), format!("{path} is not JSON: {e}")))?
            }
        };
        let file: SpectrumFile = decode_at(&value, base)?;
        build(&file, base)
    }
}
