//! Job requests and their per-command parameter records.
//!
//! A request is `{"command": …, "params": {…}, "acc": {…}}`. Parameters are
//! decoded only once the command is known, so a schema error can name the
//! offending field as a JSON pointer into the request.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use zetareg::{AccuracyTarget, Execution, ZetaError};

use crate::spectrum::SpectrumSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Epstein,
    Cs2d,
    Truncated,
    Casimir,
    Det,
    Anomaly,
    Orcheck,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Epstein => "epstein",
            Command::Cs2d => "cs2d",
            Command::Truncated => "truncated",
            Command::Casimir => "casimir",
            Command::Det => "det",
            Command::Anomaly => "anomaly",
            Command::Orcheck => "orcheck",
            Command::Selftest => "selftest",
        }
    }
}

fn default_rel_tol() -> f64 {
    AccuracyTarget::default().rel_tol
}

fn default_abs_floor() -> f64 {
    AccuracyTarget::default().abs_floor
}

fn default_max_terms() -> usize {
    AccuracyTarget::default().max_terms
}

/// Wire form of the accuracy target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccSpec {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_floor")]
    pub abs_floor: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default)]
    pub sequential: bool,
}

impl Default for AccSpec {
    fn default() -> Self {
        AccSpec {
            rel_tol: default_rel_tol(),
            abs_floor: default_abs_floor(),
            max_terms: default_max_terms(),
            sequential: false,
        }
    }
}

impl AccSpec {
    pub fn target(&self) -> Result<AccuracyTarget, CliError> {
        let exec = if self.sequential { Execution::Sequential } else { Execution::Parallel };
        AccuracyTarget::new(self.rel_tol, self.abs_floor, self.max_terms)
            .map(|a| a.with_exec(exec))
            .map_err(|e| CliError::schema("/acc", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRequest {
    pub command: Command,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default)]
    pub acc: AccSpec,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed request; `pointer` locates the offending field.
    Schema { pointer: String, message: String },
    Eval(ZetaError),
    /// A self-test check failed.
    Failed(String),
}

impl CliError {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// 1 schema, 2 pole or domain, 3 convergence, 4 failed self-test.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => 1,
            CliError::Eval(e) => match e {
                ZetaError::Pole { .. } | ZetaError::Domain(_) | ZetaError::SingularTerm(_) => 2,
                ZetaError::NonConvergence { .. }
                | ZetaError::InsufficientHeatDepth { .. }
                | ZetaError::StencilInstability { .. } => 3,
            },
            CliError::Failed(_) => 4,
        }
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        CliError::Eval(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema { pointer, message } => write!(f, "schema error at {pointer}: {message}"),
            CliError::Eval(e) => write!(f, "{e}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

/// Decodes `value`, reporting failures relative to the pointer `base`.
pub fn decode_at<T: DeserializeOwned>(value: &Value, base: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = format!("{base}{}", pointer_of(e.path()));
        CliError::schema(pointer, e.into_inner().to_string())
    })
}

impl JobRequest {
    pub fn from_value(value: &Value) -> Result<Self, CliError> {
        decode_at(value, "")
    }

    pub fn decode(&self) -> Result<Job, CliError> {
        let p = &self.params;
        let base = "/params";
        let job = match self.command {
            Command::Epstein => Job::Epstein(decode_at(p, base)?),
            Command::Cs2d => Job::Cs2d(decode_at(p, base)?),
            Command::Truncated => Job::Truncated(decode_at(p, base)?),
            Command::Casimir => Job::Casimir(decode_at(p, base)?),
            Command::Det => Job::Det(DetJob::decode(p, base)?),
            Command::Anomaly => Job::Anomaly(decode_at(p, base)?),
            Command::Orcheck => Job::Orcheck(decode_at(p, base)?),
            Command::Selftest => Job::Selftest(decode_at(p, base)?),
        };
        job.check_shapes()?;
        Ok(job)
    }
}

/// Complex input: a number, `{"re", "im"}` or a string such as `"3+0.5i"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "ComplexRepr")]
pub struct ComplexIn(pub Complex64);

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Text(String),
    Parts(Parts),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Parts {
    re: f64,
    #[serde(default)]
    im: f64,
}

impl TryFrom<ComplexRepr> for ComplexIn {
    type Error = String;
    fn try_from(r: ComplexRepr) -> Result<Self, String> {
        match r {
            ComplexRepr::Real(x) => Ok(ComplexIn(Complex64::new(x, 0.0))),
            ComplexRepr::Parts(Parts { re, im }) => Ok(ComplexIn(Complex64::new(re, im))),
            ComplexRepr::Text(t) => parse_complex(&t).map(ComplexIn),
        }
    }
}

/// Parses `x`, `yi`, `x+yi` or `x-yi` (whitespace ignored, `j` accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {text:?} as a complex number");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // the split is the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64, String> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Square matrix input: row-major nested arrays, a flat row-major array of
/// k² entries, or a single number for a 1×1 matrix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "MatrixRepr")]
pub struct MatrixIn(pub Vec<Vec<f64>>);

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Scalar(f64),
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl TryFrom<MatrixRepr> for MatrixIn {
    type Error = String;
    fn try_from(r: MatrixRepr) -> Result<Self, String> {
        let rows = match r {
            MatrixRepr::Scalar(x) => vec![vec![x]],
            MatrixRepr::Rows(rows) => rows,
            MatrixRepr::Flat(v) => {
                let k = (v.len() as f64).sqrt().round() as usize;
                if k * k != v.len() {
                    return Err(format!("flat matrix needs a square number of entries, got {}", v.len()));
                }
                v.chunks(k.max(1)).map(|c| c.to_vec()).collect()
            }
        };
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err("matrix must be square and non-empty".into());
        }
        Ok(MatrixIn(rows))
    }
}

impl MatrixIn {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsteinJob {
    pub dim: Option<usize>,
    /// A in ½(n+c)ᵀA(n+c) + q
    pub matrix: MatrixIn,
    #[serde(default)]
    pub q: f64,
    pub s: ComplexIn,
    pub c: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cs2dJob {
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    pub c: f64,
    #[serde(default)]
    pub q: f64,
    pub s: ComplexIn,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncatedJob {
    pub a: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub q: f64,
    pub s: ComplexIn,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasimirJob {
    pub dim: Option<usize>,
    pub metric: MatrixIn,
    #[serde(default)]
    pub mass: f64,
}

/// a n₁² + b n₁n₂ + c n₂² + q over Z² without the origin
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Torus2dDet {
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    pub c: f64,
    #[serde(default)]
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeichmullerDet {
    pub tau1: f64,
    pub tau2: f64,
}

/// ½nᵀAn + q over all of Z^p
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDet {
    pub matrix: MatrixIn,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDet {
    pub spectrum: SpectrumSource,
}

/// Selected by the `kind` field.
#[derive(Debug, Clone, PartialEq)]
pub enum DetJob {
    Torus2d(Torus2dDet),
    Teichmuller(TeichmullerDet),
    Lattice(LatticeDet),
    Spectrum(SpectrumDet),
}

impl DetJob {
    fn decode(value: &Value, base: &str) -> Result<Self, CliError> {
        let (kind, rest) = split_tag(value, base, &["torus2d", "teichmuller", "lattice", "spectrum"])?;
        Ok(match kind.as_str() {
            "torus2d" => DetJob::Torus2d(decode_at(&rest, base)?),
            "teichmuller" => DetJob::Teichmuller(decode_at(&rest, base)?),
            "lattice" => DetJob::Lattice(decode_at(&rest, base)?),
            _ => DetJob::Spectrum(decode_at(&rest, base)?),
        })
    }
}

/// Separates the `kind` tag of an object from its other fields. Decoding the
/// rest on its own keeps field-level error locations, which serde's
/// internally tagged enums lose.
pub fn split_tag(value: &Value, base: &str, kinds: &[&str]) -> Result<(String, Value), CliError> {
    let Some(obj) = value.as_object() else {
        return Err(CliError::schema(base.to_string(), "expected an object"));
    };
    let at = format!("{base}/kind");
    let kind = match obj.get("kind") {
        Some(Value::String(k)) if kinds.contains(&k.as_str()) => k.clone(),
        Some(other) => {
            return Err(CliError::schema(at, format!("unknown kind {other}, expected one of {kinds:?}")));
        }
        None => return Err(CliError::schema(at, format!("missing kind, expected one of {kinds:?}"))),
    };
    let mut rest = obj.clone();
    rest.remove("kind");
    Ok((kind, Value::Object(rest)))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnomalyJob {
    pub a: SpectrumSource,
    pub b: SpectrumSource,
    pub ab: SpectrumSource,
}

fn default_size() -> usize {
    4
}

fn default_order() -> u32 {
    2
}

fn default_eps() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrcheckJob {
    #[serde(default = "default_size")]
    pub size: usize,
    #[serde(default = "default_order")]
    pub m: u32,
    #[serde(default = "default_order")]
    pub n: u32,
    /// drawn from the seed when absent
    pub alphas: Option<Vec<f64>>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestJob {
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Epstein(EpsteinJob),
    Cs2d(Cs2dJob),
    Truncated(TruncatedJob),
    Casimir(CasimirJob),
    Det(DetJob),
    Anomaly(AnomalyJob),
    Orcheck(OrcheckJob),
    Selftest(SelftestJob),
}

fn check_dim(dim: Option<usize>, m: &MatrixIn, field: &str) -> Result<(), CliError> {
    match dim {
        Some(d) if d != m.dim() => Err(CliError::schema(
            "/params/dim",
            format!("dim {d} does not match the {k}x{k} {field}", k = m.dim()),
        )),
        _ => Ok(()),
    }
}

impl Job {
    /// Structural checks that serde cannot express.
    fn check_shapes(&self) -> Result<(), CliError> {
        match self {
            Job::Epstein(j) => {
                check_dim(j.dim, &j.matrix, "matrix")?;
                if let Some(c) = &j.c {
                    if c.len() != j.matrix.dim() {
                        return Err(CliError::schema(
                            "/params/c",
                            format!("offset has {} entries, matrix is {}x{}", c.len(), j.matrix.dim(), j.matrix.dim()),
                        ));
                    }
                }
                Ok(())
            }
            Job::Casimir(j) => check_dim(j.dim, &j.metric, "metric"),
            Job::Orcheck(j) => {
                if let Some(a) = &j.alphas {
                    if a.len() != j.n as usize {
                        return Err(CliError::schema(
                            "/params/alphas",
                            format!("expected n = {} alphas, got {}", j.n, a.len()),
                        ));
                    }
                }
                if j.size == 0 || j.size > zetareg::opreg::MAX_SIZE {
                    return Err(CliError::schema(
                        "/params/size",
                        format!("size must lie in 1..={}", zetareg::opreg::MAX_SIZE),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
