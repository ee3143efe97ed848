//! Structured front end for the `zetareg` evaluators.
//!
//! Every invocation is one [`JobRequest`]; the command-line flags are only a
//! convenient way to build it. [`run_command`] returns a JSON record holding
//! the result (or the error), the exact input echo and the exit status.

pub mod job;
pub mod output;
pub mod run;
pub mod selftest;
pub mod spectrum;

use serde_json::{json, Value};
use zetareg::ZetaError;

pub use job::{CliError, Command, JobRequest};

/// Record printed on stdout and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub record: Value,
    pub exit_code: i32,
}

fn error_record(e: &CliError) -> Value {
    let mut v = json!({ "message": e.to_string() });
    match e {
        CliError::Schema { pointer, message } => {
            v["kind"] = json!("schema");
            v["pointer"] = json!(pointer);
            v["message"] = json!(message);
        }
        CliError::Failed(_) => v["kind"] = json!("check_failed"),
        CliError::Eval(z) => {
            v["kind"] = json!(match z {
                ZetaError::Pole { .. } => "pole",
                ZetaError::Domain(_) => "domain",
                ZetaError::SingularTerm(_) => "singular_term",
                ZetaError::NonConvergence { .. } => "non_convergence",
                ZetaError::InsufficientHeatDepth { .. } => "insufficient_heat_depth",
                ZetaError::StencilInstability { .. } => "stencil_instability",
            });
            if let ZetaError::Pole { location, residue } = z {
                v["location"] = output::complex(*location);
                v["residue"] = output::complex(*residue);
            }
        }
    }
    v
}

fn echo(req: &JobRequest) -> Value {
    serde_json::to_value(req).unwrap_or(Value::Null)
}

/// Validates and runs one job.
pub fn run_command(req: &JobRequest) -> Outcome {
    let result = req
        .acc
        .target()
        .and_then(|acc| req.decode().and_then(|job| run::dispatch(&job, &acc)));
    let mut record = json!({ "command": req.command.name(), "input": echo(req) });
    match result {
        Ok((value, passed)) => {
            record["result"] = value;
            let code = if passed { 0 } else { CliError::Failed(String::new()).exit_code() };
            Outcome { record, exit_code: code }
        }
        Err(e) => {
            record["error"] = error_record(&e);
            Outcome {
                record,
                exit_code: e.exit_code(),
            }
        }
    }
}

/// Parses a raw JSON request; failures are reported like any schema error.
pub fn run_json(value: &Value) -> Outcome {
    match JobRequest::from_value(value) {
        Ok(req) => run_command(&req),
        Err(e) => Outcome {
            record: json!({ "input": value, "error": error_record(&e) }),
            exit_code: e.exit_code(),
        },
    }
}
