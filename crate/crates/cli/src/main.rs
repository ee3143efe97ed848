use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use zetareg_cli::job::AccSpec;
use zetareg_cli::{output, run_json, selftest, Command, JobRequest, Outcome};

#[derive(Parser)]
#[command(name = "zetareg", version, about = "Spectral zeta functions, Casimir energies and zeta determinants")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// relative tolerance of series and quadratures
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    abs_floor: Option<f64>,
    #[arg(long, global = true)]
    max_terms: Option<usize>,
    /// seed for randomized draws (orcheck, selftest)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// disable data-parallel kernels
    #[arg(long, global = true)]
    sequential: bool,
    /// add wall-clock timing to the record (breaks byte-identical output)
    #[arg(long, global = true)]
    timing: bool,
    /// print the selftest record as JSON instead of a table
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Σ over Z^p of [½(n+c)ᵀA(n+c) + q]^{−s}
    Epstein {
        #[arg(long)]
        dim: Option<usize>,
        /// A as nested JSON rows, e.g. "[[2,0],[0,2]]"
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// complex argument, e.g. "3+0i"
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// offset vector as a JSON array
        #[arg(long)]
        c: Option<String>,
    },
    /// Σ over Z² ∖ {0} of (a n₁² + b n₁n₂ + c n₂² + q)^{−s}
    Cs2d {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Σ_{n≥0} [a(n+c)² + q]^{−s}
    Truncated {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Casimir energy ζ(−½) of −Δ + m² on the flat torus with metric g
    Casimir {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
    },
    /// zeta-regularized determinants
    Det {
        #[command(subcommand)]
        kind: DetCmd,
    },
    /// multiplicative anomaly of commuting operators from spectrum files
    Anomaly {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        ab: String,
    },
    /// operator-regularization identities on a random SPD matrix
    Orcheck {
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        /// JSON array of n constants
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// randomized invariant checks; exit 0 iff all pass
    Selftest,
    /// run a JSON job request from a file, or stdin for "-"
    Request { file: String },
}

#[derive(Subcommand)]
enum DetCmd {
    /// a n₁² + b n₁n₂ + c n₂² + q over Z² ∖ {0}
    Torus2d {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
    },
    /// flat torus with Teichmüller parameter τ = τ₁ + iτ₂
    Teichmuller {
        #[arg(long, allow_hyphen_values = true)]
        tau1: f64,
        #[arg(long)]
        tau2: f64,
    },
    /// ½nᵀAn + q over Z^p
    Lattice {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        q: f64,
    },
    /// from a spectrum file
    Spectrum { file: String },
}

/// Flag text that is valid JSON becomes that value; anything else stays a
/// string and is rejected (with a pointer) by the schema.
fn loose(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

fn object(pairs: Vec<(&str, Option<Value>)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    }
    Value::Object(m)
}

fn request_value(cmd: Cmd, g: &Global) -> Result<Value, String> {
    let (command, mut params) = match cmd {
        Cmd::Epstein { dim, matrix, q, s, c } => (
            Command::Epstein,
            object(vec![
                ("dim", dim.map(|d| json!(d))),
                ("matrix", Some(loose(&matrix))),
                ("q", Some(json!(q))),
                ("s", Some(json!(s))),
                ("c", c.map(|c| loose(&c))),
            ]),
        ),
        Cmd::Cs2d { a, b, c, q, s } => (Command::Cs2d, json!({"a": a, "b": b, "c": c, "q": q, "s": s})),
        Cmd::Truncated { a, c, q, s } => (Command::Truncated, json!({"a": a, "c": c, "q": q, "s": s})),
        Cmd::Casimir { dim, metric, mass } => (
            Command::Casimir,
            object(vec![
                ("dim", dim.map(|d| json!(d))),
                ("metric", Some(loose(&metric))),
                ("mass", Some(json!(mass))),
            ]),
        ),
        Cmd::Det { kind } => (
            Command::Det,
            match kind {
                DetCmd::Torus2d { a, b, c, q } => json!({"kind": "torus2d", "a": a, "b": b, "c": c, "q": q}),
                DetCmd::Teichmuller { tau1, tau2 } => json!({"kind": "teichmuller", "tau1": tau1, "tau2": tau2}),
                DetCmd::Lattice { matrix, q } => json!({"kind": "lattice", "matrix": loose(&matrix), "q": q}),
                DetCmd::Spectrum { file } => json!({"kind": "spectrum", "spectrum": file}),
            },
        ),
        Cmd::Anomaly { a, b, ab } => (Command::Anomaly, json!({"a": a, "b": b, "ab": ab})),
        Cmd::Orcheck { size, m, n, alphas, eps } => (
            Command::Orcheck,
            object(vec![
                ("size", size.map(|x| json!(x))),
                ("m", m.map(|x| json!(x))),
                ("n", n.map(|x| json!(x))),
                ("alphas", alphas.map(|a| loose(&a))),
                ("eps", eps.map(|x| json!(x))),
            ]),
        ),
        Cmd::Selftest => (Command::Selftest, json!({})),
        Cmd::Request { file } => {
            let mut text = String::new();
            let read = if file == "-" {
                std::io::stdin().read_to_string(&mut text).map(|_| ())
            } else {
                std::fs::read_to_string(&file).map(|t| text = t)
            };
            read.map_err(|e| format!("cannot read {file}: {e}"))?;
            let mut v: Value = serde_json::from_str(&text).map_err(|e| format!("{file} is not JSON: {e}"))?;
            apply_globals(&mut v, g);
            return Ok(v);
        }
    };
    if let (Some(seed), Command::Orcheck | Command::Selftest) = (g.seed, command) {
        params["seed"] = json!(seed);
    }
    let req = JobRequest {
        command,
        params,
        acc: AccSpec::default(),
    };
    let mut v = serde_json::to_value(&req).map_err(|e| e.to_string())?;
    apply_globals(&mut v, g);
    Ok(v)
}

/// Command-line accuracy flags override the request's `acc` block.
fn apply_globals(v: &mut Value, g: &Global) {
    let Some(obj) = v.as_object_mut() else { return };
    let acc = obj.entry("acc").or_insert_with(|| json!({}));
    let Some(acc) = acc.as_object_mut() else { return };
    if let Some(t) = g.tol {
        acc.insert("rel_tol".into(), json!(t));
    }
    if let Some(f) = g.abs_floor {
        acc.insert("abs_floor".into(), json!(f));
    }
    if let Some(m) = g.max_terms {
        acc.insert("max_terms".into(), json!(m));
    }
    if g.sequential {
        acc.insert("sequential".into(), json!(true));
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let is_selftest = matches!(cli.cmd, Cmd::Selftest);
    let g = cli.global;
    let outcome = match request_value(cli.cmd, &g) {
        Ok(v) => run_json(&v),
        Err(msg) => Outcome {
            record: json!({"error": {"kind": "schema", "pointer": "", "message": msg}}),
            exit_code: 1,
        },
    };
    let mut record = outcome.record;
    if g.timing {
        record["timing"] = json!({"elapsed_s": started.elapsed().as_secs_f64()});
    }
    if let Some(msg) = record["error"]["message"].as_str() {
        eprintln!("zetareg: {msg}");
    }
    if is_selftest && !g.json && record.get("result").is_some() {
        print!("{}", selftest::table(&record["result"]));
    } else {
        println!("{}", output::render(&record));
    }
    ExitCode::from(outcome.exit_code as u8)
}
