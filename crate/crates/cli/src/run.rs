//! Dispatch of decoded jobs to the library evaluators.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use zetareg::epstein::{chowla_selberg_2d_with, epstein_2d_inhomogeneous_with, epstein_inhomogeneous, epstein_massless_recursive};
use zetareg::lattice::{EpsteinParams, QuadraticFormSpec};
use zetareg::opreg::{laurent_report, or_multi_power, or_regularized_power_with, schwinger_log_with, ORProblem};
use zetareg::physics::{
    casimir_energy_torus, det_torus_2d, det_torus_teichmuller, zeta_prime_zero_pd, LogDet, TorusModuli2D, TorusSpec,
};
use zetareg::spectral::{multiplicative_anomaly_with_err, zeta_prime_at_zero, AnomalyInput};
use zetareg::truncated::{truncated_zeta_any_offset, truncated_zeta_with, TruncatedParams};
use zetareg::{AccuracyTarget, ZetaError};

use crate::job::*;
use crate::output::{complex, num, pole, zeta_value};

/// Runs the job; the flag is false when a check-style command found a failure.
pub fn dispatch(job: &Job, acc: &AccuracyTarget) -> Result<(Value, bool), CliError> {
    let ok = |v: Value| (v, true);
    match job {
        Job::Epstein(j) => epstein(j, acc).map(ok),
        Job::Cs2d(j) => cs2d(j, acc).map(ok),
        Job::Truncated(j) => truncated(j, acc).map(ok),
        Job::Casimir(j) => casimir(j, acc).map(ok),
        Job::Det(j) => det(j, acc).map(ok),
        Job::Anomaly(j) => anomaly(j, acc).map(ok),
        Job::Orcheck(j) => orcheck(j, acc),
        Job::Selftest(j) => crate::selftest::run(j.seed, acc),
    }
}

fn epstein(j: &EpsteinJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let form = QuadraticFormSpec::new(&j.matrix.0)?;
    let p = form.dim();
    let c = j.c.clone().unwrap_or_else(|| vec![0.0; p]);
    let homogeneous = j.q == 0.0 && c.iter().all(|&x| x == 0.0);
    let (v, method) = if homogeneous {
        (epstein_massless_recursive(&form, j.s.0, acc)?, "massless_recursion")
    } else if j.q == 0.0 {
        return Err(ZetaError::domain("q = 0 needs c = 0").into());
    } else {
        let params = EpsteinParams::new(form, c, j.q)?;
        (epstein_inhomogeneous(&params, j.s.0, acc)?, "bessel_series")
    };
    let mut out = zeta_value(&v);
    out["origin_included"] = json!(!homogeneous);
    out["method"] = json!(method);
    Ok(out)
}

fn cs2d(j: &Cs2dJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let v = if j.q == 0.0 {
        chowla_selberg_2d_with(j.a, j.b, j.c, j.s.0, acc)?
    } else {
        epstein_2d_inhomogeneous_with(j.a, j.b, j.c, j.q, j.s.0, acc)?
    };
    let mut out = zeta_value(&v);
    out["origin_included"] = json!(false);
    Ok(out)
}

fn truncated(j: &TruncatedJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let r = if j.c > 0.0 && j.c <= 1.0 {
        truncated_zeta_with(&TruncatedParams::new(j.a, j.c, j.q)?, j.s.0, acc)?
    } else {
        truncated_zeta_any_offset(j.a, j.c, j.q, j.s.0)?
    };
    Ok(json!({
        "value": complex(r.value),
        "err_estimate": num(r.err_estimate),
        "nearest_pole": pole(&r.nearest_pole),
        "terms_used": r.terms_used,
        "smallest_term": num(r.smallest_term),
        "floor_reached": r.floor_reached,
    }))
}

fn casimir(j: &CasimirJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let torus = TorusSpec::new(&j.metric.0, j.mass)?;
    let e = casimir_energy_torus(&torus, acc)?;
    Ok(json!({
        "energy": num(e.energy),
        "err_estimate": num(e.err_estimate),
        "imag": num(e.imag),
        "pole_residue": e.pole_residue.map(num),
        "bulk": num(e.bulk),
        "topological": num(e.topological),
    }))
}

fn log_det(ld: LogDet) -> Value {
    let det = ld.det();
    json!({
        "ln_det": num(ld.ln_det),
        "err_estimate": num(ld.err_estimate),
        "det": num(det),
        "det_err_estimate": num(det * ld.err_estimate),
    })
}

fn det(j: &DetJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let ld = match j {
        DetJob::Torus2d(t) => det_torus_2d(t.a, t.b, t.c, t.q)?,
        DetJob::Teichmuller(t) => det_torus_teichmuller(&TorusModuli2D::new(t.tau1, t.tau2)?)?,
        DetJob::Lattice(l) => {
            let params = EpsteinParams::centered(QuadraticFormSpec::new(&l.matrix.0)?, l.q)?;
            let zp = zeta_prime_zero_pd(&params, acc)?;
            LogDet {
                ln_det: -zp.value.re,
                err_estimate: zp.err_estimate,
            }
        }
        DetJob::Spectrum(sp) => {
            let model = sp.spectrum.load("/params/spectrum")?;
            let (zp, err) = zeta_prime_at_zero(&model, acc)?;
            LogDet {
                ln_det: -zp,
                err_estimate: err,
            }
        }
    };
    Ok(log_det(ld))
}

fn anomaly(j: &AnomalyJob, acc: &AccuracyTarget) -> Result<Value, CliError> {
    let input = AnomalyInput {
        spec_a: j.a.load("/params/a")?,
        spec_b: j.b.load("/params/b")?,
        spec_ab: j.ab.load("/params/ab")?,
    };
    let (v, err) = multiplicative_anomaly_with_err(&input, acc)?;
    Ok(json!({ "anomaly": num(v), "err_estimate": num(err) }))
}

/// Symmetric positive-definite test matrix with spectrum in [0.5, 2.5].
pub fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = g.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| rng.random_range(0.5..2.5)));
    let h = &q * d * q.transpose();
    (&h + h.transpose()) * 0.5
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Relative tolerance for the operator-regularization identities.
pub const OR_TOL: f64 = 1e-6;

/// Returns the record and whether every identity held.
pub fn orcheck(j: &OrcheckJob, acc: &AccuracyTarget) -> Result<(Value, bool), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(j.seed);
    let h = random_spd(j.size, &mut rng);
    let alphas = match &j.alphas {
        Some(a) => a.clone(),
        None => (0..j.n).map(|_| rng.random_range(-3.0..3.0)).collect(),
    };
    let exec = acc.exec;
    let prob = ORProblem::new(&h, j.m, j.n, alphas.clone())?;
    let zero = ORProblem::new(&h, j.m, j.n, vec![0.0; j.n as usize])?;
    let exact = prob.cache.power(-(j.m as f64));
    let scale = max_abs(&exact);

    let mut checks = Vec::new();
    let mut all = true;
    let mut record = |name: &str, deviation: f64, err: f64, scale: f64| {
        let rel = deviation / scale;
        let passed = rel <= OR_TOL;
        all &= passed;
        checks.push(json!({
            "name": name,
            "rel_deviation": num(rel),
            "err_estimate": num(err / scale),
            "passed": passed,
        }));
    };

    let r = or_regularized_power_with(&prob, j.eps, exec)?;
    record("power", max_abs(&(&r.value - &exact)), r.err_estimate, scale);
    let r0 = or_regularized_power_with(&zero, j.eps, exec)?;
    record("alpha_inertness", max_abs(&(&r.value - &r0.value)), r.err_estimate + r0.err_estimate, scale);

    let exact2 = prob.cache.power(-(j.m as f64) - 1.0);
    let r2 = or_multi_power(&prob.cache, &[j.m, 1], j.n, &alphas, j.eps, exec)?;
    record("product", max_abs(&(&r2.value - &exact2)), r2.err_estimate, max_abs(&exact2));

    let ln = prob.cache.log();
    let sl = schwinger_log_with(&prob.cache, j.n, j.eps, exec)?;
    record("schwinger_log", max_abs(&(&sl.value - &ln)), sl.err_estimate, max_abs(&ln).max(1.0));

    let laurent = laurent_report(&prob);
    let trace = exact.trace().abs();
    record("laurent_poles", laurent.max_pole_coefficient, 0.0, trace);

    let rows: Vec<Vec<f64>> = h.row_iter().map(|r| r.iter().copied().collect()).collect();
    let out = json!({
        "matrix": rows,
        "alphas": alphas,
        "eps": num(j.eps),
        "checks": checks,
        "all_passed": all,
    });
    Ok((out, all))
}

