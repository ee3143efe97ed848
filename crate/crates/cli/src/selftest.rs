//! Randomized invariant checks behind `zetareg selftest`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use zetareg::epstein::{chowla_selberg_2d_with, epstein_inhomogeneous, epstein_reflection};
use zetareg::lattice::{smoothed_lattice_sum, EpsteinParams, QuadraticFormSpec};
use zetareg::physics::{casimir_energy_torus, det_torus_2d, zeta_prime_zero_pd, TorusSpec};
use zetareg::spectral::{multiplicative_anomaly_with_err, spectral_zeta_mellin, AnomalyInput, SpectrumModel};
use zetareg::truncated::full_line_split_check;
use zetareg::AccuracyTarget;

use crate::job::{CliError, OrcheckJob};
use crate::output::num;
use crate::run::{orcheck, random_spd};

pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    /// set when the evaluation itself failed
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.deviation <= self.tolerance
    }
}

fn random_form(p: usize, rng: &mut ChaCha8Rng) -> QuadraticFormSpec {
    let h = random_spd(p, rng);
    let rows: Vec<Vec<f64>> = h.row_iter().map(|r| r.iter().copied().collect()).collect();
    QuadraticFormSpec::new(&rows).expect("random_spd is positive definite")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

type Outcome = zetareg::Result<f64>;

fn checks(seed: u64, acc: &AccuracyTarget) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |name: &'static str, tolerance: f64, r: Outcome| {
        let (deviation, error) = match r {
            Ok(d) => (d, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        out.push(Check {
            name,
            deviation,
            tolerance,
            error,
        });
    };

    let form = random_form(2, &mut rng);
    let c = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
    let q = rng.random_range(0.2..2.0);
    let s = Complex64::new(rng.random_range(1.5..3.0), rng.random_range(-2.0..2.0));
    push("epstein_vs_lattice_oracle", 1e-10, (|| {
        let params = EpsteinParams::new(form.clone(), c.clone(), q)?;
        let v = epstein_inhomogeneous(&params, s, acc)?;
        let o = smoothed_lattice_sum(&params, s, false, acc.exec)?;
        Ok(rel(v.value, o.value))
    })());

    let form3 = random_form(3, &mut rng);
    let q3 = rng.random_range(0.2..2.0);
    let s3 = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    push("permutation_invariance", 1e-11, (|| {
        let a = epstein_inhomogeneous(&EpsteinParams::centered(form3.clone(), q3)?, s3, acc)?;
        let b = epstein_inhomogeneous(&EpsteinParams::centered(form3.permuted(&[2, 0, 1])?, q3)?, s3, acc)?;
        Ok(rel(b.value, a.value))
    })());

    let sr = Complex64::new(rng.random_range(-1.5..2.5), rng.random_range(0.2..2.0));
    push("reflection_2d", 1e-9, (|| {
        let (l, r) = epstein_reflection(&form, sr)?;
        Ok(rel(l.value, r.value))
    })());

    let (a, b, cc) = (rng.random_range(0.7..1.5), rng.random_range(-0.5..0.5), rng.random_range(0.7..1.5));
    push("chowla_selberg_vs_lattice_oracle", 1e-10, (|| {
        let s = Complex64::new(2.0, 0.5);
        let v = chowla_selberg_2d_with(a, b, cc, s, acc)?;
        let params = EpsteinParams::centered(QuadraticFormSpec::binary(a, b, cc)?, 0.0)?;
        let o = smoothed_lattice_sum(&params, s, true, acc.exec)?;
        Ok(rel(v.value, o.value))
    })());

    push("casimir_circle", 1e-12, (|| {
        let e = casimir_energy_torus(&TorusSpec::new(&[vec![1.0]], 0.0)?, acc)?;
        Ok((e.energy + 1.0 / 6.0).abs())
    })());

    let (ta, tc, tq) = (rng.random_range(0.5..2.0), rng.random_range(0.1..0.9), rng.random_range(0.5..2.0));
    let ts = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
    push("truncated_full_line_split", 1e-9, (|| {
        let (l, r) = full_line_split_check(ta, tc, tq, ts)?;
        Ok(rel(r.value, l.value))
    })());

    let dq = rng.random_range(0.3..2.0);
    push("determinant_cross_paths", 1e-9, (|| {
        let ld = det_torus_2d(a, b, cc, dq)?;
        let params = EpsteinParams::centered(QuadraticFormSpec::binary(a, b, cc)?, dq)?;
        let zp = zeta_prime_zero_pd(&params, acc)?.value.re;
        Ok((ld.ln_det + zp + dq.ln()).abs() / ld.ln_det.abs().max(1.0))
    })());

    let sm = Complex64::new(rng.random_range(-2.0..1.5), rng.random_range(-1.0..1.0));
    push("mellin_vs_bessel_series", 1e-9, (|| {
        let spec = SpectrumModel::torus(&form, q)?;
        let m = spectral_zeta_mellin(&spec, sm, acc)?;
        let e = epstein_inhomogeneous(&EpsteinParams::centered(form.clone(), q)?, sm, acc)?;
        Ok(rel(m.value, e.value))
    })());

    let la: Vec<f64> = (0..5).map(|_| rng.random_range(0.5..4.0)).collect();
    let lb: Vec<f64> = (0..5).map(|_| rng.random_range(0.5..4.0)).collect();
    push("anomaly_finite_spectrum", 1e-12, (|| {
        let pairs = |v: &[f64]| v.iter().map(|&l| (l, 1)).collect::<Vec<_>>();
        let ab: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x * y).collect();
        let input = AnomalyInput {
            spec_a: SpectrumModel::finite(&pairs(&la))?,
            spec_b: SpectrumModel::finite(&pairs(&lb))?,
            spec_ab: SpectrumModel::finite(&pairs(&ab))?,
        };
        Ok(multiplicative_anomaly_with_err(&input, acc)?.0.abs())
    })());

    let job = OrcheckJob {
        size: 4,
        m: 2,
        n: 2,
        alphas: None,
        eps: 1e-2,
        seed: rng.random(),
    };
    let worst = match orcheck(&job, acc) {
        Ok((v, _)) => Ok(v["checks"]
            .as_array()
            .map(|cs| cs.iter().filter_map(|c| c["rel_deviation"].as_f64()).fold(0.0, f64::max))
            .unwrap_or(f64::INFINITY)),
        Err(CliError::Eval(e)) => Err(e),
        Err(e) => Err(zetareg::ZetaError::domain(e.to_string())),
    };
    push("operator_regularization", crate::run::OR_TOL, worst);

    out
}

/// Runs the checks; returns the record and whether all passed.
pub fn run(seed: u64, acc: &AccuracyTarget) -> Result<(Value, bool), CliError> {
    let cs = checks(seed, acc);
    let all = cs.iter().all(Check::passed);
    let rows: Vec<Value> = cs
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "deviation": num(c.deviation),
                "tolerance": num(c.tolerance),
                "passed": c.passed(),
                "error": c.error,
            })
        })
        .collect();
    Ok((json!({ "seed": seed, "checks": rows, "all_passed": all }), all))
}

/// Plain-text table of a selftest record.
pub fn table(record: &Value) -> String {
    let mut s = format!("{:<34} {:>12} {:>10}  result\n", "check", "deviation", "tolerance");
    for c in record["checks"].as_array().into_iter().flatten() {
        let dev = c["deviation"].as_f64().map_or_else(|| "-".into(), |d| format!("{d:.3e}"));
        let tol = c["tolerance"].as_f64().map_or_else(|| "-".into(), |d| format!("{d:.0e}"));
        let verdict = if c["passed"].as_bool() == Some(true) { "pass" } else { "FAIL" };
        s.push_str(&format!("{:<34} {:>12} {:>10}  {verdict}", c["name"].as_str().unwrap_or("?"), dev, tol));
        if let Some(e) = c["error"].as_str() {
            s.push_str(&format!(" ({e})"));
        }
        s.push('\n');
    }
    s
}
