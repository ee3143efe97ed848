//! Casimir energies on flat tori and closed-form torus determinants.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::epstein::{bessel_series, epstein_massless_recursive, sum_half_shells};
use crate::error::{Result, ZetaError};
use crate::lattice::{EpsteinParams, QuadraticFormSpec};
use crate::spectral::{spectral_zeta_finite_part, SpectrumModel};
use crate::specfun::bessel::{bessel_k, bessel_k_scaled};
use crate::specfun::divisor::divisors;
use crate::specfun::gamma::{digamma_int_plus_one, gamma_real, EULER_GAMMA};
use crate::specfun::zeta::RIEMANN_ZETA_PRIME_ZERO;
use crate::types::{AccuracyTarget, ZetaValue};

/// A flat d-torus with metric g and a scalar field of mass m.
///
/// The Laplacian eigenvalues are nᵀgn + m², i.e. the quadratic form ½nᵀAn
/// with A = 2g.
#[derive(Debug, Clone)]
pub struct TorusSpec {
    metric: QuadraticFormSpec,
    form: QuadraticFormSpec,
    pub m: f64,
}

impl TorusSpec {
    pub fn new(g: &[Vec<f64>], m: f64) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(ZetaError::domain("mass must be finite and >= 0"));
        }
        let metric = QuadraticFormSpec::new(g)?;
        let form = metric.scaled(2.0)?;
        Ok(TorusSpec { metric, form, m })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &QuadraticFormSpec {
        &self.metric
    }

    /// The form A = 2g of the eigenvalues ½nᵀAn + m².
    pub fn form(&self) -> &QuadraticFormSpec {
        &self.form
    }
}

/// Casimir energy density E = ζ(−½) of the torus spectrum.
///
/// No ½ prefactor is applied. For m > 0 and odd d, s = −½ is a simple pole of
/// the massive zeta function; `energy` is then the finite part and
/// `pole_residue` carries the residue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirEnergy {
    pub energy: f64,
    pub err_estimate: f64,
    /// Imaginary part left over by the evaluator, bounded by `err_estimate`.
    pub imag: f64,
    pub pole_residue: Option<f64>,
    /// Contribution of the Γ(s − d/2) term (finite part at a pole); zero when m = 0.
    pub bulk: f64,
    /// The lattice sum of Bessel functions; the whole energy when m = 0.
    pub topological: f64,
}

pub fn casimir_energy_torus(torus: &TorusSpec, acc: &AccuracyTarget) -> Result<CasimirEnergy> {
    acc.validate()?;
    let s = Complex64::new(-0.5, 0.0);
    if torus.m == 0.0 {
        let v = epstein_massless_recursive(&torus.form, s, acc)?;
        return Ok(CasimirEnergy {
            energy: v.value.re,
            err_estimate: v.err_estimate,
            imag: v.value.im,
            pole_residue: None,
            bulk: 0.0,
            topological: v.value.re,
        });
    }
    let q = torus.m * torus.m;
    let (bulk, residue) = casimir_bulk(torus, q);
    if bessel_lattice_points(&torus.form, q) > BESSEL_POINT_BUDGET {
        // light fields: the dual sum decays too slowly, go through the heat trace
        let spec = SpectrumModel::torus(&torus.form, q)?;
        let (v, _) = spectral_zeta_finite_part(&spec, -0.5, acc)?;
        let energy = v.value.re;
        return Ok(CasimirEnergy {
            energy,
            err_estimate: v.err_estimate + 16.0 * f64::EPSILON * bulk.abs(),
            imag: v.value.im,
            pole_residue: residue,
            bulk,
            topological: energy - bulk,
        });
    }
    let params = EpsteinParams::centered(torus.form.clone(), q)?;
    let (topo, topo_err) = bessel_series(&params, s, acc)?;
    let energy = bulk + topo.re;
    let err = topo_err + 16.0 * f64::EPSILON * (bulk.abs() + energy.abs());
    Ok(CasimirEnergy {
        energy,
        err_estimate: err,
        imag: topo.im,
        pole_residue: residue,
        bulk,
        topological: topo.re,
    })
}

/// Above this many dual lattice points the massive route switches to the heat trace.
const BESSEL_POINT_BUDGET: f64 = 2e5;

/// Rough count of dual points the Bessel series needs: K decays like
/// exp(−2π√(2q mᵀA⁻¹m)) and mᵀA⁻¹m ≥ |m|²/λ_max(A).
fn bessel_lattice_points(form: &QuadraticFormSpec, q: f64) -> f64 {
    let radius = 40.0 * form.eig_max().sqrt() / (2.0 * PI * (2.0 * q).sqrt());
    (2.0 * radius + 1.0).powi(form.dim() as i32) / 2.0
}

/// The Γ(s − d/2) head C q^{d/2−s} Γ(s−d/2)/Γ(s) at s = −½, C = (2π)^{d/2}/√det A,
/// with its residue when d is odd.
fn casimir_bulk(torus: &TorusSpec, q: f64) -> (f64, Option<f64>) {
    let d = torus.dim();
    let half = d as f64 / 2.0;
    let cst = (2.0 * PI).powf(half) / torus.form.det().sqrt();
    if d % 2 == 0 {
        let g = gamma_real(-0.5 - half).expect("half-integer argument");
        return (cst * q.powf(half + 0.5) * g / (-2.0 * PI.sqrt()), None);
    }
    // Γ(s − d/2) has a pole at s = −½ = d/2 − k with k = (d+1)/2.
    // With ε = s + ½: Γ(−k+ε) = (−1)^k/k! (1/ε + ψ(k+1)) + O(ε) and
    // q^{d/2−s}/Γ(s) = f₀ (1 − ε(ln q + ψ(−½))) + O(ε²), f₀ = −q^k/(2√π).
    let k = (d as u32 + 1) / 2;
    let fact: f64 = (1..=k).map(f64::from).product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let f0 = -q.powi(k as i32) / (2.0 * PI.sqrt());
    let residue = cst * sign / fact * f0;
    let psi_minus_half = 2.0 - EULER_GAMMA - 2.0 * 2f64.ln();
    (residue * (digamma_int_plus_one(k) - q.ln() - psi_minus_half), Some(residue))
}

/// ζ′_{A,c,q}(0) in closed form for q > 0 (origin included):
///
/// 4(2q)^{p/4}/√det A Σ_{m ∈ Z^p_½} cos(2πm·c) (mᵀA⁻¹m)^{−p/4} K_{p/2}(2π√(2q mᵀA⁻¹m))
///   + (2π)^{p/2} Γ(−p/2) q^{p/2}/√det A                     (p odd)
///   + (−1)^k (2π)^k q^k [ψ(k+1) + γ − ln q]/(k! √det A)     (p = 2k)
pub fn zeta_prime_zero_pd(params: &EpsteinParams, acc: &AccuracyTarget) -> Result<ZetaValue> {
    acc.validate()?;
    let q = params.q;
    if !(q > 0.0) {
        return Err(ZetaError::domain("zeta_prime_zero_pd requires q > 0"));
    }
    let p = params.dim();
    let pf = p as f64;
    let sqrt_det = params.form.det().sqrt();
    let local = if p % 2 == 1 {
        (2.0 * PI).powf(pf / 2.0) * gamma_real(-pf / 2.0)? * q.powf(pf / 2.0) / sqrt_det
    } else {
        let k = (p / 2) as u32;
        let fact: f64 = (1..=k).map(f64::from).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * (2.0 * PI * q).powi(k as i32) / (fact * sqrt_det)
            * (digamma_int_plus_one(k) + EULER_GAMMA - q.ln())
    };
    let c = &params.c;
    let has_offset = c.iter().any(|&v| v != 0.0);
    let nu = Complex64::new(pf / 2.0, 0.0);
    let threshold = pf + 4.0;
    let lam_max = params.form.eig_max();
    let record = |m: &[i64]| -> Result<(Complex64, f64)> {
        let x: Vec<f64> = m.iter().map(|&v| v as f64).collect();
        let big_m = params.form.inverse_norm2(&x);
        let arg = 2.0 * PI * (2.0 * q * big_m).sqrt();
        let kb = bessel_k_scaled(nu, arg)?;
        let phase = if has_offset {
            (2.0 * PI * x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()).cos()
        } else {
            1.0
        };
        let w = (-pf / 4.0 * big_m.ln() - arg).exp() * phase;
        Ok((w * kb.scaled, w.abs() * kb.scaled_err))
    };
    let rate = 2.0 * PI * (2.0 * q / lam_max).sqrt();
    let (sum, err, _) = sum_half_shells(p, acc, rate, threshold, record)?;
    let coef = 4.0 * (2.0 * q).powf(pf / 4.0) / sqrt_det;
    let value = coef * sum + local;
    Ok(ZetaValue::new(
        value,
        coef * err + 8.0 * f64::EPSILON * (local.abs() + value.norm()),
    ))
}

/// A determinant carried as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub ln_det: f64,
    pub err_estimate: f64,
}

impl LogDet {
    pub fn det(&self) -> f64 {
        self.ln_det.exp()
    }
}

fn discriminant(a: f64, b: f64, c: f64) -> Result<f64> {
    let delta = 4.0 * a * c - b * b;
    if !(a > 0.0 && c > 0.0 && delta > 0.0) || !delta.is_finite() {
        return Err(ZetaError::domain("need a > 0, c > 0 and 4ac − b² > 0"));
    }
    Ok(delta)
}

/// ζ-determinant of a n₁² + b n₁n₂ + c n₂² + q over Z² ∖ {0}.
///
/// For q > 0,
///
/// ln det = −ln q − 2π(q ln q − q)/√Δ + 2 ln(1 − e^{−2π√(q/a)})
///   − 4 Σ_{n≥1} (1/n) [ √(q/a) K₁(4πn√(aq/Δ))
///                       + cos(πnb/a) Σ_{d|n} d e^{−(πn/a)√(Δ + 4aq/d²)} ],
///
/// and q = 0 uses the homogeneous limit
///
/// det = (1/a) exp[−4ζ′(0) − π√Δ/(6a) − 4 Σ σ₁(n)/n cos(πnb/a) e^{−πn√Δ/a}].
pub fn det_torus_2d(a: f64, b: f64, c: f64, q: f64) -> Result<LogDet> {
    let delta = discriminant(a, b, c)?;
    if !(q >= 0.0) || !q.is_finite() {
        return Err(ZetaError::domain("q must be finite and >= 0"));
    }
    let sd = delta.sqrt();
    let rate = PI * sd / a;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut n = 1u64;
    loop {
        let nf = n as f64;
        let phase = (PI * nf * b / a).cos();
        let (term, bound) = if q == 0.0 {
            let sigma: f64 = divisors(n).iter().map(|&d| d as f64).sum();
            let t = sigma / nf * phase * (-rate * nf).exp();
            (t, sigma / nf * (-rate * nf).exp())
        } else {
            let x = 4.0 * PI * nf * (a * q / delta).sqrt();
            let k1 = bessel_k(Complex64::new(1.0, 0.0), x)?.re;
            let ds: f64 = divisors(n)
                .iter()
                .map(|&d| {
                    let df = d as f64;
                    df * (-(PI * nf / a) * (delta + 4.0 * a * q / (df * df)).sqrt()).exp()
                })
                .sum();
            let t = ((q / a).sqrt() * k1 + phase * ds) / nf;
            (t, ((q / a).sqrt() * k1 + ds) / nf)
        };
        total += term;
        if bound <= 1e-17 * total.abs().max(1e-300) || bound == 0.0 {
            // both series decay at least geometrically with ratio e^{−min rate}
            err += 4.0 * bound / (1.0 - (-rate.min(PI)).exp());
            break;
        }
        n += 1;
        if n > 10_000_000 {
            return Err(ZetaError::NonConvergence {
                terms: n as usize,
                estimate: bound,
            });
        }
    }
    let ln_det = if q == 0.0 {
        -a.ln() - 4.0 * RIEMANN_ZETA_PRIME_ZERO - PI * sd / (6.0 * a) - 4.0 * total
    } else {
        -q.ln() - 2.0 * PI * (q * q.ln() - q) / sd + 2.0 * (-(-2.0 * PI * (q / a).sqrt()).exp()).ln_1p()
            - 4.0 * total
    };
    Ok(LogDet {
        ln_det,
        err_estimate: err + 16.0 * f64::EPSILON * ln_det.abs().max(1.0),
    })
}

/// Teichmüller parameters τ = τ₁ + iτ₂ of a flat 2-torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusModuli2D {
    pub tau1: f64,
    pub tau2: f64,
}

impl TorusModuli2D {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if !(tau2 > 0.0) || !tau1.is_finite() || !tau2.is_finite() {
            return Err(ZetaError::domain("tau2 must be positive and both moduli finite"));
        }
        Ok(TorusModuli2D { tau1, tau2 })
    }
}

/// det = τ₂/(4π²|τ|²) exp[−4ζ′(0) − πτ₂/(3|τ|²)
///         − 4 Σ σ₁(n)/n cos(2πnτ₁/|τ|²) e^{−πnτ₂/|τ|²}].
pub fn det_torus_teichmuller(moduli: &TorusModuli2D) -> Result<LogDet> {
    let TorusModuli2D { tau1, tau2 } = TorusModuli2D::new(moduli.tau1, moduli.tau2)?;
    let t2 = tau1 * tau1 + tau2 * tau2;
    let rate = PI * tau2 / t2;
    let mut total = 0.0;
    let mut n = 1u64;
    let err;
    loop {
        let nf = n as f64;
        let sigma: f64 = divisors(n).iter().map(|&d| d as f64).sum();
        let bound = sigma / nf * (-rate * nf).exp();
        total += bound * (2.0 * PI * nf * tau1 / t2).cos();
        // σ₁(n)/n ≤ 1 + ln n bounds the remaining terms
        let next = 1.0 + (nf + 1.0).ln();
        let tail = 4.0 * next * (-rate * (nf + 1.0)).exp() / (1.0 - (-rate).exp());
        if tail <= 1e-17 * (total.abs() + 1.0) || n > 10_000_000 {
            err = tail;
            break;
        }
        n += 1;
    }
    let ln_det = (tau2 / (4.0 * PI * PI * t2)).ln() - 4.0 * RIEMANN_ZETA_PRIME_ZERO - PI * tau2 / (3.0 * t2) - 4.0 * total;
    Ok(LogDet {
        ln_det,
        err_estimate: err + 16.0 * f64::EPSILON * ln_det.abs().max(1.0),
    })
}
