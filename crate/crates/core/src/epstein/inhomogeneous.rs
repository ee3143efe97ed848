//! Massive Epstein zeta ζ_{A,c,q}(s), q > 0, via Poisson resummation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{real_pow, sum_half_shells};
use crate::error::{Result, ZetaError};
use crate::lattice::{EpsteinParams, QuadraticFormSpec};
use crate::specfun::bessel::bessel_k_scaled;
use crate::specfun::gamma::{complex_gamma, gamma_ratio, gamma_real, nonpositive_integer, rgamma};
use crate::types::{AccuracyTarget, ZetaValue};

/// Residue at s = p/2, (2π)^{p/2} / (√det A Γ(p/2)).
pub fn residue_at_half_dim(form: &QuadraticFormSpec) -> f64 {
    let p = form.dim() as f64;
    (2.0 * PI).powf(p / 2.0) / (form.det().sqrt() * gamma_real(p / 2.0).unwrap_or(f64::NAN))
}

/// Residue of (2π)^{p/2} q^{p/2−s} Γ(s−p/2) / (√det A Γ(s)) at s = p/2 − k,
/// or `None` when the point is regular (Γ(s) has a pole there too).
fn ladder_residue(p: usize, det: f64, q: f64, k: u32) -> Option<f64> {
    let loc = p as f64 / 2.0 - k as f64;
    if loc <= 0.0 && loc == loc.round() {
        return None;
    }
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let g = gamma_real(loc).ok()?;
    Some((2.0 * PI).powf(p as f64 / 2.0) * q.powi(k as i32) * sign / (fact * g * det.sqrt()))
}

/// Nearest genuine pole p/2 − k of the massive continuation.
fn nearest_ladder_pole(p: usize, det: f64, q: f64, s: Complex64) -> Option<(Complex64, f64)> {
    let k = (p as f64 / 2.0 - s.re).round();
    if k < 0.0 {
        return Some((Complex64::new(p as f64 / 2.0, 0.0), ladder_residue(p, det, q, 0)?));
    }
    let k = k as u32;
    let loc = Complex64::new(p as f64 / 2.0 - k as f64, 0.0);
    ladder_residue(p, det, q, k).map(|r| (loc, r))
}

/// Γ(s − h)/Γ(s) for h = p/2, finite away from the genuine poles.
fn dimension_gamma_ratio(s: Complex64, half_dim: f64) -> Result<Complex64> {
    if half_dim == half_dim.round() {
        return gamma_ratio(s, -half_dim);
    }
    Ok(complex_gamma(s - half_dim)? * rgamma(s))
}

/// ζ_{A,c,q}(s) = Σ_{n ∈ Z^p} [½(n+c)ᵀA(n+c) + q]^{−s}, continued to all s.
///
/// The sum includes n = 0. The representation is
///
/// (2π)^{p/2} q^{p/2−s} Γ(s−p/2) / (√det A Γ(s))
///   + 2^{s/2+p/4+2} π^s q^{p/4−s/2} / (√det A Γ(s))
///     Σ_{m ∈ Z^p_½} cos(2π m·c) (mᵀA⁻¹m)^{s/2−p/4} K_{p/2−s}(2π √(2q mᵀA⁻¹m)).
///
/// Simple poles sit at s = p/2 − k except where Γ(s) also has a pole.
pub fn epstein_inhomogeneous(params: &EpsteinParams, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    acc.validate()?;
    let q = params.q;
    if q == 0.0 {
        return Err(ZetaError::domain(
            "q = 0 is the massless case; use epstein_massless_recursive",
        ));
    }
    let p = params.dim();
    let half = p as f64 / 2.0;
    let det = params.form.det();
    let sqrt_det = det.sqrt();
    if let Some(k) = nonpositive_integer(s - half) {
        if let Some(res) = ladder_residue(p, det, q, k) {
            return Err(ZetaError::Pole {
                location: s,
                residue: Complex64::new(res, 0.0),
            });
        }
    }

    let ratio = dimension_gamma_ratio(s, half)?;
    let head = (2.0 * PI).powf(half) * real_pow(q, half - s) / sqrt_det * ratio;
    let head_err = 16.0 * f64::EPSILON * head.norm();

    let (series, series_err) = bessel_series(params, s, acc)?;

    let value = head + series;
    let err = head_err + series_err + 4.0 * f64::EPSILON * value.norm();
    let mut out = ZetaValue::new(value, err);
    if let Some((loc, res)) = nearest_ladder_pole(p, det, q, s) {
        out = out.flag_pole(s, loc, Complex64::new(res, 0.0));
    }
    Ok(out)
}


/// The lattice (topological) part of the representation above: everything but
/// the Γ(s − p/2) head term. It is regular wherever Γ(s) is finite.
pub(crate) fn bessel_series(params: &EpsteinParams, s: Complex64, acc: &AccuracyTarget) -> Result<(Complex64, f64)> {
    let q = params.q;
    let p = params.dim();
    let half = p as f64 / 2.0;
    let sqrt_det = params.form.det().sqrt();
    let rg = rgamma(s);
    if rg == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let nu = Complex64::new(half, 0.0) - s;
    let expo = s / 2.0 - p as f64 / 4.0;
    let inv = params.form.inverse_matrix();
    let c = &params.c;
    let has_offset = c.iter().any(|&v| v != 0.0);
    let lam_max = params.form.eig_max();
    let threshold = 2.0 * nu.norm() + 4.0;
    let record = |m: &[i64]| -> Result<(Complex64, f64)> {
        let mut big_m = 0.0;
        for i in 0..p {
            let mut row = 0.0;
            for j in 0..p {
                row += inv[(i, j)] * m[j] as f64;
            }
            big_m += m[i] as f64 * row;
        }
        let x = 2.0 * PI * (2.0 * q * big_m).sqrt();
        let k = bessel_k_scaled(nu, x)?;
        let phase = if has_offset {
            let dot: f64 = m.iter().zip(c).map(|(&mi, &ci)| mi as f64 * ci).sum();
            (2.0 * PI * dot).cos()
        } else {
            1.0
        };
        let w = (expo * big_m.ln() - x).exp() * phase;
        Ok((w * k.scaled, w.norm() * k.scaled_err))
    };
    let rate = 2.0 * PI * (2.0 * q / lam_max).sqrt();
    let (sum, err, _) = sum_half_shells(p, acc, rate, threshold, record)?;
    let coef = real_pow(2.0, s / 2.0 + p as f64 / 4.0 + 2.0)
        * real_pow(PI, s)
        * real_pow(q, p as f64 / 4.0 - s / 2.0)
        * rg
        / sqrt_det;
    Ok((coef * sum, coef.norm() * err))
}

/// 2 Σ_{n≥1} (a n² + q)^{−s}, continued to all s.
///
/// −q^{−s} + √(π/a) Γ(s−½)/Γ(s) q^{½−s}
///   + 4π^s/Γ(s) a^{−¼−s/2} q^{¼−s/2} Σ_{n≥1} n^{s−½} K_{s−½}(2πn√(q/a)).
///
/// The first term carries a minus sign: the remaining two terms add up to the
/// full sum over n ∈ Z, which contains the n = 0 term q^{−s}.
pub fn eval_1d_inhomogeneous(a: f64, q: f64, s: Complex64) -> Result<ZetaValue> {
    eval_1d_inhomogeneous_with(a, q, s, &AccuracyTarget::default())
}

pub(crate) fn eval_1d_inhomogeneous_with(a: f64, q: f64, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(ZetaError::domain(format!("a must be > 0, got {a}")));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(ZetaError::domain(format!("q must be > 0, got {q}")));
    }
    let form = QuadraticFormSpec::scalar(2.0 * a)?;
    let params = EpsteinParams::centered(form, q)?;
    let full = epstein_inhomogeneous(&params, s, acc)?;
    let origin = real_pow(q, -s);
    Ok(ZetaValue {
        value: full.value - origin,
        err_estimate: full.err_estimate + 4.0 * f64::EPSILON * origin.norm(),
        nearest_pole: full.nearest_pole,
    })
}
