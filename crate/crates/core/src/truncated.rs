//! Half-line zeta Σ_{n≥0} [a(n+c)² + q]^{−s} continued by an asymptotic
//! representation.
//!
//! ζ_t(s) ~ (½ − c) q^{−s}
//!        + q^{−s}/Γ(s) Σ_{m≥1} (−1)^m Γ(m+s)/m! (q/a)^{−m} ζ_H(−2m, c)
//!        + √(π/a) Γ(s−½)/(2Γ(s)) q^{½−s}
//!        + 2π^s/Γ(s) a^{−¼−s/2} q^{¼−s/2} Σ_{n≥1} n^{s−½} cos(2πnc) K_{s−½}(2πn√(q/a)).
//!
//! The ζ_H series is divergent; it is cut at its smallest term. Its terms
//! reach a minimum of order e^{−2π√(q/a)}, which is the attainable accuracy.
//! For c ∈ {½, 1} every ζ_H(−2m, c) vanishes and the representation is exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::epstein::{epstein_inhomogeneous, real_pow, sum_half_shells};
use crate::error::{Result, ZetaError};
use crate::lattice::{EpsteinParams, QuadraticFormSpec};
use crate::specfun::bessel::bessel_k_scaled;
use crate::specfun::gamma::{complex_gamma, gamma_real, nonpositive_integer, rgamma};
use crate::specfun::zeta::bernoulli_polynomial;
use crate::types::{AccuracyTarget, ComplexValue, PoleInfo, ZetaValue, POLE_FLAG_RADIUS};

/// Largest asymptotic order considered; B_{2m+1} is tabulated well beyond.
const MAX_ORDER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedParams {
    pub a: f64,
    /// offset in (0, 1]
    pub c: f64,
    pub q: f64,
}

impl TruncatedParams {
    pub fn new(a: f64, c: f64, q: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(ZetaError::domain(format!("a must be > 0, got {a}")));
        }
        if !(c > 0.0 && c <= 1.0) {
            return Err(ZetaError::domain(format!("c must lie in (0, 1], got {c}")));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(ZetaError::domain(format!("q must be > 0, got {q}")));
        }
        Ok(TruncatedParams { a, c, q })
    }

    fn term(&self, x: f64, s: Complex64) -> Complex64 {
        real_pow(self.a * x * x + self.q, -s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticResult {
    pub value: ComplexValue,
    /// number of ζ_H terms summed (m = 1..=terms_used)
    pub terms_used: usize,
    /// magnitude of the first omitted ζ_H term
    pub smallest_term: f64,
    pub err_estimate: f64,
    /// set when the smallest term exceeds the requested tolerance
    pub floor_reached: bool,
    pub nearest_pole: Option<PoleInfo>,
}

/// ζ_H(−2m, c) = −B_{2m+1}(c)/(2m+1).
fn hurwitz_negative_even(m: usize, c: f64) -> f64 {
    -bernoulli_polynomial(2 * m + 1, c) / (2 * m + 1) as f64
}

/// Bound on |B_{2m+1}(c)|/(2m+1) for c ∈ [0, 1]: 2(2m)!ζ(2m+1)/(2π)^{2m+1}.
fn bernoulli_envelope(m: usize) -> f64 {
    let mut v = 2.0 / (2.0 * PI);
    for k in 1..=2 * m {
        v *= k as f64 / (2.0 * PI);
    }
    let zeta_bound = 1.0 + 2f64.powi(-(2 * m as i32 + 1)) * 2.0;
    v * zeta_bound
}

fn residue_value(p: &TruncatedParams, j: u32) -> f64 {
    // √(π/a) (−1)^j q^j / (2 j! Γ(½ − j)) = (2j−1)!! q^j / (j! 2^{j+1} √a)
    let fact: f64 = (1..=j).map(|k| k as f64).product();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let g = gamma_real(0.5 - j as f64).unwrap_or(f64::NAN);
    (PI / p.a).sqrt() * sign * p.q.powi(j as i32) / (2.0 * fact * g)
}

/// Continuation of Σ_{n≥0} [a(n+c)² + q]^{−s}; poles at s = ½ − j.
pub fn truncated_zeta(params: &TruncatedParams, s: Complex64) -> Result<AsymptoticResult> {
    truncated_zeta_with(params, s, &AccuracyTarget::default())
}

pub fn truncated_zeta_with(params: &TruncatedParams, s: Complex64, acc: &AccuracyTarget) -> Result<AsymptoticResult> {
    acc.validate()?;
    let TruncatedParams { a, c, q } = *params;
    if let Some(j) = nonpositive_integer(s - 0.5) {
        return Err(ZetaError::Pole {
            location: s,
            residue: Complex64::new(residue_value(params, j), 0.0),
        });
    }
    let rg = rgamma(s);
    let q_s = real_pow(q, -s);

    let head = (0.5 - c) * q_s;

    // q^{−s}/Γ(s) Γ(m+s) = q^{−s} (s)_m: the Pochhammer symbol is entire
    let ratio = a / q;
    let mut asym = Complex64::new(0.0, 0.0);
    let mut terms_used = 0;
    let mut smallest = 0.0;
    let mut envelope_at_cut = 0.0;
    let mut best = f64::INFINITY;
    let mut poch = Complex64::new(1.0, 0.0);
    let mut pending = Vec::with_capacity(MAX_ORDER);
    // B_{2m+1}(½) = B_{2m+1}(1) = 0: no asymptotic part at all
    let orders = if c == 0.5 || c == 1.0 { 0 } else { MAX_ORDER };
    for m in 1..=orders {
        poch *= s + (m - 1) as f64;
        let scale = poch * q_s * (-ratio).powi(m as i32) / factorial(m);
        let envelope = scale.norm() * bernoulli_envelope(m);
        if envelope >= best {
            break;
        }
        best = envelope;
        pending.push((scale * hurwitz_negative_even(m, c), envelope));
    }
    // the last retained entry is the smallest; it is omitted and bounds the error
    if let Some((last, env)) = pending.pop() {
        smallest = last.norm();
        envelope_at_cut = env;
    }
    for (t, _) in &pending {
        asym += *t;
        terms_used += 1;
    }
    // Late terms grow like Γ(2m+s)/F^{2m}, F = 2π√(q/a). Near a Stokes line the
    // optimally truncated remainder of such a series is about √(πF/2) times the
    // first omitted term.
    let terminant = (PI * PI * (q / a).sqrt()).sqrt().max(1.0);
    let asym_err = envelope_at_cut.max(smallest) * terminant;

    let zero = Complex64::new(0.0, 0.0);
    let (gamma_term, bessel, bessel_err) = if rg == zero {
        (zero, zero, 0.0)
    } else {
        let g = (PI / a).sqrt() * complex_gamma(s - 0.5)? * rg / 2.0 * real_pow(q, Complex64::new(0.5, 0.0) - s);
        let nu = s - 0.5;
        let x1 = 2.0 * PI * (q / a).sqrt();
        let threshold = 2.0 * nu.norm() + 4.0;
        let (sum, err, _) = sum_half_shells(1, acc, x1, threshold, |m| {
            let nf = m[0] as f64;
            let k = bessel_k_scaled(nu, nf * x1)?;
            let w = (nu * nf.ln() - nf * x1).exp() * (2.0 * PI * nf * c).cos();
            Ok((w * k.scaled, w.norm() * k.scaled_err))
        })?;
        let coef = 2.0 * real_pow(PI, s) * rg * real_pow(a, -(s / 2.0 + 0.25)) * real_pow(q, Complex64::new(0.25, 0.0) - s / 2.0);
        (g, coef * sum, coef.norm() * err)
    };

    let value = head + asym + gamma_term + bessel;
    let rounding = 8.0 * f64::EPSILON * (head.norm() + asym.norm() + gamma_term.norm() + bessel.norm());
    let err_estimate = asym_err + bessel_err + rounding;
    let floor_reached = asym_err > acc.rel_tol * value.norm().max(acc.abs_floor);

    let nearest_pole = {
        let j = (0.5 - s.re).round().max(0.0) as u32;
        let loc = Complex64::new(0.5 - j as f64, 0.0);
        let d = (s - loc).norm();
        (d < POLE_FLAG_RADIUS).then(|| PoleInfo {
            location: loc,
            residue: Complex64::new(residue_value(params, j), 0.0),
            distance: d,
        })
    };
    Ok(AsymptoticResult {
        value,
        terms_used,
        smallest_term: smallest,
        err_estimate,
        floor_reached,
        nearest_pole,
    })
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Half-line zeta for an arbitrary real offset, reduced to c ∈ (0, 1] by
/// Σ_{n≥0} f(n+c) = Σ_{n≥0} f(n+c−1) − f(c−1) and its inverse.
pub fn truncated_zeta_any_offset(a: f64, c: f64, q: f64, s: Complex64) -> Result<AsymptoticResult> {
    if !c.is_finite() {
        return Err(ZetaError::domain("offset must be finite"));
    }
    let shifts = (c - 1.0).ceil() as i64;
    let reduced = c - shifts as f64;
    let params = TruncatedParams::new(a, reduced, q)?;
    let mut r = truncated_zeta(&params, s)?;
    let mut correction = Complex64::new(0.0, 0.0);
    if shifts > 0 {
        // c = reduced + k: drop f(reduced), …, f(reduced + k − 1)
        for i in 0..shifts {
            correction -= params.term(reduced + i as f64, s);
        }
    } else {
        // c = reduced − k: add f(c), …, f(reduced − 1)
        for i in 1..=(-shifts) {
            correction += params.term(reduced - i as f64, s);
        }
    }
    r.value += correction;
    r.err_estimate += 4.0 * f64::EPSILON * correction.norm();
    Ok(r)
}

/// Residue at s = ½ − j: (closed formula (2j−1)!! q^j/(j! 2^j √a), numerically
/// extracted limit of (s − ½ + j)·ζ_t(s)).
pub fn truncated_residue(params: &TruncatedParams, j: u32) -> Result<(f64, f64)> {
    if j > 6 {
        return Err(ZetaError::domain("residue order j must be <= 6"));
    }
    let double_fact: f64 = (1..=j).map(|k| (2 * k - 1) as f64).product();
    let fact = factorial(j as usize);
    let closed = double_fact * params.q.powi(j as i32) / (fact * 2f64.powi(j as i32) * params.a.sqrt());
    Ok((closed, extract_residue(params, j, 1e-3)?))
}

/// Richardson-extrapolated lim ε·ζ_t(½ − j + ε) from symmetric steps h, h/2.
pub fn extract_residue(params: &TruncatedParams, j: u32, h: f64) -> Result<f64> {
    let pole = 0.5 - j as f64;
    let sym = |e: f64| -> Result<f64> {
        let up = truncated_zeta(params, Complex64::new(pole + e, 0.0))?.value.re * e;
        let down = truncated_zeta(params, Complex64::new(pole - e, 0.0))?.value.re * -e;
        Ok(0.5 * (up + down))
    };
    let coarse = sym(h)?;
    let fine = sym(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Both sides of Σ_{n∈Z} f(n+c) = ζ_t(a, c, q) + ζ_t(a, 1−c, q); the left
/// side from the full-line Poisson series.
pub fn full_line_split_check(a: f64, c: f64, q: f64, s: Complex64) -> Result<(ZetaValue, ZetaValue)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(ZetaError::domain(format!("c must lie in (0, 1), got {c}")));
    }
    let form = QuadraticFormSpec::scalar(2.0 * a)?;
    let params = EpsteinParams::new(form, vec![c], q)?;
    let lhs = epstein_inhomogeneous(&params, s, &AccuracyTarget::default())?;
    let left = truncated_zeta(&TruncatedParams::new(a, c, q)?, s)?;
    let right = truncated_zeta(&TruncatedParams::new(a, 1.0 - c, q)?, s)?;
    let rhs = ZetaValue::new(left.value + right.value, left.err_estimate + right.err_estimate);
    Ok((lhs, rhs))
}

/// Direct Σ_{n≥0} [a(n+c)² + q]^{−s} for Re s > ½, with an integral tail bound.
pub fn truncated_direct_sum(params: &TruncatedParams, s: Complex64, terms: u64) -> Result<ZetaValue> {
    if s.re <= 0.5 {
        return Err(ZetaError::NonConvergence {
            terms: 0,
            estimate: f64::INFINITY,
        });
    }
    let mut acc = crate::sum::CompensatedSum::new();
    for n in (0..terms).rev() {
        acc.add(params.term(n as f64 + params.c, s));
    }
    // Σ_{n≥N} |f| ≤ ∫_{N−1}^∞ (a x²)^{−σ} dx
    let x0 = terms as f64 + params.c - 1.0;
    let sigma = s.re;
    let tail = params.a.powf(-sigma) * x0.powf(1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
    Ok(ZetaValue::new(acc.value(), tail + 4.0 * f64::EPSILON * acc.abs_sum()))
}

/// Exact ratio between the closed residue formula and the residue of the
/// implemented representation: 2 for every j.
pub fn residue_factor_ratio(params: &TruncatedParams, j: u32) -> f64 {
    let double_fact: f64 = (1..=j).map(|k| (2 * k - 1) as f64).product();
    let closed = double_fact * params.q.powi(j as i32) / (factorial(j as usize) * 2f64.powi(j as i32) * params.a.sqrt());
    closed / residue_value(params, j)
}
