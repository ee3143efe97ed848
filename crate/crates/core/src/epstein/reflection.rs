//! Reflection formula and the one-index Jacobi identity.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{contour_mean, epstein_massless_recursive, REMOVABLE_ZONE};
use crate::error::{Result, ZetaError};
use crate::lattice::QuadraticFormSpec;
use crate::specfun::gamma::complex_gamma;
use crate::types::{AccuracyTarget, ZetaValue};

/// Both sides of Γ(s) Z(s; M) = π^{2s−p/2} / √det M · Γ(p/2−s) Z(p/2−s; M⁻¹),
/// where Z(s; M) = Σ' (nᵀMn)^{−s} and M = A/2 for the form matrix A.
///
/// The sides are evaluated independently: the left at s with M, the right at
/// p/2 − s with M⁻¹.
pub fn epstein_reflection(form: &QuadraticFormSpec, s: Complex64) -> Result<(ZetaValue, ZetaValue)> {
    epstein_reflection_with(form, s, &AccuracyTarget::default())
}

pub fn epstein_reflection_with(
    form: &QuadraticFormSpec,
    s: Complex64,
    acc: &AccuracyTarget,
) -> Result<(ZetaValue, ZetaValue)> {
    let p = form.dim() as f64;
    let dual_s = Complex64::new(p / 2.0, 0.0) - s;
    // coefficient matrix M⁻¹ = 2A⁻¹, i.e. form matrix 4A⁻¹
    let dual = form.inverse()?.scaled(4.0)?;
    let det_m = form.det() / 2f64.powi(form.dim() as i32);

    let lhs = gamma_times_zeta(form, s, acc)?;
    let right = gamma_times_zeta(&dual, dual_s, acc)?;
    let pref = (Complex64::new(2.0, 0.0) * s - p / 2.0).scale(PI.ln()).exp() / det_m.sqrt();
    let rhs = ZetaValue::new(pref * right.value, pref.norm() * right.err_estimate);
    Ok((lhs, rhs))
}

/// Γ(s) Z(s), which is regular at s = −1, −2, … where Z vanishes.
fn gamma_times_zeta(form: &QuadraticFormSpec, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    let eval = |z: Complex64| -> Result<ZetaValue> {
        let v = epstein_massless_recursive(form, z, acc)?;
        let g = complex_gamma(z)?;
        Ok(ZetaValue::new(g * v.value, g.norm() * v.err_estimate))
    };
    let k = s.re.round();
    let center = Complex64::new(k, 0.0);
    if k <= -1.0 && (s - center).norm() < REMOVABLE_ZONE {
        return contour_mean(s, center, acc.exec, eval);
    }
    eval(s)
}

/// Both sides of Σ_{n ∈ Z} e^{−(n+z)² t} = √(π/t) [1 + 2 Σ_{n≥1} e^{−π²n²/t} cos(2πnz)]
/// for complex z and Re t > 0, each summed until the remaining terms fall
/// below 1e-17 of the running total.
pub fn jacobi_theta_check(z: Complex64, t: Complex64) -> Result<(Complex64, Complex64)> {
    if !(t.re > 0.0) || !t.is_finite() || !z.is_finite() {
        return Err(ZetaError::domain("jacobi_theta_check requires Re t > 0 and finite z"));
    }
    let center = (-z.re).round() as i64;
    let term = |n: i64| (-(z + n as f64).powi(2) * t).exp();
    let mut lhs = term(center);
    for dir in [1i64, -1] {
        let mut k = 1i64;
        let mut small = 0;
        while small < 2 && k < 100_000_000 {
            let v = term(center + dir * k);
            lhs += v;
            if v.norm() <= 1e-17 * lhs.norm() {
                small += 1;
            } else {
                small = 0;
            }
            k += 1;
        }
    }
    let inv_t = t.inv();
    let mut series = Complex64::new(1.0, 0.0);
    let mut small = 0;
    let mut n = 1u64;
    while small < 2 && n < 100_000_000 {
        let nf = n as f64;
        let v = 2.0 * (-(PI * PI * nf * nf) * inv_t).exp() * (2.0 * PI * nf * z).cos();
        series += v;
        let decreasing = PI * PI * nf * inv_t.re > 2.0 * PI * z.im.abs();
        if v.norm() <= 1e-17 * series.norm() && decreasing {
            small += 1;
        } else {
            small = 0;
        }
        n += 1;
    }
    let rhs = (PI * inv_t).sqrt() * series;
    Ok((lhs, rhs))
}
