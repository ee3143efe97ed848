//! Homogeneous Epstein zeta Z(s; A) = Σ'_{n ∈ Z^p} (½ nᵀAn)^{−s} by the
//! dimension recursion p → p − 1.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{contour_mean, near_half_ladder, real_pow, sum_half_shells};
use crate::epstein::residue_at_half_dim;
use crate::error::{Result, ZetaError};
use crate::lattice::{symmetrize, QuadraticFormSpec};
use crate::specfun::bessel::bessel_k_scaled;
use crate::specfun::gamma::{complex_gamma, rgamma};
use crate::specfun::zeta::riemann_zeta;
use crate::types::{AccuracyTarget, ZetaValue};

/// Splitting of Q(n) = a n₁² + n₁ (bᵀn₂) + n₂ᵀ A_red n₂ along the first axis.
///
/// All matrices are coefficient matrices (Q(n) = nᵀMn), so for a form with
/// matrix A one has a = A₁₁/2, b_j = A_{1j}, A_red = A'/2 and
/// Δ = A_red − b bᵀ/(4a).
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceDecomposition {
    pub a: f64,
    pub b: Vec<f64>,
    pub a_reduced: DMatrix<f64>,
    pub delta_reduced: DMatrix<f64>,
}

impl RecurrenceDecomposition {
    /// Splits off the first coordinate of `form` as given.
    pub fn new(form: &QuadraticFormSpec) -> Result<Self> {
        let p = form.dim();
        if p < 2 {
            return Err(ZetaError::domain("recursion needs dimension >= 2"));
        }
        let m = form.matrix();
        let a = 0.5 * m[(0, 0)];
        let b: Vec<f64> = (1..p).map(|j| m[(0, j)]).collect();
        let a_reduced = DMatrix::from_fn(p - 1, p - 1, |i, j| 0.5 * m[(i + 1, j + 1)]);
        let mut delta_reduced = DMatrix::from_fn(p - 1, p - 1, |i, j| a_reduced[(i, j)] - b[i] * b[j] / (4.0 * a));
        symmetrize(&mut delta_reduced);
        Ok(RecurrenceDecomposition {
            a,
            b,
            a_reduced,
            delta_reduced,
        })
    }

    /// The reduced form in the ½ nᵀMn convention, matrix 2Δ.
    pub fn reduced_form(&self) -> Result<QuadraticFormSpec> {
        QuadraticFormSpec::from_matrix(&self.delta_reduced * 2.0)
    }
}

/// Permutation moving the smallest diagonal entry to position 0.
///
/// The Bessel terms decay like exp(−2π n₁ √(n₂ᵀΔn₂ / a)), so a small a
/// converges fastest.
fn pivot(form: &QuadraticFormSpec) -> Vec<usize> {
    let p = form.dim();
    let m = form.matrix();
    let first = (0..p)
        .min_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]))
        .unwrap_or(0);
    std::iter::once(first).chain((0..p).filter(|&i| i != first)).collect()
}

/// Z(s; A) = Σ'_{n ∈ Z^p} (½ nᵀAn)^{−s} on the whole plane, from
///
/// Z(s; A) = 2a^{−s} ζ(2s) + √(π/a) Γ(s−½)/Γ(s) Z(s−½; Δ)
///   + 4π^s / (a^{s/2+¼} Γ(s)) Σ'_{n₂} Σ_{n₁≥1} cos(πn₁ bᵀn₂/a)
///     n₁^{s−½} (n₂ᵀΔn₂)^{¼−s/2} K_{s−½}(2πn₁ √(n₂ᵀΔn₂/a)).
///
/// The only pole is s = p/2. Individual terms are singular at
/// s ∈ {½, −½, −3/2, …} for p ≥ 2, where they cancel; near those points the
/// value is taken from a Cauchy integral over a small circle.
pub fn epstein_massless_recursive(form: &QuadraticFormSpec, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    acc.validate()?;
    let p = form.dim();
    let half = Complex64::new(p as f64 / 2.0, 0.0);
    let residue = Complex64::new(residue_at_half_dim(form), 0.0);
    if s == half {
        return Err(ZetaError::Pole {
            location: s,
            residue,
        });
    }
    let value = match near_half_ladder(s) {
        Some(center) if p >= 2 => contour_mean(s, center, acc.exec, |z| massless_core(form, z, acc))?,
        _ => massless_core(form, s, acc)?,
    };
    Ok(value.flag_pole(s, half, residue))
}

fn massless_core(form: &QuadraticFormSpec, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    let p = form.dim();
    if p == 1 {
        let a = 0.5 * form.matrix()[(0, 0)];
        let z = riemann_zeta(2.0 * s)?;
        let pref = 2.0 * real_pow(a, -s);
        let value = pref * z.value;
        return Ok(ZetaValue::new(value, pref.norm() * z.err_estimate + 4.0 * f64::EPSILON * value.norm()));
    }
    let pivoted = form.permuted(&pivot(form))?;
    let dec = RecurrenceDecomposition::new(&pivoted)?;
    let a = dec.a;
    let reduced = dec.reduced_form()?;

    let z1 = riemann_zeta(2.0 * s)?;
    let pref1 = 2.0 * real_pow(a, -s);
    let t1 = pref1 * z1.value;
    let mut err = pref1.norm() * z1.err_estimate + 4.0 * f64::EPSILON * t1.norm();

    let rg = rgamma(s);
    let zero = Complex64::new(0.0, 0.0);
    let mut t2 = zero;
    let mut t3 = zero;
    if rg != zero {
        let lower = epstein_massless_recursive(&reduced, s - 0.5, acc)?;
        let g = complex_gamma(s - 0.5)? * rg * (PI / a).sqrt();
        t2 = g * lower.value;
        err += g.norm() * lower.err_estimate + 8.0 * f64::EPSILON * t2.norm();

        let (series, series_err) = bessel_double_series(&dec, &reduced, s, acc)?;
        let coef = 4.0 * real_pow(PI, s) * real_pow(a, -(s / 2.0 + 0.25)) * rg;
        t3 = coef * series;
        err += coef.norm() * series_err;
    }
    let value = t1 + t2 + t3;
    Ok(ZetaValue::new(value, err + 4.0 * f64::EPSILON * value.norm()))
}

/// Σ'_{n₂} Σ_{n₁≥1} of the recursion, computed as twice the half-lattice sum.
fn bessel_double_series(
    dec: &RecurrenceDecomposition,
    reduced: &QuadraticFormSpec,
    s: Complex64,
    acc: &AccuracyTarget,
) -> Result<(Complex64, f64)> {
    let q = dec.p_minus_one();
    let a = dec.a;
    let nu = s - 0.5;
    let expo = Complex64::new(0.25, 0.0) - s / 2.0;
    let threshold = 2.0 * nu.norm() + 4.0;
    let lam_min = 0.5 * reduced.eig_min();
    let delta = &dec.delta_reduced;
    let b = &dec.b;
    let term = |n2: &[i64]| -> Result<(Complex64, f64)> {
        let mut d = 0.0;
        for i in 0..q {
            let mut row = 0.0;
            for j in 0..q {
                row += delta[(i, j)] * n2[j] as f64;
            }
            d += n2[i] as f64 * row;
        }
        let bn: f64 = b.iter().zip(n2).map(|(bi, &ni)| bi * ni as f64).sum();
        let x1 = 2.0 * PI * (d / a).sqrt();
        let base = expo * d.ln();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut first = 0.0f64;
        let mut k = 1u64;
        loop {
            let kf = k as f64;
            let x = kf * x1;
            let bk = bessel_k_scaled(nu, x)?;
            let w = (base + nu * kf.ln() - x).exp() * (PI * kf * bn / a).cos();
            let t = w * bk.scaled;
            sum += t;
            err += w.norm() * bk.scaled_err;
            if k == 1 {
                first = t.norm().max(w.norm() * bk.scaled.norm());
            }
            let decayed = x - x1 > 40.0 + nu.re.abs() * kf.ln();
            if (decayed && x > threshold) || (t.norm() <= 1e-18 * first && x > threshold) || first == 0.0 {
                break;
            }
            k += 1;
        }
        Ok((2.0 * sum, 2.0 * err))
    };
    let rate = 2.0 * PI * (lam_min / a).sqrt();
    let (sum, err, _) = sum_half_shells(q, acc, rate, threshold, term)?;
    Ok((sum, err))
}

impl RecurrenceDecomposition {
    fn p_minus_one(&self) -> usize {
        self.b.len()
    }
}
