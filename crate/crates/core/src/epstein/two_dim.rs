//! Two-dimensional fast paths for ζ_E(s; a, b, c; q) = Σ'_{n ∈ Z²}
//! (a n₁² + b n₁n₂ + c n₂² + q)^{−s}.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{contour_mean, near_half_ladder, real_pow, sum_half_shells};
use crate::error::{Result, ZetaError};
use crate::specfun::bessel::bessel_k_scaled;
use crate::specfun::divisor::{divisor_sigma, divisors};
use crate::specfun::gamma::{complex_gamma, rgamma};
use crate::specfun::zeta::riemann_zeta;
use crate::types::{AccuracyTarget, ZetaValue};

fn discriminant(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0) || !(c > 0.0) || !b.is_finite() || !a.is_finite() || !c.is_finite() {
        return Err(ZetaError::domain("need finite a > 0, c > 0"));
    }
    let delta = 4.0 * a * c - b * b;
    if !(delta > 0.0) {
        return Err(ZetaError::domain(format!("4ac − b² must be > 0, got {delta}")));
    }
    Ok(delta)
}

/// Σ_{n≥1} term(n) for terms decaying like e^{−rate·n}.
fn sum_1d<T>(acc: &AccuracyTarget, nu: Complex64, rate: f64, term: T) -> Result<(Complex64, f64)>
where
    T: Fn(u64) -> Result<(Complex64, f64)> + Sync + Send,
{
    let threshold = 2.0 * nu.norm() + 4.0;
    let (sum, err, _) = sum_half_shells(1, acc, rate, threshold, |m| term(m[0] as u64))?;
    Ok((sum, err))
}

/// Homogeneous Chowla–Selberg series, valid on the whole plane:
///
/// 2ζ(2s)a^{−s} + 2^{2s}√π a^{s−1} Γ(s−½) ζ(2s−1) / (Γ(s) Δ^{s−½})
///   + 2^{s+5/2} π^s / (Γ(s) Δ^{s/2−¼} √a)
///     Σ_{n≥1} n^{s−½} σ_{1−2s}(n) cos(πnb/a) K_{s−½}(πn√Δ/a).
///
/// Simple pole at s = 1 with residue 2π/√Δ.
pub fn chowla_selberg_2d(a: f64, b: f64, c: f64, s: Complex64) -> Result<ZetaValue> {
    chowla_selberg_2d_with(a, b, c, s, &AccuracyTarget::default())
}

pub fn chowla_selberg_2d_with(a: f64, b: f64, c: f64, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    acc.validate()?;
    let delta = discriminant(a, b, c)?;
    let one = Complex64::new(1.0, 0.0);
    let residue = Complex64::new(2.0 * PI / delta.sqrt(), 0.0);
    if s == one {
        return Err(ZetaError::Pole {
            location: s,
            residue,
        });
    }
    let core = |z: Complex64| cs_core(a, b, delta, z, acc);
    let value = match near_half_ladder(s) {
        Some(center) => contour_mean(s, center, acc.exec, core)?,
        None => core(s)?,
    };
    Ok(value.flag_pole(s, one, residue))
}

fn cs_core(a: f64, b: f64, delta: f64, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    let z1 = riemann_zeta(2.0 * s)?;
    let p1 = 2.0 * real_pow(a, -s);
    let t1 = p1 * z1.value;
    let mut err = p1.norm() * z1.err_estimate;

    let rg = rgamma(s);
    let zero = Complex64::new(0.0, 0.0);
    if rg == zero {
        return Ok(ZetaValue::new(t1, err + 4.0 * f64::EPSILON * t1.norm()));
    }
    let z2 = riemann_zeta(2.0 * s - 1.0)?;
    let p2 = real_pow(4.0, s) * PI.sqrt() * real_pow(a, s - 1.0) * complex_gamma(s - 0.5)? * rg
        * real_pow(delta, Complex64::new(0.5, 0.0) - s);
    let t2 = p2 * z2.value;
    err += p2.norm() * z2.err_estimate;

    let nu = s - 0.5;
    let sd = delta.sqrt();
    let term = |n: u64| -> Result<(Complex64, f64)> {
        let nf = n as f64;
        let x = PI * nf * sd / a;
        let k = bessel_k_scaled(nu, x)?;
        let w = (nu * nf.ln() - x).exp() * divisor_sigma(1.0 - 2.0 * s, n) * (PI * nf * b / a).cos();
        Ok((w * k.scaled, w.norm() * k.scaled_err))
    };
    let (series, series_err) = sum_1d(acc, nu, PI * sd / a, term)?;
    let p3 = real_pow(2.0, s + 2.5) * real_pow(PI, s) * rg * real_pow(delta, Complex64::new(0.25, 0.0) - s / 2.0)
        / a.sqrt();
    let t3 = p3 * series;
    err += p3.norm() * series_err;
    let value = t1 + t2 + t3;
    Ok(ZetaValue::new(value, err + 8.0 * f64::EPSILON * (t1.norm() + t2.norm() + t3.norm())))
}

/// Massive two-dimensional series (origin excluded), valid on the whole plane:
///
/// −q^{−s} + 2πq^{1−s}/((s−1)√Δ) + 4/Γ(s) [
///     (q/a)^{¼} (π/√(qa))^s Σ n^{s−½} K_{s−½}(2πn√(q/a))
///   + √(q/a) (2π√(a/(qΔ)))^s Σ n^{s−1} K_{s−1}(4πn√(aq/Δ))
///   + √(2/a) (2π)^s Σ n^{s−½} cos(πnb/a) Σ_{d|n} d^{1−2s}
///       (Δ + 4aq/d²)^{¼−s/2} K_{s−½}((πn/a)√(Δ + 4aq/d²)) ].
pub fn epstein_2d_inhomogeneous(a: f64, b: f64, c: f64, q: f64, s: Complex64) -> Result<ZetaValue> {
    epstein_2d_inhomogeneous_with(a, b, c, q, s, &AccuracyTarget::default())
}

pub fn epstein_2d_inhomogeneous_with(
    a: f64,
    b: f64,
    c: f64,
    q: f64,
    s: Complex64,
    acc: &AccuracyTarget,
) -> Result<ZetaValue> {
    acc.validate()?;
    let delta = discriminant(a, b, c)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(ZetaError::domain(format!("q must be > 0, got {q}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let sd = delta.sqrt();
    let residue = Complex64::new(2.0 * PI / sd, 0.0);
    if s == one {
        return Err(ZetaError::Pole {
            location: s,
            residue,
        });
    }
    let origin = -real_pow(q, -s);
    let pole_term = 2.0 * PI * real_pow(q, one - s) / ((s - 1.0) * sd);
    let mut value = origin + pole_term;
    let mut err = 4.0 * f64::EPSILON * (origin.norm() + pole_term.norm());

    let rg = rgamma(s);
    if rg != Complex64::new(0.0, 0.0) {
        let half = s - 0.5;
        let whole = s - 1.0;

        let x1 = 2.0 * PI * (q / a).sqrt();
        let (s1, e1) = sum_1d(acc, half, x1, |n| {
            let nf = n as f64;
            let k = bessel_k_scaled(half, nf * x1)?;
            let w = (half * nf.ln() - nf * x1).exp();
            Ok((w * k.scaled, w.norm() * k.scaled_err))
        })?;
        let c1 = (q / a).powf(0.25) * real_pow(PI / (q * a).sqrt(), s);

        let x2 = 4.0 * PI * (a * q / delta).sqrt();
        let (s2, e2) = sum_1d(acc, whole, x2, |n| {
            let nf = n as f64;
            let k = bessel_k_scaled(whole, nf * x2)?;
            let w = (whole * nf.ln() - nf * x2).exp();
            Ok((w * k.scaled, w.norm() * k.scaled_err))
        })?;
        let c2 = (q / a).sqrt() * real_pow(2.0 * PI * (a / (q * delta)).sqrt(), s);

        let expo = Complex64::new(0.25, 0.0) - s / 2.0;
        let (s3, e3) = sum_1d(acc, half, PI * sd / a, |n| {
            let nf = n as f64;
            let phase = (PI * nf * b / a).cos();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut err = 0.0;
            for d in divisors(n) {
                let df = d as f64;
                let inner = delta + 4.0 * a * q / (df * df);
                let x = PI * nf / a * inner.sqrt();
                let k = bessel_k_scaled(half, x)?;
                let w = ((1.0 - 2.0 * s) * df.ln() + expo * inner.ln() + half * nf.ln() - x).exp() * phase;
                sum += w * k.scaled;
                err += w.norm() * k.scaled_err;
            }
            Ok((sum, err))
        })?;
        let c3 = (2.0 / a).sqrt() * real_pow(2.0 * PI, s);

        let bracket = c1 * s1 + c2 * s2 + c3 * s3;
        let scale = 4.0 * rg;
        value += scale * bracket;
        err += scale.norm() * (c1.norm() * e1 + c2.norm() * e2 + c3.norm() * e3)
            + 8.0 * f64::EPSILON * scale.norm() * ((c1 * s1).norm() + (c2 * s2).norm() + (c3 * s3).norm());
    }
    Ok(ZetaValue::new(value, err).flag_pole(s, one, residue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epstein::{epstein_inhomogeneous, epstein_massless_recursive};
    use crate::exec::Execution;
    use crate::lattice::{direct_lattice_sum, EpsteinParams, QuadraticFormSpec};
    use crate::specfun::zeta::dirichlet_beta;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_lattice() {
        let v = chowla_selberg_2d(1.0, 0.0, 1.0, c(2.0, 0.0)).unwrap();
        let exact = 4.0 * PI * PI / 6.0 * dirichlet_beta(c(2.0, 0.0)).unwrap().re;
        assert!((v.value.re - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn unimodular_invariance() {
        let s = c(1.7, -0.6);
        let v = chowla_selberg_2d(1.2, 0.5, 0.9, s).unwrap();
        // n₁ → n₁ + n₂: (a, b, c) → (a, b + 2a, a + b + c)
        let w = chowla_selberg_2d(1.2, 0.5 + 2.4, 1.2 + 0.5 + 0.9, s).unwrap();
        assert!((v.value - w.value).norm() < 1e-12 * v.value.norm());
    }

    #[test]
    fn agrees_with_recursion() {
        let (a, b, cc) = (0.8, 0.3, 1.4);
        let form = QuadraticFormSpec::binary(a, b, cc).unwrap();
        for s in [c(-1.3, 0.2), c(0.3, 2.0), c(2.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)] {
            let v = chowla_selberg_2d(a, b, cc, s).unwrap();
            let w = epstein_massless_recursive(&form, s, &AccuracyTarget::default()).unwrap();
            assert!((v.value - w.value).norm() < 1e-11 * (1.0 + v.value.norm()), "{s}: {} {}", v.value, w.value);
        }
    }

    #[test]
    fn massive_against_direct_sum_and_full_series() {
        let v = epstein_2d_inhomogeneous(1.0, 0.0, 1.0, 1.0, c(3.0, 0.0)).unwrap();
        let form = QuadraticFormSpec::binary(1.0, 0.0, 1.0).unwrap();
        let params = EpsteinParams::centered(form, 1.0).unwrap();
        let d = direct_lattice_sum(&params, c(3.0, 0.0), true, 1500, Execution::Parallel).unwrap();
        assert!((v.value - d.value).norm() < 1e-11 * d.value.norm());

        let (a, b, cc, q) = (1.3, -0.4, 0.7, 0.6);
        let form = QuadraticFormSpec::binary(a, b, cc).unwrap();
        let params = EpsteinParams::centered(form, q).unwrap();
        for s in [c(2.2, 0.4), c(-0.5, 0.0), c(0.3, -1.5)] {
            let v = epstein_2d_inhomogeneous(a, b, cc, q, s).unwrap();
            let full = epstein_inhomogeneous(&params, s, &AccuracyTarget::default()).unwrap();
            let diff = v.value + real_pow(q, -s) - full.value;
            assert!(diff.norm() < 1e-11 * (1.0 + full.value.norm()), "{s}: {diff}");
        }
    }

    #[test]
    fn shared_residue() {
        let (a, b, cc) = (1.1, 0.2, 0.9);
        let r = 2.0 * PI / (4.0f64 * a * cc - b * b).sqrt();
        for q in [0.5, 2.0] {
            let e = 1e-5;
            let v = epstein_2d_inhomogeneous(a, b, cc, q, c(1.0 + e, 0.0)).unwrap();
            let w = epstein_2d_inhomogeneous(a, b, cc, q, c(1.0 - e, 0.0)).unwrap();
            assert!(((v.value - w.value) * e / 2.0 - r).norm() < 1e-8);
        }
        let err = chowla_selberg_2d(a, b, cc, c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, ZetaError::Pole { residue, .. } if (residue.re - r).abs() < 1e-15));
    }
}
