//! Modified Bessel function of the second kind, K_ν(x), for complex order ν
//! and real x > 0, from K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt.
//!
//! The integrand is entire and decays double-exponentially, so the trapezoid
//! rule on [0, T] converges geometrically in the node density. Step halving
//! is repeated until two successive levels agree; since halving squares the
//! relative error, the error of the final level is estimated as δ²/|K| from
//! the last difference δ, plus a rounding allowance.
//!
//! For large x the Hankel expansion is tried first; it is only accepted once
//! its terms have dropped below the working precision.

use num_complex::Complex64;

use crate::error::{Result, ZetaError};

/// Documented envelope for |Re ν|.
pub const MAX_ORDER_RE: f64 = 200.0;

/// Log-magnitude drop of the integrand beyond the truncation point.
const TAIL_DROP: f64 = 44.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK {
    /// e^{x} K_ν(x)
    pub scaled: Complex64,
    /// error estimate of `scaled`
    pub scaled_err: f64,
    pub x: f64,
    /// set when e^{−x}·scaled underflows, or cancellation from the
    /// oscillating factor cos(Im ν t) destroys all significant digits
    pub underflow: bool,
}

impl BesselK {
    pub fn value(&self) -> Complex64 {
        self.scaled * (-self.x).exp()
    }

    pub fn err(&self) -> f64 {
        self.scaled_err * (-self.x).exp()
    }
}

/// Normalizes ν so that evaluations for ν and −ν are bit-identical.
fn canonical_order(nu: Complex64) -> Complex64 {
    if nu.re < 0.0 || (nu.re == 0.0 && nu.im < 0.0) {
        -nu
    } else {
        nu
    }
}

/// log of |scaled integrand| envelope: −x(cosh t − 1) + σ t
fn log_envelope(x: f64, sigma: f64, t: f64) -> f64 {
    -2.0 * x * (0.5 * t).sinh().powi(2) + sigma * t
}

/// Truncation point T beyond which the integrand lies TAIL_DROP below its peak.
pub(crate) fn truncation_point(x: f64, sigma: f64) -> f64 {
    let t_peak = (sigma / x).asinh();
    let target = log_envelope(x, sigma, t_peak) - TAIL_DROP;
    let mut lo = t_peak;
    let mut hi = t_peak + 1.0;
    while log_envelope(x, sigma, hi) > target {
        hi = t_peak + 2.0 * (hi - t_peak);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if log_envelope(x, sigma, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[inline]
fn integrand(nu: Complex64, x: f64, t: f64) -> Complex64 {
    let base = -2.0 * x * (0.5 * t).sinh().powi(2);
    0.5 * ((base + nu * t).exp() + (base - nu * t).exp())
}

/// Smallest x at which the Hankel expansion is attempted.
const HANKEL_MIN_X: f64 = 12.0;

/// e^{x} K_ν(x) = √(π/2x) Σ_k a_k(ν)/x^k with
/// a_k = a_{k−1}(4ν² − (2k−1)²)/(8k). `None` when the terms turn around
/// before reaching the working precision.
fn hankel_scaled(nu: Complex64, x: f64) -> Option<(Complex64, f64)> {
    let mu = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        let size = term.norm();
        if size > last {
            return None;
        }
        sum += term;
        if size <= 1e-17 * sum.norm() {
            let pref = (std::f64::consts::PI / (2.0 * x)).sqrt();
            return Some((pref * sum, pref * (2.0 * size + 4.0 * f64::EPSILON * sum.norm())));
        }
        last = size;
    }
    None
}

/// e^{x} K_ν(x) with error estimate.
pub fn bessel_k_scaled(nu: Complex64, x: f64) -> Result<BesselK> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(ZetaError::domain(format!("bessel_k requires x > 0, got {x}")));
    }
    if nu.re.abs() > MAX_ORDER_RE {
        return Err(ZetaError::domain(format!(
            "|Re nu| = {} exceeds the supported envelope {MAX_ORDER_RE}",
            nu.re.abs()
        )));
    }
    let nu = canonical_order(nu);
    if x >= HANKEL_MIN_X {
        if let Some((scaled, scaled_err)) = hankel_scaled(nu, x) {
            return Ok(BesselK {
                scaled,
                scaled_err,
                x,
                underflow: scaled.norm().ln() - x < -700.0,
            });
        }
    }
    let sigma = nu.re;
    let tau = nu.im.abs();
    let t_max = truncation_point(x, sigma);
    // Initial step resolves both the peak width ~1/√x and the oscillation.
    let width = (1.0 / x.sqrt()).min(1.0);
    let mut n = ((t_max / width) * 2.0).ceil().max(8.0) as usize;
    if tau > 0.0 {
        n = n.max((t_max * tau / 2.0).ceil() as usize * 2);
    }
    let mut h = t_max / n as f64;
    let mut sum = 0.5 * integrand(nu, x, 0.0);
    let mut abs_sum = sum.norm();
    for k in 1..=n {
        let v = integrand(nu, x, k as f64 * h);
        abs_sum += v.norm();
        sum += v;
    }
    let mut estimate = sum * h;
    let mut delta = f64::INFINITY;
    for _level in 0..14 {
        let mut mid = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let v = integrand(nu, x, (k as f64 + 0.5) * h);
            abs_sum += v.norm();
            mid += v;
        }
        sum += mid;
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        delta = (refined - estimate).norm();
        estimate = refined;
        let scale = estimate.norm().max(f64::MIN_POSITIVE);
        if delta <= 1e-13 * scale || delta <= 1e-15 * abs_sum * h {
            break;
        }
    }
    // Halving the step squares the relative trapezoid error.
    let scale = estimate.norm().max(f64::MIN_POSITIVE);
    let roundoff = 4.0 * f64::EPSILON * abs_sum * h;
    let err = delta * (delta / scale).min(1.0) + roundoff;
    let value_underflows = (estimate.norm().ln() - x) < -700.0;
    Ok(BesselK {
        scaled: estimate,
        scaled_err: err,
        x,
        underflow: value_underflows || err >= estimate.norm(),
    })
}

/// K_ν(x).
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    bessel_k_scaled(nu, x).map(|k| k.value())
}

/// Upper bound |K_ν(x)| ≤ K_{|Re ν|}(x), valid for x > 0.
pub fn bessel_k_envelope(nu_re_abs: f64, x: f64) -> f64 {
    // K_σ(x) ≤ √(π/(2x)) e^{−x} (1 + ...) is not uniform in σ; use
    // K_σ(x) ≤ K_{1/2}(x)·max(1, (2σ/x)^σ Γ-like growth) via the integral.
    match bessel_k_scaled(Complex64::new(nu_re_abs, 0.0), x) {
        Ok(k) => k.value().re.abs(),
        Err(_) => f64::INFINITY,
    }
}
