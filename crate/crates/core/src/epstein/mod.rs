//! Analytic continuation of inhomogeneous and homogeneous Epstein zeta
//! functions through exponentially convergent Bessel series.
//!
//! Conventions: a [`QuadraticFormSpec`](crate::lattice::QuadraticFormSpec)
//! with matrix A describes Q(n) = ½ nᵀAn; the two-dimensional fast paths take
//! coefficients (a, b, c) of a n₁² + b n₁n₂ + c n₂², i.e. A = [[2a, b], [b, 2c]]
//! and Δ = 4ac − b² = det A.

mod inhomogeneous;
mod massless;
mod reflection;
mod two_dim;

pub(crate) use inhomogeneous::bessel_series;
pub use inhomogeneous::{eval_1d_inhomogeneous, epstein_inhomogeneous, residue_at_half_dim};
pub use massless::{epstein_massless_recursive, RecurrenceDecomposition};
pub use reflection::{epstein_reflection, epstein_reflection_with, jacobi_theta_check};
pub use two_dim::{chowla_selberg_2d, chowla_selberg_2d_with, epstein_2d_inhomogeneous, epstein_2d_inhomogeneous_with};

use num_complex::Complex64;

use crate::error::{Result, ZetaError};
use crate::exec::Execution;
use crate::lattice::for_each_half_shell_vector;
use crate::sum::CompensatedSum;
use crate::types::{AccuracyTarget, ZetaValue};

/// Partial result of a term-wise series.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SeriesPart {
    pub sum: CompensatedSum,
    pub err: f64,
    pub terms: usize,
}

/// Number of consecutive quiet shells that terminates a shell series.
const QUIET_SHELLS: usize = 3;

/// Sums `term(m)` over half-lattice shells r = 1, 2, … of Z^p.
///
/// The caller promises that shell r is bounded by poly(r)·e^{−rate·r} and that
/// the polynomial is of degree below `threshold`. Once rate·r passes
/// threshold + 2(p − 1), consecutive shells shrink at least by ρ = e^{−rate/2},
/// so the unsummed tail is at most ρ/(1 − ρ) times the last shell. The series
/// stops after [`QUIET_SHELLS`] shells whose size including that tail is below
/// rel_tol·|accumulated|.
pub(crate) fn sum_half_shells<T>(
    p: usize,
    acc: &AccuracyTarget,
    rate: f64,
    threshold: f64,
    term: T,
) -> Result<(Complex64, f64, usize)>
where
    T: Fn(&[i64]) -> Result<(Complex64, f64)> + Sync + Send,
{
    let rho = (-0.5 * rate).exp();
    let tail_factor = if rho < 1.0 { rho / (1.0 - rho) } else { f64::INFINITY };
    let onset = threshold + 2.0 * (p as f64 - 1.0);
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut terms = 0usize;
    let mut quiet = 0usize;
    let mut quiet_mass = 0.0;
    let mut next_shell = 1i64;
    let mut batch = 2usize;
    loop {
        let shells: Vec<i64> = (next_shell..next_shell + batch as i64).collect();
        next_shell += batch as i64;
        let parts = acc.exec.map(&shells, |&r| shell_part(p, r, &term));
        for (r, part) in shells.iter().zip(parts) {
            let part = part?;
            terms += part.terms;
            err += part.err;
            let shell_abs = part.sum.abs_sum();
            total.merge(&part.sum);
            let scale = total.value().norm().max(acc.abs_floor);
            let decaying = rate * *r as f64 > onset;
            if decaying && shell_abs * (1.0 + tail_factor) <= acc.rel_tol * scale {
                quiet += 1;
                quiet_mass += shell_abs;
            } else {
                quiet = 0;
                quiet_mass = 0.0;
            }
            if quiet >= QUIET_SHELLS {
                let rounding = 4.0 * f64::EPSILON * total.abs_sum();
                let tail = shell_abs * tail_factor;
                return Ok((total.value(), err + quiet_mass + tail + rounding, terms));
            }
            if terms > acc.max_terms {
                return Err(ZetaError::NonConvergence {
                    terms,
                    estimate: total.value().norm(),
                });
            }
        }
        let shell_terms = crate::lattice::shell_size(p, next_shell as u64) as usize / 2;
        if batch * shell_terms.max(1) < 1 << 14 {
            batch *= 2;
        }
    }
}

fn shell_part<T>(p: usize, r: i64, term: &T) -> Result<SeriesPart>
where
    T: Fn(&[i64]) -> Result<(Complex64, f64)>,
{
    let mut part = SeriesPart::default();
    let mut failure = None;
    for_each_half_shell_vector(p, r, |m| {
        if failure.is_some() {
            return;
        }
        match term(m) {
            Ok((v, e)) => {
                part.sum.add(v);
                part.err += e;
                part.terms += 1;
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(part),
    }
}

/// x^w for real x > 0 and complex w.
#[inline]
pub(crate) fn real_pow(x: f64, w: Complex64) -> Complex64 {
    (w * x.ln()).exp()
}

/// Radius of the circle used around removable singular points.
pub(crate) const REMOVABLE_RADIUS: f64 = 0.05;
/// Points within this distance of a removable point use the contour mean.
pub(crate) const REMOVABLE_ZONE: f64 = 0.02;
const REMOVABLE_NODES: usize = 48;

/// f(s) from the Cauchy integral of f over |z − center| = REMOVABLE_RADIUS,
/// for f analytic in the disc except for a removable singularity at `center`.
pub(crate) fn contour_mean<F>(s: Complex64, center: Complex64, exec: Execution, f: F) -> Result<ZetaValue>
where
    F: Fn(Complex64) -> Result<ZetaValue> + Sync + Send,
{
    let r = REMOVABLE_RADIUS;
    let parts = exec.map_range(REMOVABLE_NODES, |k| {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / REMOVABLE_NODES as f64;
        let w = Complex64::from_polar(r, theta);
        let z = center + w;
        f(z).map(|v| (v, w / (z - s)))
    });
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    for part in parts {
        let (v, weight) = part?;
        sum.add(v.value * weight);
        err += v.err_estimate * weight.norm();
    }
    let n = REMOVABLE_NODES as f64;
    let ratio = (s - center).norm() / r;
    let discretization = ratio.powf(n) * sum.abs_sum() / n;
    let value = sum.value() / n;
    Ok(ZetaValue::new(value, err / n + discretization + 8.0 * f64::EPSILON * sum.abs_sum() / n))
}

/// The point of {½, −½, −3/2, …} closest to s, if within [`REMOVABLE_ZONE`].
pub(crate) fn near_half_ladder(s: Complex64) -> Option<Complex64> {
    if s.re > 0.5 + REMOVABLE_ZONE {
        return None;
    }
    let k = (0.5 - s.re).round().max(0.0);
    let center = Complex64::new(0.5 - k, 0.0);
    ((s - center).norm() < REMOVABLE_ZONE).then_some(center)
}
