use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma, nonpositive_integer, sin_pi};
use crate::error::{Result, ZetaError};
use crate::types::ZetaValue;

const EXACT_BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// Bernoulli number B_n (B_1 = −1/2).
pub fn bernoulli_number(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => -0.5,
        n if n % 2 == 1 => 0.0,
        n if n / 2 <= EXACT_BERNOULLI.len() => {
            let (p, q) = EXACT_BERNOULLI[n / 2 - 1];
            p / q
        }
        n => {
            // B_{2k} = (−1)^{k+1} 2 (2k)! ζ(2k) / (2π)^{2k}
            let k = n / 2;
            let zeta: f64 = (1..40).map(|j| (j as f64).powi(-(n as i32))).sum();
            let mut mag = 2.0 * zeta;
            for j in 1..=n {
                mag *= j as f64 / (2.0 * PI);
            }
            if k % 2 == 1 {
                mag
            } else {
                -mag
            }
        }
    }
}

/// Bernoulli polynomial B_n(x), accurate for x in [0, 1].
pub fn bernoulli_polynomial(n: usize, x: f64) -> f64 {
    if n <= 21 {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += binom * bernoulli_number(k) * x.powi((n - k) as i32);
            binom *= (n - k) as f64 / (k + 1) as f64;
        }
        return acc;
    }
    // Fourier series, absolutely convergent for n ≥ 2 and x in [0, 1]:
    // B_n(x) = −2 n!/(2π)^n Σ_k cos(2πkx − nπ/2)/k^n
    let mut pref = 2.0;
    for j in 1..=n {
        pref *= j as f64 / (2.0 * PI);
    }
    let phase = (n % 4) as f64 * PI / 2.0;
    let mut acc = 0.0;
    for k in 1..200 {
        let term = (2.0 * PI * k as f64 * x - phase).cos() / (k as f64).powi(n as i32);
        acc += term;
        if (k as f64).powi(-(n as i32)) < 1e-18 * acc.abs().max(1e-300) {
            break;
        }
    }
    -pref * acc
}

fn cut_index(s: Complex64) -> usize {
    16 + s.norm().ceil() as usize
}

/// Euler–Maclaurin evaluation with the tail correction. Returns value and the
/// magnitude of the first omitted correction plus a cancellation bound.
fn hurwitz_euler_maclaurin(s: Complex64, c: f64) -> (Complex64, f64) {
    let n_cut = cut_index(s);
    let mut head = Complex64::new(0.0, 0.0);
    let mut head_abs = 0.0;
    for n in 0..n_cut {
        let t = Complex64::new(n as f64 + c, 0.0).powc(-s);
        head_abs += t.norm();
        head += t;
    }
    let x = n_cut as f64 + c;
    let xs = Complex64::new(x, 0.0).powc(-s);
    let mut tail = xs * x / (s - 1.0) + 0.5 * xs;
    // Σ_k B_2k/(2k)! s(s+1)…(s+2k−2) x^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut xpow = xs / x; // x^{−s−1}
    let mut fact = 2.0; // (2k)!
    let mut last = f64::INFINITY;
    let mut omitted = 0.0;
    for k in 1..=12usize {
        let term = bernoulli_number(2 * k) / fact * rising * xpow;
        let tn = term.norm();
        if k > 8 && tn > last {
            omitted = tn;
            break;
        }
        tail += term;
        last = tn;
        omitted = tn;
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        xpow /= x * x;
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    let value = head + tail;
    let cancel = 4.0 * f64::EPSILON * (head_abs + tail.norm());
    (value, omitted + cancel)
}

/// Hurwitz zeta ζ_H(s, c) = Σ_{n≥0} (n+c)^{−s}, continued in s.
pub fn hurwitz_zeta(s: Complex64, c: f64) -> Result<ZetaValue> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(ZetaError::domain(format!("Hurwitz parameter must be > 0, got {c}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(ZetaError::Pole {
            location: s,
            residue: Complex64::new(1.0, 0.0),
        });
    }
    if let Some(k) = nonpositive_integer(s) {
        let n = k as usize + 1;
        // shift to x in (0, 1] keeps the polynomial in its accurate range
        let mut x = c;
        let mut value = 0.0;
        while x > 1.0 {
            x -= 1.0;
            value -= x.powi(k as i32);
        }
        value += -bernoulli_polynomial(n, x) / n as f64;
        let err = 1e3 * f64::EPSILON * value.abs().max(1.0);
        return Ok(ZetaValue::new(Complex64::new(value, 0.0), err).flag_pole(
            s,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ));
    }
    if c == 1.0 {
        return riemann_zeta(s);
    }
    if s.re <= FOURIER_BELOW {
        return hurwitz_fourier(s, c);
    }
    let (value, err) = hurwitz_euler_maclaurin(s, c);
    Ok(ZetaValue::new(value, err).flag_pole(s, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)))
}

/// Below this real part the Euler–Maclaurin head n^{−s} cancels too strongly.
const FOURIER_BELOW: f64 = -5.0;

/// ζ_H(1−w, a) = Γ(w)/(2π)^w [e^{iπw/2} F(−a) + e^{−iπw/2} F(a)],
/// F(a) = Σ_{n≥1} e^{2πina} n^{−w}, for 0 < a ≤ 1 and Re w > 1. Larger
/// offsets are brought into (0, 1] by peeling off leading terms.
fn hurwitz_fourier(s: Complex64, c: f64) -> Result<ZetaValue> {
    let mut a = c;
    let mut peeled = Complex64::new(0.0, 0.0);
    let mut peeled_abs = 0.0;
    while a > 1.0 {
        a -= 1.0;
        let t = Complex64::new(a, 0.0).powc(-s);
        peeled -= t;
        peeled_abs += t.norm();
    }
    let w = Complex64::new(1.0, 0.0) - s;
    let sig = w.re;
    // Σ_{n>N} n^{−σ} ≤ N^{1−σ}/(σ−1) ≤ 1e-17
    let n_max = ((17.0 * 10f64.ln() - (sig - 1.0).ln()) / (sig - 1.0)).exp().ceil().max(2.0) as usize;
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for n in (1..=n_max).rev() {
        let mag = Complex64::new(n as f64, 0.0).powc(-w);
        let (sn, cs) = (2.0 * PI * ((n as f64 * a) % 1.0)).sin_cos();
        plus += mag * Complex64::new(cs, sn);
        minus += mag * Complex64::new(cs, -sn);
    }
    let tail = (n_max as f64).powf(1.0 - sig) / (sig - 1.0);
    let i = Complex64::new(0.0, 1.0);
    let log_pref = ln_gamma(w)? - w * (2.0 * PI).ln();
    let up = (log_pref + i * PI * w * 0.5).exp();
    let down = (log_pref - i * PI * w * 0.5).exp();
    let series = up * minus + down * plus;
    let value = series + peeled;
    let scale = (up.norm() + down.norm()) * (plus.norm() + minus.norm());
    let err = (up.norm() + down.norm()) * tail + 16.0 * f64::EPSILON * (scale + peeled_abs + value.norm());
    Ok(ZetaValue::new(value, err))
}

/// Riemann zeta ζ(s) on the whole plane.
///
/// Re s ≥ 0 is evaluated by Euler–Maclaurin (the Hurwitz evaluator at c = 1);
/// Re s < 0 uses the functional equation.
pub fn riemann_zeta(s: Complex64) -> Result<ZetaValue> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(ZetaError::Pole {
            location: s,
            residue: Complex64::new(1.0, 0.0),
        });
    }
    if s.re >= 0.0 {
        let (value, err) = hurwitz_euler_maclaurin(s, 1.0);
        return Ok(ZetaValue::new(value, err).flag_pole(s, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
    }
    if let Some(k) = nonpositive_integer(s) {
        if k % 2 == 0 && k > 0 {
            return Ok(ZetaValue::new(Complex64::new(0.0, 0.0), 0.0));
        }
        return hurwitz_zeta(s, 1.0);
    }
    // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)
    let one = Complex64::new(1.0, 0.0);
    let reflected = hurwitz_zeta(one - s, 1.0)?;
    let log_pref = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma(one - s)?;
    let pref = log_pref.exp() * sin_pi(s * 0.5);
    let value = pref * reflected.value;
    let err = pref.norm() * reflected.err_estimate + 8.0 * f64::EPSILON * value.norm();
    Ok(ZetaValue::new(value, err))
}

/// ζ′(0) = −½ ln(2π).
pub const RIEMANN_ZETA_PRIME_ZERO: f64 = -0.918_938_533_204_672_8;

/// Dirichlet beta β(s) = Σ_{n≥0} (−1)^n (2n+1)^{−s} = 4^{−s}[ζ_H(s,¼) − ζ_H(s,¾)].
pub fn dirichlet_beta(s: Complex64) -> Result<Complex64> {
    let a = hurwitz_zeta(s, 0.25)?;
    let b = hurwitz_zeta(s, 0.75)?;
    Ok(Complex64::new(4.0, 0.0).powc(-s) * (a.value - b.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::complex_gamma;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hurwitz_far_left() {
        // reference values to 30 digits
        let cases = [
            (c(-5.5629162262749805, 0.2), 0.3, c(-0.00207092367595721046, 0.000991398473151206209)),
            (c(-12.3, 1.0), 0.7, c(-0.114982083567784180, -0.00338400116797287206)),
            (c(-7.25, -3.0), 1.6, c(-0.0818913864501941607, -0.0866314332547919305)),
            (c(-3.3, 0.5), 0.45, c(-0.00475754499794945251, -0.00495526181415107710)),
        ];
        for (s, a, want) in cases {
            let got = hurwitz_zeta(s, a).unwrap();
            let err = (got.value - want).norm();
            // the Euler–Maclaurin head cancels like n^{1−σ} for −5 < σ < 0
            let tol = if s.re <= FOURIER_BELOW { 1e-12 } else { 1e-7 };
            assert!(err < tol * want.norm(), "{s} {a}: {} vs {want}", got.value);
            assert!(err <= got.err_estimate.max(1e-16), "{s} {a}: err {err:e} est {:e}", got.err_estimate);
        }
    }

    #[test]
    fn hurwitz_at_one_is_riemann() {
        for s in [c(-5.56, 0.2), c(0.3, 14.0), c(2.5, -1.0), c(-0.5, 0.0)] {
            assert_eq!(hurwitz_zeta(s, 1.0).unwrap().value, riemann_zeta(s).unwrap().value);
        }
    }

    #[test]
    fn classical_values() {
        let z2 = riemann_zeta(c(2.0, 0.0)).unwrap();
        assert_relative_eq!(z2.value.re, PI * PI / 6.0, max_relative = 1e-14);
        let zm1 = riemann_zeta(c(-1.0, 0.0)).unwrap();
        assert_relative_eq!(zm1.value.re, -1.0 / 12.0, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(c(0.0, 0.0)).unwrap().value.re, -0.5, max_relative = 1e-14);
        assert_eq!(riemann_zeta(c(-4.0, 0.0)).unwrap().value.re, 0.0);
        let z4 = riemann_zeta(c(4.0, 0.0)).unwrap().value.re;
        assert_relative_eq!(z4, PI.powi(4) / 90.0, max_relative = 1e-14);
    }

    #[test]
    fn pole_at_one() {
        assert!(riemann_zeta(c(1.0, 0.0)).unwrap_err().is_pole());
        assert!(hurwitz_zeta(c(1.0, 0.0), 0.3).unwrap_err().is_pole());
        let near = riemann_zeta(c(1.001, 0.0)).unwrap();
        assert!(near.nearest_pole.is_some());
    }

    #[test]
    fn derivative_at_zero_by_central_differences() {
        // Oracle: Richardson-extrapolated central differences of the
        // Euler–Maclaurin evaluation.
        let d = |h: f64| {
            (hurwitz_zeta(c(h, 0.0), 1.0).unwrap().value.re
                - hurwitz_zeta(c(-h, 0.0), 1.0).unwrap().value.re)
                / (2.0 * h)
        };
        let h = 1e-3;
        let rich = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        assert!((rich - RIEMANN_ZETA_PRIME_ZERO).abs() < 1e-10, "{rich}");
        assert_relative_eq!(RIEMANN_ZETA_PRIME_ZERO, -0.5 * (2.0 * PI).ln(), max_relative = 1e-15);
    }

    #[test]
    fn hurwitz_against_direct_sum() {
        // Σ (n+1/4)^{−3}: direct sum to 2e5 plus integral tail bound
        // summed smallest-first; tail by the integral plus half the first omitted term
        let x = 200_000.25f64;
        let direct: f64 = (0..200_000).rev().map(|n| (n as f64 + 0.25).powi(-3)).sum::<f64>()
            + 0.5 / (x * x)
            + 0.5 * x.powi(-3);
        let h = hurwitz_zeta(c(3.0, 0.0), 0.25).unwrap();
        assert!((h.value.re - direct).abs() < 1e-12 * direct, "{} {}", h.value.re, direct);
    }

    #[test]
    fn hurwitz_at_zero_and_trivial_zeros() {
        for &cc in &[0.1, 0.25, 0.5, 0.9, 1.0] {
            let v = hurwitz_zeta(c(0.0, 0.0), cc).unwrap().value.re;
            assert!((v - (0.5 - cc)).abs() < 1e-14);
        }
        for m in 1..6 {
            let v = hurwitz_zeta(c(-2.0 * m as f64, 0.0), 1.0).unwrap().value.re;
            assert!(v.abs() < 1e-12, "m={m} {v}");
        }
    }

    #[test]
    fn functional_equation_residual() {
        // Γ(s/2)ζ(s) π^{−s/2} = Γ((1−s)/2) ζ(1−s) π^{−(1−s)/2}
        for i in 1..10 {
            for &t in &[0.0, 3.0, 14.0, 30.0] {
                let s = c(i as f64 / 10.0, t);
                let one = c(1.0, 0.0);
                let lhs = complex_gamma(s / 2.0).unwrap()
                    * riemann_zeta(s).unwrap().value
                    * Complex64::new(PI, 0.0).powc(-s / 2.0);
                let rhs = complex_gamma((one - s) / 2.0).unwrap()
                    * riemann_zeta(one - s).unwrap().value
                    * Complex64::new(PI, 0.0).powc(-(one - s) / 2.0);
                let scale = lhs.norm().max(rhs.norm()).max(1e-300);
                assert!((lhs - rhs).norm() / scale < 1e-11, "s={s} {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn large_imaginary_part() {
        // ζ(1/2 + 14.134725141734693i) ≈ 0 (first nontrivial zero)
        let z = riemann_zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.value.norm() < 1e-10, "{}", z.value);
        let z = riemann_zeta(c(2.0, 50.0)).unwrap();
        assert!(z.err_estimate < 1e-12 * z.value.norm());
    }

    #[test]
    fn bernoulli_polynomial_branches_agree() {
        // polynomial form vs Fourier form at n = 21
        for &x in &[0.1, 0.3, 0.77] {
            let n = 21;
            let poly = bernoulli_polynomial(n, x);
            let mut pref = 2.0;
            for j in 1..=n {
                pref *= j as f64 / (2.0 * PI);
            }
            let phase = (n % 4) as f64 * PI / 2.0;
            let four: f64 = -pref
                * (1..200)
                    .map(|k| (2.0 * PI * k as f64 * x - phase).cos() / (k as f64).powi(n as i32))
                    .sum::<f64>();
            assert!((poly - four).abs() < 1e-9 * four.abs().max(1.0), "{poly} {four}");
        }
    }

    #[test]
    fn dirichlet_beta_two_is_catalan() {
        let b = dirichlet_beta(c(2.0, 0.0)).unwrap();
        assert_relative_eq!(b.re, 0.915_965_594_177_219, max_relative = 1e-13);
    }
}
