use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, ZetaError};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Returns `Some(k)` when `s` is exactly the non-positive integer `-k`.
pub(crate) fn nonpositive_integer(s: Complex64) -> Option<u32> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() && s.re > -1e9 {
        Some((-s.re) as u32)
    } else {
        None
    }
}

/// sin(pi z) with argument reduction about the nearest integer.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let w = Complex64::new(z.re - n, z.im) * PI;
    let v = w.sin();
    if (n as i64).rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

/// cos(pi z) with argument reduction.
pub fn cos_pi(z: Complex64) -> Complex64 {
    sin_pi(z + 0.5)
}

fn lanczos_series(z: Complex64) -> Complex64 {
    // z here is the shifted argument (Γ(z+1) form).
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// ln Γ(s) on the principal branch of the Lanczos form (continuous in the
/// right half-plane; for Re s < 1/2 the reflected value is returned).
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if let Some(k) = nonpositive_integer(s) {
        return Err(pole_at(k));
    }
    if s.re < 0.5 {
        // ln Γ(s) = ln π − ln sin(πs) − ln Γ(1−s)
        let lg = ln_gamma(Complex64::new(1.0, 0.0) - s)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - sin_pi(s).ln() - lg);
    }
    let z = s - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_series(z).ln())
}

fn pole_at(k: u32) -> ZetaError {
    let mut fact = 1.0;
    for j in 1..=k {
        fact *= j as f64;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    ZetaError::Pole {
        location: Complex64::new(-(k as f64), 0.0),
        residue: Complex64::new(sign / fact, 0.0),
    }
}

/// Γ(s) for complex `s`; pole error at s = 0, −1, −2, …
pub fn complex_gamma(s: Complex64) -> Result<Complex64> {
    if let Some(k) = nonpositive_integer(s) {
        return Err(pole_at(k));
    }
    if s.re < 0.5 {
        let g = complex_gamma(Complex64::new(1.0, 0.0) - s)?;
        return Ok(PI / (sin_pi(s) * g));
    }
    if s.im == 0.0 && s.re == s.re.round() && s.re <= 171.0 {
        let mut f = 1.0;
        for j in 2..(s.re as u64) {
            f *= j as f64;
        }
        return Ok(Complex64::new(f, 0.0));
    }
    if s.norm() > 140.0 {
        return Ok(ln_gamma(s)?.exp());
    }
    let z = s - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * lanczos_series(z))
}

/// 1/Γ(s), entire; exactly zero at the non-positive integers.
pub fn rgamma(s: Complex64) -> Complex64 {
    if nonpositive_integer(s).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if s.re < 0.5 {
        // 1/Γ(s) = sin(πs) Γ(1−s) / π
        return match complex_gamma(Complex64::new(1.0, 0.0) - s) {
            Ok(g) => sin_pi(s) * g / PI,
            Err(_) => Complex64::new(0.0, 0.0),
        };
    }
    match complex_gamma(s) {
        Ok(g) => g.inv(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Γ(s + shift)/Γ(s), finite wherever the quotient is.
///
/// Integer shifts use the exact rational form, so the quotient stays finite
/// where both Γ factors have poles.
pub fn gamma_ratio(s: Complex64, shift: f64) -> Result<Complex64> {
    if shift == shift.round() && shift.abs() <= 64.0 {
        let k = shift as i64;
        let one = Complex64::new(1.0, 0.0);
        if k >= 0 {
            return Ok((0..k).fold(one, |acc, j| acc * (s + j as f64)));
        }
        let mut den = one;
        for j in 1..=(-k) {
            den *= s - j as f64;
        }
        if den.norm() == 0.0 {
            let loc = s;
            return Err(ZetaError::Pole {
                location: loc,
                residue: Complex64::new(f64::NAN, 0.0),
            });
        }
        return Ok(one / den);
    }
    let num = complex_gamma(s + shift)?;
    Ok(num * rgamma(s))
}

/// Ψ(k+1) = H_k − γ for non-negative integers.
pub fn digamma_int_plus_one(k: u32) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum::<f64>() - EULER_GAMMA
}

/// Real digamma ψ(x); poles at non-positive integers are a domain error.
pub fn digamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() || (x <= 0.0 && x == x.round()) {
        return Err(ZetaError::domain("digamma argument must be finite and not a non-positive integer"));
    }
    if x < 0.5 {
        // ψ(1 − x) − ψ(x) = π cot πx
        let c = (PI * x).cos() / (PI * x).sin();
        return Ok(digamma_real(1.0 - x)? - PI * c);
    }
    let mut y = x;
    let mut acc = 0.0;
    while y < 12.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let series = inv2
        * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    Ok(acc + y.ln() - 0.5 / y - series)
}

/// Real Γ(x) convenience wrapper.
pub fn gamma_real(x: f64) -> Result<f64> {
    complex_gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn digamma_values() {
        assert_relative_eq!(digamma_real(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-14);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert_relative_eq!(digamma_real(0.5).unwrap(), half, epsilon = 1e-14);
        assert_relative_eq!(digamma_real(-0.5).unwrap(), half + 2.0, epsilon = 1e-14);
        assert_relative_eq!(digamma_real(-1.5).unwrap(), half + 2.0 + 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(digamma_real(7.0).unwrap(), digamma_int_plus_one(6), epsilon = 1e-14);
        // digamma(-2.3) to 17 digits
        assert_relative_eq!(digamma_real(-2.3).unwrap(), 3.3173231575618227, max_relative = 1e-13);
        assert!(digamma_real(-2.0).is_err());
    }

    #[test]
    fn classical_values() {
        assert_relative_eq!(complex_gamma(c(1.0, 0.0)).unwrap().re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            complex_gamma(c(0.5, 0.0)).unwrap().re,
            PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(complex_gamma(c(-0.5, 0.0)).unwrap().re, -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(complex_gamma(c(6.0, 0.0)).unwrap().re, 120.0, max_relative = 1e-15);
    }

    /// Independent oracle: Γ(s) = Γ(s+N)/[s(s+1)…(s+N−1)] with Γ(s+N) from
    /// the Stirling series at large argument.
    fn gamma_stirling_oracle(s: Complex64) -> Complex64 {
        let n = 40;
        let z = s + n as f64;
        let inv = z.inv();
        let inv2 = inv * inv;
        // Stirling corrections B_{2k}/(2k(2k-1) z^{2k-1})
        let coeffs = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360360.0,
            1.0 / 156.0,
        ];
        let mut corr = Complex64::new(0.0, 0.0);
        let mut p = inv;
        for c in coeffs {
            corr += c * p;
            p *= inv2;
        }
        let lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr;
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..n {
            prod *= s + j as f64;
        }
        lg.exp() / prod
    }

    #[test]
    fn complex_value_against_stirling_oracle() {
        let s = c(3.0, 2.0);
        let g = complex_gamma(s).unwrap();
        let o = gamma_stirling_oracle(s);
        assert!((g - o).norm() / o.norm() < 1e-13, "{g} vs {o}");
        // and the recurrence from s-1
        let gm = complex_gamma(s - 1.0).unwrap();
        assert!((g - (s - 1.0) * gm).norm() / g.norm() < 1e-13);
    }

    #[test]
    fn poles_are_errors_with_residue() {
        match complex_gamma(c(-2.0, 0.0)) {
            Err(ZetaError::Pole { residue, .. }) => assert_relative_eq!(residue.re, 0.5),
            other => panic!("{other:?}"),
        }
        assert!(complex_gamma(c(0.0, 0.0)).is_err());
        assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn log_gamma_large_argument() {
        let s = c(200.0, 30.0);
        let lg = ln_gamma(s).unwrap();
        let o = gamma_stirling_oracle(c(20.0, 3.0)).ln();
        let lg2 = ln_gamma(c(20.0, 3.0)).unwrap();
        assert!((lg2.exp() - o.exp()).norm() < 1e-12 * o.exp().norm());
        assert!(lg.re.is_finite());
    }

    #[test]
    fn gamma_ratio_integer_shift() {
        let s = c(-1.0, 0.0);
        // Γ(s−1)/Γ(s) = 1/(s−1) finite at s = −1
        assert_relative_eq!(gamma_ratio(s, -1.0).unwrap().re, -0.5);
        let s = c(2.3, 0.4);
        let r = gamma_ratio(s, -0.5).unwrap();
        let d = complex_gamma(s - 0.5).unwrap() / complex_gamma(s).unwrap();
        assert!((r - d).norm() < 1e-14 * d.norm());
    }

    #[test]
    fn digamma_integer() {
        assert_relative_eq!(digamma_int_plus_one(1) + EULER_GAMMA, 1.0);
    }
}
