use num_complex::Complex64;

/// Divisors of `n` in increasing order, by trial division up to √n.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// σ_s(n) = Σ_{d|n} d^s.
pub fn divisor_sigma(s: Complex64, n: u64) -> Complex64 {
    assert!(n >= 1, "divisor_sigma requires n >= 1");
    divisors(n)
        .into_iter()
        .map(|d| Complex64::new(d as f64, 0.0).powc(s))
        .sum()
}

/// σ_k(n) for real exponent.
pub fn divisor_sigma_real(k: f64, n: u64) -> f64 {
    divisors(n).into_iter().map(|d| (d as f64).powf(k)).sum()
}
