//! Quadratic forms, half-lattice enumeration and direct lattice sums.
//!
//! Forms follow the convention Q(x) = ½ xᵀAx. Two direct-summation oracles are
//! provided for the half-plane Re s > p/2:
//!
//! * [`direct_lattice_sum`]: plain max-norm box summation with a rigorous
//!   integral-test tail bound;
//! * [`smoothed_lattice_sum`]: the lattice sum of f·φ for a smooth radial
//!   cutoff φ plus the integral of f·(1−φ), which by Poisson summation equals
//!   the lattice sum of f·(1−φ) up to an error that is exponentially small in
//!   the cutoff width. Only elementary sums and a one-dimensional radial
//!   quadrature are involved.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::exec::Execution;
use crate::specfun::gamma::gamma_real;
use crate::specfun::quad;
use crate::types::ZetaValue;

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 8;

/// Symmetric positive-definite form Q(x) = ½ xᵀAx.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormSpec {
    matrix: DMatrix<f64>,
    /// upper-triangular R with A = RᵀR
    chol_upper: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det: f64,
    eig_min: f64,
    eig_max: f64,
}

impl QuadraticFormSpec {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        if p == 0 || p > MAX_DIM {
            return Err(ZetaError::domain(format!("dimension must be in 1..={MAX_DIM}, got {p}")));
        }
        if rows.iter().any(|r| r.len() != p) {
            return Err(ZetaError::domain("matrix must be square"));
        }
        Self::from_matrix(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let p = matrix.nrows();
        if p == 0 || p > MAX_DIM || matrix.ncols() != p {
            return Err(ZetaError::domain("matrix must be square with dimension 1..=8"));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(ZetaError::domain("matrix entries must be finite"));
        }
        for i in 0..p {
            for j in 0..i {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(ZetaError::domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        for k in 1..=p {
            let minor = matrix.view((0, 0), (k, k)).into_owned().determinant();
            if !(minor > 0.0) {
                return Err(ZetaError::domain(format!(
                    "matrix not positive definite (leading minor {k} = {minor})"
                )));
            }
        }
        let chol = matrix
            .clone()
            .cholesky()
            .ok_or_else(|| ZetaError::domain("Cholesky factorization failed"))?;
        let chol_upper = chol.l().transpose();
        let inverse = chol.inverse();
        let det = chol.determinant();
        let eig = matrix.clone().symmetric_eigen().eigenvalues;
        let eig_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let eig_max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(QuadraticFormSpec {
            matrix,
            chol_upper,
            inverse,
            det,
            eig_min,
            eig_max,
        })
    }

    /// 1×1 form with A = (a).
    pub fn scalar(a: f64) -> Result<Self> {
        Self::new(&[vec![a]])
    }

    /// 2×2 form of a n₁² + b n₁n₂ + c n₂², i.e. A = [[2a, b], [b, 2c]].
    pub fn binary(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(&[vec![2.0 * a, b], vec![b, 2.0 * c]])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn eig_min(&self) -> f64 {
        self.eig_min
    }

    pub fn eig_max(&self) -> f64 {
        self.eig_max
    }

    /// The form with matrix A⁻¹.
    pub fn inverse(&self) -> Result<Self> {
        let mut inv = self.inverse.clone();
        symmetrize(&mut inv);
        Self::from_matrix(inv)
    }

    /// The form with matrix λA.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::from_matrix(&self.matrix * lambda)
    }

    /// Q(x) = ½ xᵀAx.
    pub fn eval(&self, x: &[f64]) -> f64 {
        0.5 * quadratic(&self.matrix, x)
    }

    /// xᵀA⁻¹x.
    pub fn inverse_norm2(&self, x: &[f64]) -> f64 {
        quadratic(&self.inverse, x)
    }

    /// The form with rows/columns permuted: B_ij = A_{perm[i], perm[j]}.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let p = self.dim();
        Self::from_matrix(DMatrix::from_fn(p, p, |i, j| self.matrix[(perm[i], perm[j])]))
    }

    /// Rows of the matrix as nested vectors.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.matrix[(i, j)]).collect())
            .collect()
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[inline]
fn quadratic(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let p = x.len();
    let mut acc = 0.0;
    for i in 0..p {
        let mut row = 0.0;
        for j in 0..p {
            row += m[(i, j)] * x[j];
        }
        acc += x[i] * row;
    }
    acc
}

/// Full argument set of ζ_{A,c,q}(s).
#[derive(Debug, Clone, PartialEq)]
pub struct EpsteinParams {
    pub form: QuadraticFormSpec,
    pub c: Vec<f64>,
    pub q: f64,
}

impl EpsteinParams {
    pub fn new(form: QuadraticFormSpec, c: Vec<f64>, q: f64) -> Result<Self> {
        if c.len() != form.dim() {
            return Err(ZetaError::domain(format!(
                "offset has length {}, form has dimension {}",
                c.len(),
                form.dim()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(ZetaError::domain("offset must be finite"));
        }
        if !(q >= 0.0) || !q.is_finite() {
            return Err(ZetaError::domain(format!("q must be finite and >= 0, got {q}")));
        }
        Ok(EpsteinParams { form, c, q })
    }

    pub fn centered(form: QuadraticFormSpec, q: f64) -> Result<Self> {
        let p = form.dim();
        Self::new(form, vec![0.0; p], q)
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// Q(n + c) + q.
    pub fn base(&self, n: &[i64]) -> f64 {
        let x: Vec<f64> = n.iter().zip(&self.c).map(|(&ni, &ci)| ni as f64 + ci).collect();
        self.form.eval(&x) + self.q
    }
}

/// Serializable mirror of a form, used by the CLI and spectrum files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormRows(pub Vec<Vec<f64>>);

/// base^{−s} for a positive real base.
#[inline]
pub(crate) fn real_pow_neg(base: f64, s: Complex64) -> Complex64 {
    let l = base.ln();
    let mag = (-s.re * l).exp();
    let (sin, cos) = (s.im * l).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

/// Calls `f` for every n ∈ Z^p with max-norm exactly `r`, in a fixed order.
pub fn for_each_shell_vector<F: FnMut(&[i64])>(p: usize, r: i64, mut f: F) {
    assert!(p >= 1, "dimension must be >= 1");
    if r == 0 {
        f(&vec![0; p]);
        return;
    }
    let mut n = vec![0i64; p];
    // The first coordinate with |n_i| = r is i; earlier ones are in (−r, r).
    for i in 0..p {
        for sign in [1i64, -1] {
            n[i] = sign * r;
            visit_ranges(&mut n, 0, i, p, r, &mut f);
        }
    }
}

fn visit_ranges<F: FnMut(&[i64])>(n: &mut [i64], k: usize, pivot: usize, p: usize, r: i64, f: &mut F) {
    if k == p {
        f(n);
        return;
    }
    if k == pivot {
        visit_ranges(n, k + 1, pivot, p, r, f);
        return;
    }
    let bound = if k < pivot { r - 1 } else { r };
    for v in -bound..=bound {
        n[k] = v;
        visit_ranges(n, k + 1, pivot, p, r, f);
    }
    n[k] = 0;
}

/// Whether the first non-zero component of `n` is positive.
pub fn is_half_lattice_representative(n: &[i64]) -> bool {
    n.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Calls `f` for each half-lattice representative with max-norm `r`.
pub fn for_each_half_shell_vector<F: FnMut(&[i64])>(p: usize, r: i64, mut f: F) {
    if r == 0 {
        return;
    }
    for_each_shell_vector(p, r, |n| {
        if is_half_lattice_representative(n) {
            f(n)
        }
    });
}

/// Vectors of Z^p \ {0} with max-norm `shell_index` whose first non-zero
/// component is positive; one representative per ± pair.
pub fn enumerate_half_lattice(p: usize, shell_index: u32) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for_each_half_shell_vector(p, shell_index as i64, |n| out.push(n.to_vec()));
    out
}

/// Number of vectors of Z^p with max-norm exactly r.
pub fn shell_size(p: usize, r: u64) -> u64 {
    if r == 0 {
        1
    } else {
        (2 * r + 1).pow(p as u32) - (2 * r - 1).pow(p as u32)
    }
}

/// Rigorous bound on Σ_{|n|∞ > R} |Q(n+c)+q|^{−σ} for σ > p/2, from
/// Q(n+c) ≥ ½λ_min (|n|∞ − |c|∞)² and an integral comparison over shells.
pub fn tail_bound(params: &EpsteinParams, sigma: f64, radius: u64) -> f64 {
    let p = params.dim() as f64;
    if sigma <= p / 2.0 {
        return f64::INFINITY;
    }
    let c_inf = params.c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r = radius as f64;
    if r <= c_inf + 1.0 {
        return f64::INFINITY;
    }
    let half_lambda = 0.5 * params.form.eig_min();
    let growth = 2.0 + (1.0 + 2.0 * c_inf) / (r - c_inf);
    let k = 2.0 * p * growth.powf(p - 1.0) * half_lambda.powf(-sigma);
    k * (r - c_inf).powf(p - 2.0 * sigma) / (2.0 * sigma - p)
}

fn shell_sum(params: &EpsteinParams, s: Complex64, r: i64, excludes_origin: bool) -> Result<(Complex64, f64)> {
    let p = params.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut singular = None;
    for_each_shell_vector(p, r, |n| {
        if excludes_origin && r == 0 {
            return;
        }
        let base = params.base(n);
        if base == 0.0 {
            singular = Some(n.to_vec());
            return;
        }
        let t = real_pow_neg(base, s);
        abs += t.norm();
        acc += t;
    });
    if let Some(n) = singular {
        return Err(ZetaError::SingularTerm(format!("Q(n+c)+q = 0 at n = {n:?}")));
    }
    Ok((acc, abs))
}

/// Σ over n ∈ Z^p with |n|∞ ≤ radius of [Q(n+c)+q]^{−s}, optionally without
/// n = 0. The error estimate is the integral-test tail bound, summed with a
/// rounding allowance.
pub fn direct_lattice_sum(
    params: &EpsteinParams,
    s: Complex64,
    excludes_origin: bool,
    radius: u64,
    exec: Execution,
) -> Result<ZetaValue> {
    let p = params.dim() as f64;
    if s.re <= p / 2.0 {
        return Err(ZetaError::NonConvergence {
            terms: 0,
            estimate: f64::INFINITY,
        });
    }
    let shells: Vec<i64> = (0..=radius as i64).collect();
    let parts = exec.map(&shells, |&r| shell_sum(params, s, r, excludes_origin));
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for part in parts {
        let (v, a) = part?;
        value += v;
        abs += a;
    }
    let err = tail_bound(params, s.re, radius) + 4.0 * f64::EPSILON * abs;
    Ok(ZetaValue::new(value, err))
}

/// Calls `f(n, Q(n+c))` for all n with 2Q(n+c) ≤ bound, grouped by the value
/// of the last coordinate (Fincke–Pohst enumeration on the Cholesky factor).
fn ellipsoid_chunks(params: &EpsteinParams, bound: f64) -> Vec<i64> {
    let p = params.dim();
    let r = &params.form.chol_upper;
    let rpp = r[(p - 1, p - 1)];
    let c = params.c[p - 1];
    let half = bound.sqrt() / rpp;
    let lo = (-half - c).ceil() as i64;
    let hi = (half - c).floor() as i64;
    (lo..=hi).collect()
}

fn ellipsoid_visit<F: FnMut(&[i64], f64)>(params: &EpsteinParams, bound: f64, last: i64, f: &mut F) {
    let p = params.dim();
    let mut n = vec![0i64; p];
    n[p - 1] = last;
    let mut y = vec![0.0; p];
    y[p - 1] = last as f64 + params.c[p - 1];
    let rpp = params.form.chol_upper[(p - 1, p - 1)];
    let partial = (rpp * y[p - 1]).powi(2);
    if partial > bound {
        return;
    }
    if p == 1 {
        f(&n, 0.5 * partial);
        return;
    }
    visit_level(params, bound, p - 2, partial, &mut n, &mut y, f);
}

fn visit_level<F: FnMut(&[i64], f64)>(
    params: &EpsteinParams,
    bound: f64,
    i: usize,
    partial: f64,
    n: &mut [i64],
    y: &mut [f64],
    f: &mut F,
) {
    let r = &params.form.chol_upper;
    let p = n.len();
    let mut shift = 0.0;
    for j in (i + 1)..p {
        shift += r[(i, j)] * y[j];
    }
    let rii = r[(i, i)];
    let room = (bound - partial).max(0.0).sqrt();
    let ci = params.c[i];
    let lo = ((-room - shift) / rii - ci).ceil() as i64;
    let hi = ((room - shift) / rii - ci).floor() as i64;
    for v in lo..=hi {
        n[i] = v;
        y[i] = v as f64 + ci;
        let t = rii * y[i] + shift;
        let next = partial + t * t;
        if next > bound {
            continue;
        }
        if i == 0 {
            f(n, 0.5 * next);
        } else {
            visit_level(params, bound, i - 1, next, n, y, f);
        }
    }
}

/// Radial profile of the cutoff weight: W(ρ) = ½ erfc((R − ρ)/w) for
/// ρ ≥ R − 6w and 0 inside, where ρ = √(2Q(x+c)). The jump at R − 6w is
/// ½ erfc(6) ≈ 1e-17.
#[derive(Debug, Clone, Copy)]
struct SmoothCutoff {
    radius: f64,
    width: f64,
}

impl SmoothCutoff {
    fn tail_weight(&self, rho: f64) -> f64 {
        if rho < self.inner() {
            0.0
        } else {
            0.5 * libm::erfc((self.radius - rho) / self.width)
        }
    }

    fn inner(&self) -> f64 {
        self.radius - 6.0 * self.width
    }

    fn outer(&self) -> f64 {
        self.radius + 6.0 * self.width
    }
}

/// Smoothed direct-summation oracle for Re s > p/2.
///
/// Σ_n f(n) = Σ_n f(n)(1 − W) + ∫ f W dx + O(e^{−(2π w_x)²/4}), where the
/// cutoff width w_x = 1.8 lattice units along the stiffest direction.
pub fn smoothed_lattice_sum(
    params: &EpsteinParams,
    s: Complex64,
    excludes_origin: bool,
    exec: Execution,
) -> Result<ZetaValue> {
    let p = params.dim();
    let pf = p as f64;
    if s.re <= pf / 2.0 {
        return Err(ZetaError::NonConvergence {
            terms: 0,
            estimate: f64::INFINITY,
        });
    }
    let width = 1.8 * params.form.eig_max().sqrt();
    let cutoff = SmoothCutoff {
        radius: 8.0 * width,
        width,
    };
    let q = params.q;
    let bound = cutoff.outer().powi(2);
    let chunks = ellipsoid_chunks(params, bound);
    let parts = exec.map(&chunks, |&last| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut singular = false;
        ellipsoid_visit(params, bound, last, &mut |n: &[i64], qn: f64| {
            if excludes_origin && n.iter().all(|&v| v == 0) {
                return;
            }
            let base = qn + q;
            if base == 0.0 {
                singular = true;
                return;
            }
            let w = 1.0 - cutoff.tail_weight((2.0 * qn).sqrt());
            if w == 0.0 {
                return;
            }
            let t = real_pow_neg(base, s) * w;
            abs += t.norm();
            acc += t;
        });
        (acc, abs, singular)
    });
    let mut head = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (v, a, sing) in parts {
        if sing {
            return Err(ZetaError::SingularTerm("Q(n+c)+q = 0 for a retained n".into()));
        }
        head += v;
        abs += a;
    }

    // ∫_{R^p} f W dx = S_{p−1}/√det A ∫ ρ^{p−1} (ρ²/2 + q)^{−s} W(ρ) dρ
    let sphere = 2.0 * PI.powf(pf / 2.0) / gamma_real(pf / 2.0)?;
    let pref = sphere / params.form.det().sqrt();
    let radial = |rho: f64| -> Complex64 {
        let w = cutoff.tail_weight(rho);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        real_pow_neg(0.5 * rho * rho + q, s) * rho.powf(pf - 1.0) * w
    };
    let inner = quad::integrate(
        radial,
        cutoff.inner(),
        cutoff.outer(),
        1e-15,
        0.0,
        400,
    );
    // Beyond the outer radius W = 1; substitute u = ρ_out/ρ.
    let rho_out = cutoff.outer();
    let far = quad::integrate(
        |u: f64| -> Complex64 {
            if u <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let rho = rho_out / u;
            real_pow_neg(0.5 * rho * rho + q, s) * rho.powf(pf - 1.0) * (rho_out / (u * u))
        },
        0.0,
        1.0,
        1e-15,
        0.0,
        400,
    );
    let tail = pref * (inner.value + far.value);
    let origin_tail = if excludes_origin {
        let origin = DVector::from_vec(params.c.clone());
        let q0 = 0.5 * quadratic(params.form.matrix(), origin.as_slice());
        let w = cutoff.tail_weight((2.0 * q0).sqrt());
        if w > 0.0 {
            real_pow_neg(q0 + q, s) * w
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        Complex64::new(0.0, 0.0)
    };
    let value = head + tail - origin_tail;
    let err = pref * (inner.err + far.err) + 8.0 * f64::EPSILON * (abs + tail.norm());
    Ok(ZetaValue::new(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_lattice_small_cases() {
        assert_eq!(enumerate_half_lattice(1, 1), vec![vec![1]]);
        let mut v = enumerate_half_lattice(2, 1);
        v.sort();
        assert_eq!(v, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn half_shell_cardinality_3d() {
        for r in 1..6u32 {
            let expected = ((2 * r + 1).pow(3) - (2 * r - 1).pow(3)) / 2;
            // full enumeration and filter
            let mut count = 0;
            let ri = r as i64;
            for a in -ri..=ri {
                for b in -ri..=ri {
                    for d in -ri..=ri {
                        let n = [a, b, d];
                        let m = n.iter().map(|v| v.abs()).max().unwrap();
                        if m == ri && is_half_lattice_representative(&n) {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(count, expected);
            assert_eq!(enumerate_half_lattice(3, r).len() as u32, expected);
        }
    }

    #[test]
    fn shells_partition_the_box() {
        for p in 1..=3usize {
            for big_r in 0..=6i64 {
                let mut seen = BTreeSet::new();
                let mut total = 0usize;
                for r in 0..=big_r {
                    for_each_shell_vector(p, r, |n| {
                        total += 1;
                        seen.insert(n.to_vec());
                    });
                }
                assert_eq!(total, seen.len(), "duplicates");
                assert_eq!(total, (2 * big_r as usize + 1).pow(p as u32));
                // half shells plus negations plus origin
                let mut rebuilt = BTreeSet::new();
                rebuilt.insert(vec![0i64; p]);
                for r in 1..=big_r {
                    for_each_half_shell_vector(p, r, |n| {
                        rebuilt.insert(n.to_vec());
                        rebuilt.insert(n.iter().map(|v| -v).collect());
                    });
                }
                assert_eq!(rebuilt, seen);
            }
        }
    }

    #[test]
    fn one_dimensional_symmetry_reduction() {
        let params = EpsteinParams::new(QuadraticFormSpec::scalar(2.0).unwrap(), vec![0.0], 1.0).unwrap();
        let d = direct_lattice_sum(&params, c(3.0, 0.0), true, 2000, Execution::Sequential).unwrap();
        let reduced: f64 = 2.0 * (1..=2000).map(|n| ((n * n) as f64 + 1.0).powi(-3)).sum::<f64>();
        assert!((d.value.re - reduced).abs() < 1e-14);
        assert!(d.err_estimate < 1e-9);
    }

    #[test]
    fn square_lattice_against_classical_value() {
        // Σ' (n₁²+n₂²)^{−2} = 4 ζ(2) β(2)
        let form = QuadraticFormSpec::new(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let params = EpsteinParams::centered(form, 0.0).unwrap();
        let exact = 4.0 * std::f64::consts::PI.powi(2) / 6.0 * 0.915_965_594_177_219_0;
        let d = direct_lattice_sum(&params, c(2.0, 0.0), true, 400, Execution::Parallel).unwrap();
        assert!((d.value.re - exact).abs() <= d.err_estimate);
        assert!((d.value.re - 6.026_812_1).abs() < 1e-4);
        let smooth = smoothed_lattice_sum(&params, c(2.0, 0.0), true, Execution::Parallel).unwrap();
        assert!((smooth.value.re - exact).abs() < 1e-13 * exact, "{}", smooth.value.re - exact);
    }

    #[test]
    fn positivity_with_origin() {
        let form = QuadraticFormSpec::new(&[vec![1.5, 0.2], vec![0.2, 0.9]]).unwrap();
        let params = EpsteinParams::new(form, vec![0.3, -0.1], 0.7).unwrap();
        let d = direct_lattice_sum(&params, c(2.5, 0.0), false, 20, Execution::Sequential).unwrap();
        let first = (params.form.eval(&[0.3, -0.1]) + 0.7f64).powf(-2.5);
        assert!(d.value.re >= first && first > 0.0);
    }

    #[test]
    fn monotone_in_radius_and_honest_tail() {
        let form = QuadraticFormSpec::new(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let params = EpsteinParams::new(form, vec![0.2, 0.4], 0.3).unwrap();
        let s = c(1.8, 0.0);
        let mut last = 0.0;
        for r in [4u64, 8, 16, 32] {
            let d = direct_lattice_sum(&params, s, false, r, Execution::Sequential).unwrap();
            assert!(d.value.re > last);
            let d2 = direct_lattice_sum(&params, s, false, 2 * r, Execution::Sequential).unwrap();
            assert!(d2.value.re - d.value.re <= d.err_estimate);
            last = d.value.re;
        }
    }

    #[test]
    fn index_shift_identity() {
        let form = QuadraticFormSpec::new(&[vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
        let s = c(2.2, 0.5);
        let c0 = vec![0.25, -0.4];
        let e = [1i64, -2];
        let c1: Vec<f64> = c0.iter().zip(e).map(|(a, b)| a + b as f64).collect();
        let p0 = EpsteinParams::new(form.clone(), c0.clone(), 0.5).unwrap();
        let p1 = EpsteinParams::new(form, c1.clone(), 0.5).unwrap();
        let full0 = smoothed_lattice_sum(&p0, s, false, Execution::Sequential).unwrap();
        let full1 = smoothed_lattice_sum(&p1, s, false, Execution::Sequential).unwrap();
        assert!((full0.value - full1.value).norm() < 1e-12 * full0.value.norm());
        let ex0 = smoothed_lattice_sum(&p0, s, true, Execution::Sequential).unwrap();
        let ex1 = smoothed_lattice_sum(&p1, s, true, Execution::Sequential).unwrap();
        let lhs = ex1.value - ex0.value;
        let rhs = real_pow_neg(p0.base(&[0, 0]), s) - real_pow_neg(p1.base(&[0, 0]), s);
        assert!((lhs - rhs).norm() < 1e-12 * full0.value.norm(), "{lhs} {rhs}");
    }

    #[test]
    fn errors() {
        let form = QuadraticFormSpec::new(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let params = EpsteinParams::centered(form, 0.0).unwrap();
        assert!(matches!(
            direct_lattice_sum(&params, c(1.0, 0.0), true, 5, Execution::Sequential),
            Err(ZetaError::NonConvergence { .. })
        ));
        assert!(matches!(
            direct_lattice_sum(&params, c(2.0, 0.0), false, 5, Execution::Sequential),
            Err(ZetaError::SingularTerm(_))
        ));
        assert!(QuadraticFormSpec::new(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(QuadraticFormSpec::new(&[vec![1.0, 0.1], vec![0.2, 1.0]]).is_err());
        assert!(EpsteinParams::new(
            QuadraticFormSpec::scalar(1.0).unwrap(),
            vec![0.0],
            -1.0
        )
        .is_err());
    }

    #[test]
    fn execution_modes_bit_identical() {
        let form = QuadraticFormSpec::new(&[vec![2.0, 0.3, 0.0], vec![0.3, 1.5, 0.1], vec![0.0, 0.1, 1.0]]).unwrap();
        let params = EpsteinParams::new(form, vec![0.1, 0.2, 0.3], 0.5).unwrap();
        let s = c(2.5, 1.0);
        let a = direct_lattice_sum(&params, s, false, 12, Execution::Sequential).unwrap();
        let b = direct_lattice_sum(&params, s, false, 12, Execution::Parallel).unwrap();
        assert_eq!(a.value, b.value);
        let a = smoothed_lattice_sum(&params, s, false, Execution::Sequential).unwrap();
        let b = smoothed_lattice_sum(&params, s, false, Execution::Parallel).unwrap();
        assert_eq!(a.value, b.value);
    }
}
