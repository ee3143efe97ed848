//! Operator-regularization identities on finite symmetric positive-definite matrices.
//!
//! In finite dimension every identity is exact, so the numerical derivatives
//! below must reproduce the plain matrix functions and the arbitrary constants
//! α_i must drop out.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, ZetaError};
use crate::exec::Execution;

/// Largest supported matrix size.
pub const MAX_SIZE: usize = 64;
/// Relative extrapolation disagreement above which a stencil is rejected.
pub const STENCIL_LIMIT: f64 = 1e-6;
const MIN_STEP: f64 = 1e-4;
const MAX_STEP: f64 = 1e-1;

/// Eigendecomposition H = V Λ Vᵀ of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct MatrixFunctionCache {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl MatrixFunctionCache {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        let n = h.nrows();
        if n == 0 || n != h.ncols() || n > MAX_SIZE {
            return Err(ZetaError::domain(format!("matrix must be square with size 1..={MAX_SIZE}")));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(ZetaError::domain("matrix entries must be finite"));
        }
        let norm = h.norm();
        if (h - h.transpose()).norm() > 1e-14 * norm {
            return Err(ZetaError::domain("matrix must be symmetric"));
        }
        let eig = SymmetricEigen::new(h.clone());
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        if eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(ZetaError::domain("matrix must be positive definite"));
        }
        let cache = MatrixFunctionCache {
            eigenvalues,
            eigenvectors: eig.eigenvectors,
        };
        let recon = cache.apply(|l| l);
        if (&recon - h).norm() > 1e-12 * norm {
            return Err(ZetaError::domain("eigendecomposition failed to reconstruct the matrix"));
        }
        Ok(cache)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V f(Λ) Vᵀ.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            scaled.column_mut(j).scale_mut(w);
        }
        scaled * v.transpose()
    }

    /// H^x.
    pub fn power(&self, x: f64) -> DMatrix<f64> {
        self.apply(|l| l.powf(x))
    }

    pub fn log(&self) -> DMatrix<f64> {
        self.apply(f64::ln)
    }
}

/// H^{−m} = lim_{ε→0} dⁿ/dεⁿ [(1 + α₁ε + … + α_nεⁿ)(εⁿ/n!) H^{−ε−m}].
#[derive(Debug, Clone)]
pub struct ORProblem {
    pub cache: MatrixFunctionCache,
    pub m: u32,
    pub n: u32,
    pub alphas: Vec<f64>,
}

impl ORProblem {
    pub fn new(h: &DMatrix<f64>, m: u32, n: u32, alphas: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(ZetaError::domain("m and n must be positive"));
        }
        if alphas.len() != n as usize || alphas.iter().any(|a| !a.is_finite()) {
            return Err(ZetaError::domain(format!("expected {n} finite alphas")));
        }
        Ok(ORProblem {
            cache: MatrixFunctionCache::new(h)?,
            m,
            n,
            alphas,
        })
    }
}

/// Outcome of a regularized-limit evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ORResult {
    /// Richardson-extrapolated value from steps h and h/2.
    pub value: DMatrix<f64>,
    /// Plain central-stencil value at step h.
    pub raw: DMatrix<f64>,
    /// Twice the change of the extrapolated value when both steps are halved, plus rounding.
    pub err_estimate: f64,
}

/// Central finite-difference weights for the k-th derivative at 0 on the
/// nodes −K..=K, K = ⌈k/2⌉ (at least 1). Second order in the step.
pub fn central_weights(k: usize) -> Vec<f64> {
    let half = k.div_ceil(2).max(1);
    let n = 2 * half + 1;
    // Σ_j w_j x_j^d = k! δ_{dk}
    let vander = DMatrix::from_fn(n, n, |d, j| (j as f64 - half as f64).powi(d as i32));
    let mut rhs = nalgebra::DVector::zeros(n);
    rhs[k] = (1..=k).map(|v| v as f64).product();
    let w = vander.lu().solve(&rhs).expect("Vandermonde matrix on distinct nodes is invertible");
    // clean the rounding residue off exact zeros and exact symmetry
    w.iter().map(|&v| if v.abs() < 1e-12 { 0.0 } else { v }).collect()
}

/// k-th derivative at 0 of a matrix-valued function, with two-level Richardson.
fn derivative_at_zero<F>(k: usize, step: f64, floor: f64, exec: Execution, f: F) -> Result<ORResult>
where
    F: Fn(f64) -> DMatrix<f64> + Sync + Send,
{
    if !(MIN_STEP..=MAX_STEP).contains(&step) {
        return Err(ZetaError::domain(format!("eps_step must lie in [{MIN_STEP}, {MAX_STEP}]")));
    }
    let w = central_weights(k);
    let half = (w.len() - 1) / 2;
    let levels = [step, step / 2.0, step / 4.0];
    let nodes: Vec<(usize, usize)> = (0..levels.len())
        .flat_map(|l| (0..w.len()).filter(|&j| w[j] != 0.0).map(move |j| (l, j)))
        .collect();
    let values = exec.map(&nodes, |&(l, j)| f((j as f64 - half as f64) * levels[l]));
    let mut stencils: Vec<DMatrix<f64>> = Vec::new();
    let mut rounding = 0.0f64;
    for (l, h) in levels.iter().enumerate() {
        let mut acc: Option<DMatrix<f64>> = None;
        let mut mag = 0.0;
        for (&(nl, j), v) in nodes.iter().zip(&values) {
            if nl != l {
                continue;
            }
            mag += w[j].abs() * v.norm();
            let term = v * w[j];
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
        let scale = h.powi(k as i32);
        rounding = rounding.max(4.0 * f64::EPSILON * mag / scale);
        stencils.push(acc.expect("stencil has nodes") / scale);
    }
    let rich = |a: &DMatrix<f64>, b: &DMatrix<f64>| (b * 4.0 - a) / 3.0;
    let first = rich(&stencils[0], &stencils[1]);
    let second = rich(&stencils[1], &stencils[2]);
    let disagreement = 2.0 * (&first - &second).norm() + rounding;
    let limit = STENCIL_LIMIT * first.norm().max(floor);
    if !(disagreement <= limit) {
        return Err(ZetaError::StencilInstability { disagreement, limit });
    }
    Ok(ORResult {
        value: first,
        raw: stencils.swap_remove(0),
        err_estimate: disagreement,
    })
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn alpha_poly(alphas: &[f64], eps: f64) -> f64 {
    // 1 + α₁ε + … + α_nεⁿ by Horner
    alphas.iter().rev().fold(0.0, |acc, &a| (acc + a) * eps) + 1.0
}

/// The shared-H product H^{−ε−m₁} ⋯ H^{−ε−m_r} under the regularized limit;
/// approximates H^{−Σm_i}.
pub fn or_multi_power(
    cache: &MatrixFunctionCache,
    ms: &[u32],
    n: u32,
    alphas: &[f64],
    eps_step: f64,
    exec: Execution,
) -> Result<ORResult> {
    if ms.is_empty() || ms.contains(&0) || n == 0 {
        return Err(ZetaError::domain("need at least one exponent, all >= 1, and n >= 1"));
    }
    if alphas.len() != n as usize {
        return Err(ZetaError::domain(format!("expected {n} alphas")));
    }
    let nf = factorial(n);
    derivative_at_zero(n as usize, eps_step, 0.0, exec, |eps| {
        let mut prod = cache.power(-eps - ms[0] as f64);
        for &m in &ms[1..] {
            prod *= cache.power(-eps - m as f64);
        }
        prod * (alpha_poly(alphas, eps) * eps.powi(n as i32) / nf)
    })
}

pub fn or_regularized_power(prob: &ORProblem, eps_step: f64) -> Result<ORResult> {
    or_regularized_power_with(prob, eps_step, Execution::default())
}

pub fn or_regularized_power_with(prob: &ORProblem, eps_step: f64, exec: Execution) -> Result<ORResult> {
    or_multi_power(&prob.cache, &[prob.m], prob.n, &prob.alphas, eps_step, exec)
}

/// ln H = −lim_{ε→0} dⁿ/dεⁿ [(ε^{n−1}/n!) H^{−ε}].
pub fn schwinger_log(h: &DMatrix<f64>, n: u32, eps_step: f64) -> Result<ORResult> {
    schwinger_log_with(&MatrixFunctionCache::new(h)?, n, eps_step, Execution::default())
}

pub fn schwinger_log_with(cache: &MatrixFunctionCache, n: u32, eps_step: f64, exec: Execution) -> Result<ORResult> {
    if n == 0 {
        return Err(ZetaError::domain("loop order must be >= 1"));
    }
    let nf = factorial(n);
    // ln H carries no intrinsic scale (ln I = 0), so the limit has an absolute floor
    derivative_at_zero(n as usize, eps_step, 1.0, exec, |eps| {
        cache.power(-eps) * (-eps.powi(n as i32 - 1) / nf)
    })
}

/// Both sides of H^{−m} = ((−1)^{m−1}/(m−1)!) dᵐ/dHᵐ ln H for diagonal H.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeResult {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub err_estimate: Vec<f64>,
}

pub fn feynman_schwinger_bridge(h: &DMatrix<f64>, m: u32) -> Result<BridgeResult> {
    if m == 0 {
        return Err(ZetaError::domain("m must be >= 1"));
    }
    let n = h.nrows();
    if n == 0 || n != h.ncols() || n > MAX_SIZE {
        return Err(ZetaError::domain("matrix must be square"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && h[(i, j)] != 0.0 {
                return Err(ZetaError::domain("feynman_schwinger_bridge requires a diagonal matrix"));
            }
        }
        if !(h[(i, i)] > 0.0) {
            return Err(ZetaError::domain("diagonal entries must be positive"));
        }
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let pref = sign / factorial(m - 1);
    // dᵐ/dxᵐ ln(λ(1+x)) at 0 equals λᵐ dᵐ/dhᵐ ln h at h = λ. The constant ln λ
    // is annihilated by the stencil, so one derivative of ln(1+x) serves every λ.
    // The usable step window narrows quickly with m; scan it and keep the best.
    let mut best: Option<ORResult> = None;
    let mut last_err = None;
    let mut step = MAX_STEP;
    while step >= MIN_STEP {
        match derivative_at_zero(m as usize, step, 0.0, Execution::Sequential, |x| {
            DMatrix::from_element(1, 1, x.ln_1p())
        }) {
            Ok(r) if best.as_ref().is_none_or(|b| r.err_estimate < b.err_estimate) => best = Some(r),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
        step *= 0.5;
    }
    let r = match (best, last_err) {
        (Some(r), _) => r,
        (None, Some(e)) => return Err(e),
        (None, None) => unreachable!("the step ladder is non-empty"),
    };
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut errs = Vec::with_capacity(n);
    for i in 0..n {
        let scale = h[(i, i)].powi(-(m as i32));
        lhs.push(scale);
        rhs.push(pref * r.value[(0, 0)] * scale);
        errs.push(pref.abs() * r.err_estimate * scale);
    }
    Ok(BridgeResult {
        lhs,
        rhs,
        err_estimate: errs,
    })
}

/// Laurent coefficients c_k of ε ↦ Tr[(εⁿ/n!) H^{−ε−m}]·ε^{−n}, i.e. of
/// Tr H^{−ε−m}/n!, for k = −n..=0. In finite dimension the function is entire
/// and the pole coefficients vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentReport {
    /// (k, c_k) for k = −n..=0.
    pub coefficients: Vec<(i32, f64)>,
    /// Contour radius used for the extraction.
    pub radius: f64,
    /// Largest |c_k| with k < 0.
    pub max_pole_coefficient: f64,
}

pub fn laurent_report(prob: &ORProblem) -> LaurentReport {
    let radius = 0.5;
    let nodes = 64;
    let nf = factorial(prob.n);
    let g = |eps: Complex64| -> Complex64 {
        prob.cache
            .eigenvalues()
            .iter()
            .map(|&l| (-(eps + prob.m as f64) * l.ln()).exp())
            .sum::<Complex64>()
            / nf
    };
    let samples: Vec<(Complex64, Complex64)> = (0..nodes)
        .map(|j| {
            let z = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / nodes as f64);
            (z, g(z))
        })
        .collect();
    let mut coefficients = Vec::new();
    let mut max_pole: f64 = 0.0;
    for k in -(prob.n as i32)..=0 {
        // c_k = (1/2πi) ∮ g(ε) ε^{−k−1} dε, trapezoid on the circle
        let c: Complex64 = samples.iter().map(|&(z, v)| v * z.powi(-k)).sum::<Complex64>() / nodes as f64;
        if k < 0 {
            max_pole = max_pole.max(c.norm());
        }
        coefficients.push((k, c.re));
    }
    LaurentReport {
        coefficients,
        radius,
        max_pole_coefficient: max_pole,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: u64) -> DMatrix<f64> {
        // deterministic well-conditioned SPD matrix
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b = DMatrix::from_fn(n, n, |_, _| next());
        &b * b.transpose() / n as f64 + DMatrix::identity(n, n)
    }

    #[test]
    fn weights() {
        let cases: [&[f64]; 3] = [&[-0.5, 0.0, 0.5], &[1.0, -2.0, 1.0], &[-0.5, 1.0, 0.0, -1.0, 0.5]];
        for (k, expect) in cases.iter().enumerate() {
            let w = central_weights(k + 1);
            assert_eq!(w.len(), expect.len());
            for (a, b) in w.iter().zip(expect.iter()) {
                assert!((a - b).abs() < 1e-14, "{k}: {w:?}");
            }
        }
    }

    #[test]
    fn diagonal_first_order() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        for alpha in [0.0, 17.0] {
            let prob = ORProblem::new(&h, 1, 1, vec![alpha]).unwrap();
            let r = or_regularized_power(&prob, 1e-2).unwrap();
            let err = (r.value[(0, 0)] - 0.5).abs().max((r.value[(1, 1)] - 1.0 / 3.0).abs());
            assert!(err <= r.err_estimate && err < 1e-8, "{err} {}", r.err_estimate);
            assert!(r.value[(0, 1)].abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_random() {
        let h = spd(8, 3);
        let cache = MatrixFunctionCache::new(&h).unwrap();
        let exact = cache.power(-2.0);
        let prob = ORProblem::new(&h, 2, 2, vec![17.0, -3.0]).unwrap();
        let r = or_regularized_power(&prob, 1e-2).unwrap();
        assert!((&r.value - &exact).norm() / exact.norm() < 1e-6);
    }

    #[test]
    fn multi_power() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        let cache = MatrixFunctionCache::new(&h).unwrap();
        let r = or_multi_power(&cache, &[1, 1], 1, &[0.0], 1e-2, Execution::Sequential).unwrap();
        assert!((r.value[(0, 0)] - 0.25).abs() < 1e-9 && (r.value[(1, 1)] - 1.0 / 9.0).abs() < 1e-9);
        let prob = ORProblem::new(&h, 2, 2, vec![0.3, 0.1]).unwrap();
        let single = or_regularized_power_with(&prob, 1e-2, Execution::Sequential).unwrap();
        let multi = or_multi_power(&prob.cache, &[2], 2, &prob.alphas, 1e-2, Execution::Sequential).unwrap();
        assert_eq!(single, multi);
    }

    #[test]
    fn schwinger() {
        let h = DMatrix::from_element(1, 1, 2.0);
        let r = schwinger_log(&h, 1, 1e-2).unwrap();
        assert!((r.value[(0, 0)] - 2f64.ln()).abs() < 1e-10);
        let r = schwinger_log(&DMatrix::identity(3, 3), 2, 1e-2).unwrap();
        assert!(r.value.norm() < 1e-12);
        let h = spd(8, 5);
        let exact = MatrixFunctionCache::new(&h).unwrap().log();
        let r = schwinger_log(&h, 2, 1e-2).unwrap();
        assert!((&r.value - &exact).norm() / exact.norm() < 1e-6);
    }

    #[test]
    fn bridge() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0, 7.0]));
        let b = feynman_schwinger_bridge(&h, 2).unwrap();
        for (l, r) in b.lhs.iter().zip(&b.rhs) {
            assert!((l - r).abs() < 1e-8 * l);
        }
        let b = feynman_schwinger_bridge(&DMatrix::from_element(1, 1, 5.0), 3).unwrap();
        let d = (b.rhs[0] - 1.0 / 125.0).abs();
        assert!(d <= b.err_estimate[0] && d < 1e-6 / 125.0, "{d} {}", b.err_estimate[0]);
        assert!(feynman_schwinger_bridge(&spd(3, 1), 1).is_err());
    }

    #[test]
    fn laurent_poles_vanish() {
        let prob = ORProblem::new(&spd(4, 9), 1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let rep = laurent_report(&prob);
        assert!(rep.max_pole_coefficient < 1e-14);
        let c0 = rep.coefficients.last().unwrap().1;
        let tr: f64 = prob.cache.eigenvalues().iter().map(|l| 1.0 / l).sum::<f64>() / 6.0;
        assert!((c0 - tr).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        let h = DMatrix::from_element(1, 1, 2.0);
        let prob = ORProblem::new(&h, 1, 1, vec![0.0]).unwrap();
        assert!(or_regularized_power(&prob, 0.5).is_err());
        assert!(ORProblem::new(&h, 1, 2, vec![0.0]).is_err());
        assert!(MatrixFunctionCache::new(&DMatrix::from_element(1, 1, -1.0)).is_err());
    }
}
