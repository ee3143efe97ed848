//! Spectral zeta functions continued through the heat trace.
//!
//! For θ(t) = Σ d_k e^{−tλ_k} with small-t expansion θ ~ Σ_j c_j t^{α_j},
//!
//! ζ(s) = 1/Γ(s) [ ∫_τ^∞ t^{s−1} θ dt + Σ_j c_j τ^{s+α_j}/(s+α_j)
//!                 + ∫_0^τ t^{s−1} (θ − Σ_j c_j t^{α_j}) dt ]
//!
//! for any split point τ > 0. Both integrals are done by adaptive quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZetaError};
use crate::lattice::{for_each_shell_vector, real_pow_neg, shell_size, QuadraticFormSpec};
use crate::specfun::gamma::{digamma_real, gamma_real, rgamma, EULER_GAMMA};
use crate::specfun::quad;
use crate::types::{AccuracyTarget, ZetaValue};

/// One term c t^α of the small-t heat-trace expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTerm {
    pub alpha: f64,
    pub coeff: f64,
}

/// Eigenvalue generator: index k ↦ (λ_k, d_k), non-decreasing in λ.
pub type EigenGenerator = Arc<dyn Fn(u64) -> (f64, u64) + Send + Sync>;

#[derive(Clone)]
enum Family {
    Finite(Vec<(f64, u64)>),
    /// weight · (Σ_{n ∈ Z^p} e^{−t(Q(n)+q)} − drop · e^{−tq})
    Torus {
        form: QuadraticFormSpec,
        q: f64,
        weight: f64,
        drop_origin: bool,
    },
    /// Σ_{n ∈ Z^p} e^{−t(Q(n)+q1)(Q(n)+q2)}
    Product { form: QuadraticFormSpec, q1: f64, q2: f64 },
    Generator(EigenGenerator),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Finite(v) => f.debug_tuple("Finite").field(v).finish(),
            Family::Torus {
                form,
                q,
                weight,
                drop_origin,
            } => f
                .debug_struct("Torus")
                .field("form", form)
                .field("q", q)
                .field("weight", weight)
                .field("drop_origin", drop_origin)
                .finish(),
            Family::Product { form, q1, q2 } => f
                .debug_struct("Product")
                .field("form", form)
                .field("q1", q1)
                .field("q2", q2)
                .finish(),
            Family::Generator(_) => f.write_str("Generator"),
        }
    }
}

/// Default depth of the generated heat expansions.
pub const DEFAULT_HEAT_DEPTH: f64 = 6.0;

/// A spectrum together with its heat-trace expansion.
#[derive(Debug, Clone)]
pub struct SpectrumModel {
    family: Family,
    heat: Vec<HeatTerm>,
    /// θ − Σ c_j t^{α_j} = O(t^{remainder_order}).
    remainder_order: f64,
    lambda0: f64,
}

impl SpectrumModel {
    /// A finite spectrum of (eigenvalue, multiplicity) pairs, evaluated exactly.
    pub fn finite(pairs: &[(f64, u64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(ZetaError::domain("empty spectrum"));
        }
        for &(l, d) in pairs {
            if !(l > 0.0) || !l.is_finite() || d == 0 {
                return Err(ZetaError::domain(format!("invalid eigenvalue {l} with multiplicity {d}")));
            }
        }
        let mut v = pairs.to_vec();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let lambda0 = v[0].0;
        Ok(SpectrumModel {
            family: Family::Finite(v),
            heat: Vec::new(),
            remainder_order: f64::INFINITY,
            lambda0,
        })
    }

    /// λ_k = a k² + q for k ≥ 1, each with multiplicity one.
    pub fn half_line_squares(a: f64, q: f64) -> Result<Self> {
        if !(a > 0.0) || !q.is_finite() || !(a + q > 0.0) {
            return Err(ZetaError::domain("half-line spectrum needs a > 0 and a + q > 0"));
        }
        let form = QuadraticFormSpec::scalar(2.0 * a)?;
        Ok(Self::torus_family(form, q, 0.5, true, DEFAULT_HEAT_DEPTH, a + q))
    }

    /// λ_n = ½nᵀAn + q over n ∈ Z^p; the zero mode is dropped when q = 0.
    pub fn torus(form: &QuadraticFormSpec, q: f64) -> Result<Self> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(ZetaError::domain("torus spectrum needs q >= 0"));
        }
        let drop = q == 0.0;
        let lambda0 = if drop { lowest_nonzero(form) } else { q };
        Ok(Self::torus_family(form.clone(), q, 1.0, drop, DEFAULT_HEAT_DEPTH, lambda0))
    }

    /// λ_n = (½nᵀAn + q1)(½nᵀAn + q2) over n ∈ Z^p.
    pub fn torus_product(form: &QuadraticFormSpec, q1: f64, q2: f64) -> Result<Self> {
        if !(q1 > 0.0 && q2 > 0.0) || !(q1 * q2).is_finite() {
            return Err(ZetaError::domain("product spectrum needs q1, q2 > 0"));
        }
        let (heat, remainder_order) = product_heat(form, q1, q2, DEFAULT_HEAT_DEPTH);
        Ok(SpectrumModel {
            family: Family::Product {
                form: form.clone(),
                q1,
                q2,
            },
            heat,
            remainder_order,
            lambda0: q1 * q2,
        })
    }

    /// An arbitrary non-decreasing generator with caller-supplied heat terms.
    ///
    /// `remainder_order` is the exponent β with θ − Σ c_j t^{α_j} = O(t^β).
    pub fn from_generator(generator: EigenGenerator, heat: Vec<HeatTerm>, remainder_order: f64) -> Result<Self> {
        check_heat(&heat, remainder_order)?;
        let (lambda0, d0) = generator(0);
        if !(lambda0 > 0.0) || d0 == 0 {
            return Err(ZetaError::domain("lowest eigenvalue must be positive"));
        }
        Ok(SpectrumModel {
            family: Family::Generator(generator),
            heat,
            remainder_order,
            lambda0,
        })
    }

    /// Regenerates the heat expansion of a built-in family up to exponent `alpha_max`.
    pub fn with_heat_depth(self, alpha_max: f64) -> Self {
        match &self.family {
            Family::Torus {
                form,
                q,
                weight,
                drop_origin,
            } => Self::torus_family(form.clone(), *q, *weight, *drop_origin, alpha_max, self.lambda0),
            Family::Product { form, q1, q2 } => {
                let (heat, remainder_order) = product_heat(form, *q1, *q2, alpha_max);
                SpectrumModel {
                    heat,
                    remainder_order,
                    ..self
                }
            }
            _ => self,
        }
    }

    fn torus_family(form: QuadraticFormSpec, q: f64, weight: f64, drop: bool, alpha_max: f64, lambda0: f64) -> Self {
        let (heat, remainder_order) = torus_heat(&form, q, weight, drop, alpha_max);
        SpectrumModel {
            family: Family::Torus {
                form,
                q,
                weight,
                drop_origin: drop,
            },
            heat,
            remainder_order,
            lambda0,
        }
    }

    pub fn heat_terms(&self) -> &[HeatTerm] {
        &self.heat
    }

    pub fn remainder_order(&self) -> f64 {
        self.remainder_order
    }

    pub fn lowest_eigenvalue(&self) -> f64 {
        self.lambda0
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.family, Family::Finite(_))
    }

    /// Distinct eigenvalues not exceeding `lambda_max`, ascending, with multiplicities.
    pub fn eigenvalues_up_to(&self, lambda_max: f64) -> Vec<(f64, u64)> {
        let mut out: Vec<(f64, u64)> = Vec::new();
        match &self.family {
            Family::Finite(v) => out.extend(v.iter().copied().filter(|e| e.0 <= lambda_max)),
            Family::Generator(g) => {
                let mut k = 0;
                loop {
                    let (l, d) = g(k);
                    if l > lambda_max || k > 100_000_000 {
                        break;
                    }
                    out.push((l, d));
                    k += 1;
                }
            }
            _ => {
                let p = self.lattice_dim();
                let mut r = 0i64;
                while self.shell_lower_bound(r) <= lambda_max {
                    for_each_shell_vector(p, r, |n| {
                        if let Some(l) = self.lattice_eigenvalue(n) {
                            if l <= lambda_max {
                                out.push((l, 1));
                            }
                        }
                    });
                    r += 1;
                }
                if let Family::Torus { weight, .. } = self.family {
                    if weight < 1.0 {
                        // half-line: keep the k ≥ 1 representatives
                        out.iter_mut().for_each(|e| e.1 = 1);
                        out.sort_by(|a, b| a.0.total_cmp(&b.0));
                        out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * b.0);
                        return out;
                    }
                }
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut grouped: Vec<(f64, u64)> = Vec::new();
        for (l, d) in out {
            match grouped.last_mut() {
                Some(last) if (l - last.0).abs() <= 1e-12 * last.0 => last.1 += d,
                _ => grouped.push((l, d)),
            }
        }
        grouped
    }

    fn lattice_dim(&self) -> usize {
        match &self.family {
            Family::Torus { form, .. } | Family::Product { form, .. } => form.dim(),
            _ => 0,
        }
    }

    fn lattice_eigenvalue(&self, n: &[i64]) -> Option<f64> {
        let x: Vec<f64> = n.iter().map(|&v| v as f64).collect();
        match &self.family {
            Family::Torus { form, q, drop_origin, .. } => {
                if *drop_origin && n.iter().all(|&v| v == 0) {
                    None
                } else {
                    Some(form.eval(&x) + q)
                }
            }
            Family::Product { form, q1, q2 } => {
                let m = form.eval(&x);
                Some((m + q1) * (m + q2))
            }
            _ => None,
        }
    }

    /// Lower bound on the eigenvalues of the max-norm shell r.
    fn shell_lower_bound(&self, r: i64) -> f64 {
        let r2 = (r * r) as f64;
        match &self.family {
            Family::Torus { form, q, .. } => 0.5 * form.eig_min() * r2 + q,
            Family::Product { form, q1, q2 } => {
                let m = 0.5 * form.eig_min() * r2;
                (m + q1) * (m + q2)
            }
            _ => self.lambda0,
        }
    }

    /// θ(t) summed directly over the spectrum.
    pub fn heat_trace(&self, t: f64) -> f64 {
        match &self.family {
            Family::Finite(v) => v.iter().map(|&(l, d)| d as f64 * (-t * l).exp()).sum(),
            Family::Generator(g) => {
                let mut total = 0.0;
                let mut k = 0u64;
                loop {
                    let (l, d) = g(k);
                    let v = d as f64 * (-t * l).exp();
                    total += v;
                    k += 1;
                    if (v <= 1e-18 * total && t * (l - self.lambda0) > 40.0) || v == 0.0 || k > 100_000_000 {
                        break;
                    }
                }
                total
            }
            Family::Torus { weight, .. } => weight * self.lattice_heat(t),
            Family::Product { .. } => self.lattice_heat(t),
        }
    }

    fn lattice_heat(&self, t: f64) -> f64 {
        let p = self.lattice_dim();
        let mut total = 0.0;
        let mut r = 0i64;
        loop {
            let mut shell = 0.0;
            for_each_shell_vector(p, r, |n| {
                if let Some(l) = self.lattice_eigenvalue(n) {
                    shell += (-t * l).exp();
                }
            });
            total += shell;
            r += 1;
            let next = shell_size(p, r as u64) as f64 * (-t * self.shell_lower_bound(r)).exp();
            let after = shell_size(p, r as u64 + 1) as f64 * (-t * self.shell_lower_bound(r + 1)).exp();
            if next <= 1e-18 * total && after <= 0.5 * next {
                break;
            }
            if total == 0.0 && next == 0.0 {
                break;
            }
        }
        total
    }

    /// θ(t) − Σ_j c_j t^{α_j}.
    pub fn heat_remainder(&self, t: f64) -> f64 {
        match &self.family {
            Family::Torus {
                form,
                q,
                weight,
                drop_origin,
            } => torus_remainder(form, *q, *weight, *drop_origin, &self.heat, t),
            _ => {
                let asym: f64 = self.heat.iter().map(|h| h.coeff * t.powf(h.alpha)).sum();
                self.heat_trace(t) - asym
            }
        }
    }
}

fn check_heat(heat: &[HeatTerm], remainder_order: f64) -> Result<()> {
    for w in heat.windows(2) {
        if !(w[1].alpha > w[0].alpha) {
            return Err(ZetaError::domain("heat exponents must be strictly increasing"));
        }
    }
    if heat.iter().any(|h| !h.alpha.is_finite() || !h.coeff.is_finite()) {
        return Err(ZetaError::domain("heat terms must be finite"));
    }
    if let Some(last) = heat.last() {
        if !(remainder_order > last.alpha) {
            return Err(ZetaError::domain("remainder order must exceed the last heat exponent"));
        }
    }
    Ok(())
}

fn lowest_nonzero(form: &QuadraticFormSpec) -> f64 {
    // shells up to r = 2 contain the shortest vector for reasonably reduced forms;
    // the eigenvalue bound guards the rest
    let p = form.dim();
    let mut best = f64::INFINITY;
    let mut r = 1i64;
    while 0.5 * form.eig_min() * (r * r) as f64 <= best {
        for_each_shell_vector(p, r, |n| {
            let x: Vec<f64> = n.iter().map(|&v| v as f64).collect();
            best = best.min(form.eval(&x));
        });
        r += 1;
    }
    best
}

fn factorial(j: u32) -> f64 {
    (1..=j).map(f64::from).product()
}

/// Number of Taylor terms j with j + offset ≤ alpha_max.
fn taylor_count(offset: f64, alpha_max: f64) -> u32 {
    let n = (alpha_max - offset + 1e-12).floor() + 1.0;
    if n < 0.0 {
        0
    } else {
        n as u32
    }
}

fn torus_heat(form: &QuadraticFormSpec, q: f64, weight: f64, drop: bool, alpha_max: f64) -> (Vec<HeatTerm>, f64) {
    let p = form.dim() as f64;
    let kappa = (2.0 * PI).powf(p / 2.0) / form.det().sqrt();
    let mut terms: Vec<HeatTerm> = Vec::new();
    let mut push = |alpha: f64, coeff: f64| {
        if coeff == 0.0 {
            return;
        }
        match terms.iter_mut().find(|h| (h.alpha - alpha).abs() < 1e-12) {
            Some(h) => h.coeff += coeff,
            None => terms.push(HeatTerm { alpha, coeff }),
        }
    };
    let n_bulk = taylor_count(-p / 2.0, alpha_max);
    for j in 0..n_bulk {
        push(j as f64 - p / 2.0, weight * kappa * (-q).powi(j as i32) / factorial(j));
    }
    let n_origin = if drop { taylor_count(0.0, alpha_max) } else { 0 };
    for j in 0..n_origin {
        push(j as f64, -weight * (-q).powi(j as i32) / factorial(j));
    }
    terms.retain(|h| h.coeff != 0.0);
    terms.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let order = if q == 0.0 {
        f64::INFINITY
    } else {
        let mut o = n_bulk as f64 - p / 2.0;
        if drop {
            o = o.min(n_origin as f64);
        }
        o
    };
    (terms, order)
}

/// Σ_{j ≥ n} (−x)^j / j!.
fn taylor_tail(x: f64, n: u32) -> f64 {
    let mut term = 1.0;
    for j in 1..=n {
        term *= -x / j as f64;
    }
    let mut sum = 0.0;
    let mut j = n;
    loop {
        sum += term;
        j += 1;
        term *= -x / j as f64;
        if (j as f64 > x && term.abs() <= 1e-18 * sum.abs()) || term == 0.0 || j > 2000 {
            break;
        }
    }
    sum
}

/// Remainder of the torus families through the dual lattice, free of cancellation.
fn torus_remainder(form: &QuadraticFormSpec, q: f64, weight: f64, drop: bool, heat: &[HeatTerm], t: f64) -> f64 {
    let p = form.dim();
    let pf = p as f64;
    let kappa = (2.0 * PI).powf(pf / 2.0) / form.det().sqrt();
    // heat terms are generated contiguously, so the counts follow from the max exponent
    let alpha_max = heat.last().map_or(-pf, |h| h.alpha);
    let n_bulk = taylor_count(-pf / 2.0, alpha_max);
    let n_origin = taylor_count(0.0, alpha_max);
    let mut dual = 0.0;
    let mut r = 1i64;
    loop {
        let mut shell = 0.0;
        for_each_shell_vector(p, r, |m| {
            let x: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            shell += (-2.0 * PI * PI * form.inverse_norm2(&x) / t).exp();
        });
        dual += shell;
        r += 1;
        // mᵀA⁻¹m ≥ |m|²/λmax(A)
        let bound = shell_size(p, r as u64) as f64 * (-2.0 * PI * PI * (r * r) as f64 / (form.eig_max() * t)).exp();
        if bound <= 1e-18 * dual.abs().max(1e-300) || bound == 0.0 || (dual == 0.0 && r > 2) {
            break;
        }
    }
    let bulk = kappa * t.powf(-pf / 2.0) * (taylor_tail(t * q, n_bulk) + (-t * q).exp() * dual);
    let origin = if drop { taylor_tail(t * q, n_origin) } else { 0.0 };
    weight * (bulk - origin)
}

fn product_heat(form: &QuadraticFormSpec, q1: f64, q2: f64, alpha_max: f64) -> (Vec<HeatTerm>, f64) {
    let p = form.dim() as f64;
    let b = q1 + q2;
    let c = q1 * q2;
    // ∫ e^{−t(|y|⁴ + B|y|² + C)} dy, with dx = 2^{p/2}/√det A dy
    let sphere = 2.0 * PI.powf(p / 2.0) / gamma_real(p / 2.0).unwrap_or(f64::NAN);
    let pref = 2f64.powf(p / 2.0) / form.det().sqrt() * sphere / 4.0;
    let kmax = ((alpha_max + p / 4.0) * 2.0 + 1e-12).floor().max(0.0) as u32;
    let mut terms = Vec::new();
    for k in 0..=kmax {
        let mut coeff = 0.0;
        let mut l = 0;
        while 2 * l <= k {
            let i = k - 2 * l;
            let g = gamma_real((p + 2.0 * i as f64) / 4.0).unwrap_or(f64::NAN);
            coeff += g * (-b).powi(i as i32) * (-c).powi(l as i32) / (factorial(i) * factorial(l));
            l += 1;
        }
        if coeff != 0.0 {
            terms.push(HeatTerm {
                alpha: -p / 4.0 + k as f64 / 2.0,
                coeff: pref * coeff,
            });
        }
    }
    (terms, -p / 4.0 + (kmax + 1) as f64 / 2.0)
}

/// Quadrature settings of the Mellin split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinOptions {
    /// Split point τ; `None` picks min(1, 1/λ₀).
    pub split: Option<f64>,
    /// Smallest lower limit tried for the small-t integral.
    pub t_floor: f64,
    pub max_intervals: usize,
}

impl Default for MellinOptions {
    fn default() -> Self {
        MellinOptions {
            split: None,
            t_floor: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Piece {
    value: Complex64,
    err: f64,
}

fn quad_tol(acc: &AccuracyTarget) -> f64 {
    (0.1 * acc.rel_tol).max(3e-15)
}

fn split_point(spec: &SpectrumModel, opts: &MellinOptions) -> Result<f64> {
    let tau = opts.split.unwrap_or_else(|| (1.0 / spec.lambda0).min(1.0));
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(ZetaError::domain("split point must be positive"));
    }
    Ok(tau)
}

/// ∫_τ^∞ t^{s−1} θ(t) dt.
fn large_t(spec: &SpectrumModel, s: Complex64, tau: f64, acc: &AccuracyTarget, opts: &MellinOptions) -> Result<Piece> {
    let l0 = spec.lambda0;
    let sig = s.re;
    let grow = (sig - 1.0).max(0.0);
    let width = 2.0 / l0;
    let mut end = tau + (45.0 + 2.0 * grow * (2.0 + grow).ln()) / l0;
    if grow > 0.0 {
        end = end.max(tau + 3.0 * grow / l0);
    }
    let chunks = (((end - tau) / width).ceil() as usize).clamp(1, 256);
    let h = (end - tau) / chunks as f64;
    let tol = quad_tol(acc);
    let parts = acc.exec.map_range(chunks, |i| {
        let a = tau + i as f64 * h;
        let b = if i + 1 == chunks { end } else { a + h };
        quad::integrate(
            |t| real_pow_neg(t, Complex64::new(1.0, 0.0) - s) * spec.heat_trace(t),
            a,
            b,
            tol,
            acc.abs_floor,
            opts.max_intervals,
        )
    });
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for r in &parts {
        if !r.converged {
            return Err(ZetaError::NonConvergence {
                terms: r.intervals,
                estimate: r.err,
            });
        }
        value += r.value;
        err += r.err;
    }
    // θ(t) ≤ θ(T) e^{−λ₀(t−T)} beyond T
    let rate = l0 - grow / end;
    let tail = if rate > 0.0 {
        spec.heat_trace(end) * end.powf(sig - 1.0) / rate
    } else {
        f64::INFINITY
    };
    Ok(Piece { value, err: err + tail })
}

/// ∫_0^τ t^{s−1} (θ − Σ c_j t^{α_j}) dt, integrated in u = ln t.
fn small_t(spec: &SpectrumModel, s: Complex64, tau: f64, acc: &AccuracyTarget, opts: &MellinOptions) -> Result<Piece> {
    let sig = s.re;
    let beta = spec.remainder_order;
    let tol = quad_tol(acc);
    let neglected = |t: f64| -> f64 {
        let r = spec.heat_remainder(t).abs();
        if beta.is_infinite() {
            r * t.powf(sig)
        } else {
            r * t.powf(sig) / (beta + sig)
        }
    };
    let mut t_min = tau * 1e-2;
    let mut est = neglected(t_min);
    while t_min > opts.t_floor {
        let cand = t_min * 0.1;
        let next = neglected(cand);
        if !(next < est) {
            break;
        }
        t_min = cand;
        est = next;
        if est <= 1e-3 * tol * acc.abs_floor.max(1e-300) {
            break;
        }
    }
    let (ua, ub) = (t_min.ln(), tau.ln());
    let chunks = ((ub - ua).ceil() as usize).clamp(1, 64);
    let h = (ub - ua) / chunks as f64;
    let parts = acc.exec.map_range(chunks, |i| {
        let a = ua + i as f64 * h;
        let b = if i + 1 == chunks { ub } else { a + h };
        // the remainder of a subtracted expansion carries roundoff of the size of its terms
        let noise = if matches!(spec.family, Family::Torus { .. }) {
            0.0
        } else {
            let size = |u: f64| {
                let t = u.exp();
                t.powf(sig) * spec.heat.iter().map(|h| (h.coeff * t.powf(h.alpha)).abs()).sum::<f64>()
            };
            64.0 * f64::EPSILON * (b - a) * size(a).max(size(b))
        };
        quad::integrate(
            |u| (s * u).exp() * spec.heat_remainder(u.exp()),
            a,
            b,
            tol,
            acc.abs_floor.max(noise),
            opts.max_intervals,
        )
    });
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for r in &parts {
        if !r.converged {
            return Err(ZetaError::NonConvergence {
                terms: r.intervals,
                estimate: r.err,
            });
        }
        value += r.value;
        err += r.err;
    }
    Ok(Piece { value, err: err + est })
}

fn check_coverage(spec: &SpectrumModel, s: Complex64) -> Result<()> {
    let covered = -spec.remainder_order;
    if !(s.re > covered) {
        return Err(ZetaError::InsufficientHeatDepth {
            covered,
            requested: s.re,
        });
    }
    Ok(())
}

/// Γ(s)ζ(s) from the Mellin split, leaving out heat terms with exponent `skip`.
fn mellin_sum(
    spec: &SpectrumModel,
    s: Complex64,
    tau: f64,
    acc: &AccuracyTarget,
    opts: &MellinOptions,
    skip: Option<f64>,
) -> Result<(Complex64, f64)> {
    let pieces = acc.exec.map_range(2, |i| {
        if i == 0 {
            large_t(spec, s, tau, acc, opts)
        } else {
            small_t(spec, s, tau, acc, opts)
        }
    });
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in pieces {
        let p = p?;
        total += p.value;
        err += p.err;
    }
    let mut heat_abs = 0.0;
    for h in &spec.heat {
        if Some(h.alpha) == skip {
            continue;
        }
        let z = s + h.alpha;
        let t = real_pow_neg(tau, -z) * h.coeff / z;
        heat_abs += t.norm();
        total += t;
    }
    Ok((total, err + 4.0 * f64::EPSILON * heat_abs))
}

/// Spectral zeta function Σ d_k λ_k^{−s}, continued through the Mellin split.
pub fn spectral_zeta_mellin(spec: &SpectrumModel, s: Complex64, acc: &AccuracyTarget) -> Result<ZetaValue> {
    spectral_zeta_mellin_with(spec, s, acc, &MellinOptions::default())
}

pub fn spectral_zeta_mellin_with(
    spec: &SpectrumModel,
    s: Complex64,
    acc: &AccuracyTarget,
    opts: &MellinOptions,
) -> Result<ZetaValue> {
    acc.validate()?;
    if !s.is_finite() {
        return Err(ZetaError::domain("s must be finite"));
    }
    if let Family::Finite(v) = &spec.family {
        let mut total = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for &(l, d) in v {
            let t = real_pow_neg(l, s) * d as f64;
            abs += t.norm();
            total += t;
        }
        return Ok(ZetaValue::new(total, 4.0 * f64::EPSILON * abs));
    }
    check_coverage(spec, s)?;
    let rg = rgamma(s);
    // exact heat poles
    for h in &spec.heat {
        let loc = Complex64::new(-h.alpha, 0.0);
        if s == loc {
            if rg == Complex64::new(0.0, 0.0) {
                // 1/Γ(s) ≈ (−1)^k k! (s + k) cancels the pole
                let k = h.alpha.round() as u32;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let v = sign * factorial(k) * h.coeff;
                return Ok(ZetaValue::new(Complex64::new(v, 0.0), 4.0 * f64::EPSILON * v.abs()));
            }
            return Err(ZetaError::Pole {
                location: loc,
                residue: rg * h.coeff,
            });
        }
    }
    if rg == Complex64::new(0.0, 0.0) {
        return Ok(ZetaValue::new(Complex64::new(0.0, 0.0), 0.0));
    }
    let tau = split_point(spec, opts)?;
    let (total, err) = mellin_sum(spec, s, tau, acc, opts, None)?;
    let mut out = ZetaValue::new(rg * total, rg.norm() * err + 4.0 * f64::EPSILON * (rg * total).norm());
    for h in &spec.heat {
        let loc = Complex64::new(-h.alpha, 0.0);
        let r = rgamma(loc);
        if r != Complex64::new(0.0, 0.0) {
            out = out.flag_pole(s, loc, r * h.coeff);
        }
    }
    Ok(out)
}

/// Finite part of ζ at a real point, with the residue when s is a pole.
///
/// Near a pole s₀ = −α the heat term gives c/Γ(s)·τ^{s−s₀}/(s−s₀), so
/// FP = [G(s₀) + c ln τ]/Γ(s₀) + c (1/Γ)′(s₀) with (1/Γ)′ = −ψ/Γ.
pub fn spectral_zeta_finite_part(spec: &SpectrumModel, s: f64, acc: &AccuracyTarget) -> Result<(ZetaValue, Option<f64>)> {
    let z = Complex64::new(s, 0.0);
    let at_pole = spec.heat.iter().any(|h| -h.alpha == s);
    if !at_pole || spec.is_finite() || rgamma(z) == Complex64::new(0.0, 0.0) {
        return spectral_zeta_mellin(spec, z, acc).map(|v| (v, None));
    }
    acc.validate()?;
    check_coverage(spec, z)?;
    let opts = MellinOptions::default();
    let tau = split_point(spec, &opts)?;
    let (g, err) = mellin_sum(spec, z, tau, acc, &opts, Some(-s))?;
    let c: f64 = spec.heat.iter().filter(|h| -h.alpha == s).map(|h| h.coeff).sum();
    let rg = rgamma(z).re;
    let psi = digamma_real(s)?;
    let fp = rg * (g.re + c * tau.ln()) - c * psi * rg;
    let err = rg.abs() * err + 8.0 * f64::EPSILON * (fp.abs() + (c * psi * rg).abs());
    Ok((ZetaValue::new(Complex64::new(fp, g.im * rg), err), Some(rg * c)))
}

/// ζ′(0) and its error estimate.
///
/// With F(s) = Γ(s)ζ(s) = c₀/s + G(s) and 1/Γ(s) = s + γs² + …, ζ′(0) = γc₀ + G(0).
pub fn zeta_prime_at_zero(spec: &SpectrumModel, acc: &AccuracyTarget) -> Result<(f64, f64)> {
    zeta_prime_at_zero_with(spec, acc, &MellinOptions::default())
}

pub fn zeta_prime_at_zero_with(spec: &SpectrumModel, acc: &AccuracyTarget, opts: &MellinOptions) -> Result<(f64, f64)> {
    acc.validate()?;
    if let Family::Finite(v) = &spec.family {
        let mut total = 0.0;
        let mut abs = 0.0;
        for &(l, d) in v {
            let t = d as f64 * l.ln();
            total -= t;
            abs += t.abs();
        }
        return Ok((total, 4.0 * f64::EPSILON * abs));
    }
    let zero = Complex64::new(0.0, 0.0);
    check_coverage(spec, zero)?;
    let tau = split_point(spec, opts)?;
    let pieces = acc.exec.map_range(2, |i| {
        if i == 0 {
            large_t(spec, zero, tau, acc, opts)
        } else {
            small_t(spec, zero, tau, acc, opts)
        }
    });
    let mut g = 0.0;
    let mut err = 0.0;
    for p in pieces {
        let p = p?;
        g += p.value.re;
        err += p.err;
    }
    let mut c0 = 0.0;
    for h in &spec.heat {
        if h.alpha == 0.0 {
            c0 = h.coeff;
            g += h.coeff * tau.ln();
        } else {
            g += h.coeff * tau.powf(h.alpha) / h.alpha;
        }
    }
    let v = EULER_GAMMA * c0 + g;
    Ok((v, err + 8.0 * f64::EPSILON * v.abs()))
}

/// ln det_ζ = −ζ′(0).
pub fn zeta_log_det(spec: &SpectrumModel, acc: &AccuracyTarget) -> Result<f64> {
    zeta_prime_at_zero(spec, acc).map(|(v, _)| -v)
}

/// Spectra of A, B and of the product AB over a common eigenbasis.
#[derive(Debug, Clone)]
pub struct AnomalyInput {
    pub spec_a: SpectrumModel,
    pub spec_b: SpectrumModel,
    pub spec_ab: SpectrumModel,
}

/// δ(A, B) = −ζ′_{AB}(0) + ζ′_A(0) + ζ′_B(0), with its error estimate.
pub fn multiplicative_anomaly_with_err(input: &AnomalyInput, acc: &AccuracyTarget) -> Result<(f64, f64)> {
    let (ab, e_ab) = zeta_prime_at_zero(&input.spec_ab, acc)?;
    let (a, e_a) = zeta_prime_at_zero(&input.spec_a, acc)?;
    let (b, e_b) = zeta_prime_at_zero(&input.spec_b, acc)?;
    Ok((-ab + a + b, e_ab + e_a + e_b))
}

pub fn multiplicative_anomaly(input: &AnomalyInput, acc: &AccuracyTarget) -> Result<f64> {
    multiplicative_anomaly_with_err(input, acc).map(|(v, _)| v)
}
