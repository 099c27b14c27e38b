//! The conformally mapped, truncated Borel resummation `S_N(λ, p)`, its
//! term decomposition `A_n(N)`, and finite-difference derivatives.
//!
//! Everything is evaluated in the scaled representation
//! `S_N = Σ_n (f_n/n!)(4/p)^n Σ_k C(n,k) ∫ e^{-z} w(λz)^{n+k} dz`,
//! whose integrand is bounded and smooth on the whole contour.

use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::quad::{adaptive_integrate, laguerre_rule, moment_tail_cut, QuadRule, QuadratureSpec};
use crate::series::CoefficientSeries;

/// w(z) = (√(1+zp) - 1)/(√(1+zp) + 1); maps [0, ∞) into [0, 1).
pub fn conformal_w(z: f64, p: f64) -> f64 {
    // rationalized form zp/(√(1+zp)+1)²; the textbook numerator √(1+zp)-1
    // cancels catastrophically for small zp
    let u = z * p;
    let s1 = (1.0 + u).sqrt() + 1.0;
    u / (s1 * s1)
}

/// Inverse map z(w) = 4w / (p (1-w)^2) on w ∈ [0, 1).
pub fn conformal_z(w: f64, p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::Domain(format!("w = {w} outside [0, 1)")));
    }
    let d = 1.0 - w;
    Ok(4.0 * w / (p * d * d))
}

/// Coefficient of w^{n+k} in the expansion of z^n under the inverse map:
/// binomial(2n+k-1, k) for n >= 1; the n = 0 expansion is just the
/// constant term, so δ_{k0}.
pub fn expansion_coefficient(n: usize, k: usize) -> f64 {
    if n == 0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // binom(2n+k-1, k) = Π_{i=1}^{k} (2n-1+i)/i, exact in f64 at the
    // orders reachable here
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (2 * n - 1 + i) as f64 / i as f64;
    }
    acc.round()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MomentKey {
    lambda_bits: u64,
    p_bits: u64,
    fingerprint: u64,
}

/// Moments `I_0..I_max` with per-moment error estimates.
#[derive(Debug)]
pub struct MomentData {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Concurrent cache of moment vectors keyed on the exact bit patterns of
/// (λ, p) plus the quadrature fingerprint. Writes are idempotent: a
/// recomputation for a larger m reproduces the shared prefix bitwise.
#[derive(Debug, Default)]
pub struct MomentCache {
    map: DashMap<MomentKey, Arc<MomentData>>,
}

impl MomentCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Moments `I_0..I_max_m` at (λ, p), computed per `spec` on a miss.
    pub fn moments(
        &self,
        max_m: usize,
        lambda: f64,
        p: f64,
        spec: &QuadratureSpec,
    ) -> Result<Arc<MomentData>> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must be positive, got {p}")));
        }
        let key = MomentKey {
            lambda_bits: lambda.to_bits(),
            p_bits: p.to_bits(),
            fingerprint: spec.fingerprint(),
        };
        if let Some(hit) = self.map.get(&key) {
            if hit.values.len() > max_m {
                return Ok(hit.clone());
            }
        }
        let data = Arc::new(compute_moments(max_m, lambda, p, spec)?);
        self.map.insert(key, data.clone());
        Ok(data)
    }
}

fn compute_moments(
    max_m: usize,
    lambda: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<MomentData> {
    let mut values = vec![0.0; max_m + 1];
    let mut errors = vec![0.0; max_m + 1];
    values[0] = 1.0; // ∫ e^{-z} dz, exact

    match spec.rule {
        QuadRule::GaussLaguerre => {
            let full = laguerre_rule(spec.node_count);
            let half = laguerre_rule((spec.node_count / 2).max(16));
            let wf: Vec<f64> = full.nodes.iter().map(|&z| conformal_w(lambda * z, p)).collect();
            let wh: Vec<f64> = half.nodes.iter().map(|&z| conformal_w(lambda * z, p)).collect();
            let mut accf = vec![1.0; wf.len()];
            let mut acch = vec![1.0; wh.len()];
            for m in 1..=max_m {
                let mut vf = 0.0;
                for ((a, &w), &wt) in accf.iter_mut().zip(&wf).zip(&full.weights) {
                    *a *= w;
                    vf += wt * *a;
                }
                let mut vh = 0.0;
                for ((a, &w), &wt) in acch.iter_mut().zip(&wh).zip(&half.weights) {
                    *a *= w;
                    vh += wt * *a;
                }
                let est = (vf - vh).abs();
                let tol = spec.rel_tol * vf.abs() + spec.abs_tol;
                if est <= tol {
                    values[m] = vf;
                    errors[m] = est;
                } else {
                    // cross-check route: adaptive subdivision with tail cut
                    let (v, e) = adaptive_moment(m, lambda, p, spec)?;
                    values[m] = v;
                    errors[m] = e;
                }
            }
        }
        QuadRule::AdaptiveExpTail => {
            for m in 1..=max_m {
                let (v, e) = adaptive_moment(m, lambda, p, spec)?;
                values[m] = v;
                errors[m] = e;
            }
        }
    }
    Ok(MomentData { values, errors })
}

fn adaptive_moment(m: usize, lambda: f64, p: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    adaptive_integrate(
        |z| (-z).exp() * conformal_w(lambda * z, p).powi(m as i32),
        0.0,
        moment_tail_cut(m),
        spec.rel_tol,
        spec.abs_tol,
    )
}

/// Single moment `I_m(λ, p)`; convenience wrapper over [`MomentCache`].
pub fn moment(
    m: usize,
    lambda: f64,
    p: f64,
    spec: &QuadratureSpec,
    cache: &MomentCache,
) -> Result<f64> {
    Ok(cache.moments(m, lambda, p, spec)?.values[m])
}

/// Value of `S_N(λ, p)` with its term decomposition.
#[derive(Debug, Clone)]
pub struct ResumEvaluation {
    pub value: f64,
    pub n: usize,
    pub lambda: f64,
    pub p: f64,
    /// A_n(N) = prefactor (f_n/n!) 4^n Σ_k C(n,k) I_{n+k}; the explicit
    /// 1/p^n is not folded in, but p-dependence remains through w.
    pub terms: Vec<f64>,
    pub quadrature_error_estimate: f64,
}

impl ResumEvaluation {
    /// Σ_n A_n / p^n, the compact-form identity the value must satisfy.
    pub fn decomposition_sum(&self) -> f64 {
        let mut pn = 1.0;
        let mut acc = 0.0;
        for a in &self.terms {
            acc += a / pn;
            pn *= self.p;
        }
        acc
    }
}

/// Differentiation variable for [`Resummator::derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivVar {
    P,
    Lambda,
}

/// Finite-difference derivative with error estimate.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error_estimate: f64,
    /// Set when the differencing noise floor is comparable to the value.
    pub low_confidence: bool,
}

/// Evaluator bundling a series, a quadrature spec, and a moment cache.
///
/// All methods are pure given their inputs; the cache is safe for
/// concurrent use, so one `Resummator` can serve a parallel scan.
pub struct Resummator<'s> {
    series: &'s CoefficientSeries,
    quad: QuadratureSpec,
    cache: MomentCache,
}

impl<'s> Resummator<'s> {
    pub fn new(series: &'s CoefficientSeries, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        Ok(Resummator {
            series,
            quad,
            cache: MomentCache::new(),
        })
    }

    pub fn series(&self) -> &CoefficientSeries {
        self.series
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn cache(&self) -> &MomentCache {
        &self.cache
    }

    pub fn moments(&self, max_m: usize, lambda: f64, p: f64) -> Result<Arc<MomentData>> {
        self.cache.moments(max_m, lambda, p, &self.quad)
    }

    /// Full evaluation of S_N(λ, p) with term decomposition.
    pub fn eval(&self, n: usize, lambda: f64, p: f64) -> Result<ResumEvaluation> {
        let order = self.series.order();
        if n > order {
            return Err(Error::OrderOutOfRange {
                requested: n,
                order,
            });
        }
        let data = self.moments(n, lambda, p)?;
        let pf = self.series.prefactor();
        let coeffs = self.series.coefficients();
        let mut terms = Vec::with_capacity(n + 1);
        let mut value = 0.0;
        let mut err = 0.0;
        let mut inv_pn = 1.0; // 1/p^n
        let mut scale_n = pf; // pf * 4^n / n!
        for nn in 0..=n {
            if nn > 0 {
                scale_n *= 4.0 / nn as f64;
                inv_pn /= p;
            }
            let mut inner = 0.0;
            let mut inner_err = 0.0;
            for k in 0..=(n - nn) {
                let c = expansion_coefficient(nn, k);
                inner += c * data.values[nn + k];
                inner_err += c * data.errors[nn + k];
            }
            let a_n = scale_n * coeffs[nn] * inner;
            terms.push(a_n);
            value += a_n * inv_pn;
            err += (scale_n * coeffs[nn]).abs() * inner_err * inv_pn;
        }
        Ok(ResumEvaluation {
            value,
            n,
            lambda,
            p,
            terms,
            quadrature_error_estimate: err,
        })
    }

    /// Just the value of S_N(λ, p).
    pub fn value(&self, n: usize, lambda: f64, p: f64) -> Result<f64> {
        Ok(self.eval(n, lambda, p)?.value)
    }

    /// The A_n(N) list alone.
    pub fn term_decomposition(&self, n: usize, lambda: f64, p: f64) -> Result<Vec<f64>> {
        Ok(self.eval(n, lambda, p)?.terms)
    }

    /// ∂S/∂p or ∂S/∂λ by central differences in the log of the variable,
    /// with one Richardson extrapolation level.
    pub fn derivative(
        &self,
        n: usize,
        lambda: f64,
        p: f64,
        wrt: DerivVar,
    ) -> Result<DerivativeEstimate> {
        const H: f64 = 1e-4;
        let at = |h: f64| -> Result<f64> {
            match wrt {
                DerivVar::P => self.value(n, lambda, p * h.exp()),
                DerivVar::Lambda => self.value(n, lambda * h.exp(), p),
            }
        };
        let x = match wrt {
            DerivVar::P => p,
            DerivVar::Lambda => lambda,
        };
        let g = |h: f64| -> Result<f64> { Ok((at(h)? - at(-h)?) / (2.0 * h)) };
        let d1 = g(H)?;
        let d2 = g(H / 2.0)?;
        let rich = (4.0 * d2 - d1) / 3.0;
        let scale = self.value(n, lambda, p)?.abs().max(1.0);
        let noise_floor = f64::EPSILON * scale / H;
        let error = (d2 - d1).abs() / 3.0 + noise_floor;
        let value = rich / x;
        Ok(DerivativeEstimate {
            value,
            error_estimate: error / x,
            low_confidence: rich.abs() <= 4.0 * noise_floor,
        })
    }
}
