//! Bound verdicts from extremum chains, the ratio/recursion convergence
//! diagnostics, and the small-coupling slope identities.

use serde::{Deserialize, Serialize};

use crate::engine::{DerivVar, Resummator};
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::quad::QuadratureSpec;
use crate::scan::{ExtremumKind, ExtremumSequence};
use crate::series::CoefficientSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    LowerBound,
    UpperBound,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainBasis {
    GlobalMinimaChain,
    LocalChain,
    MaximaChain,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub direction: BoundDirection,
    pub monotone: bool,
    pub basis: ChainBasis,
    pub caveats: Vec<String>,
}

/// S_N(λ, p(N)) sampled on a λ grid for each order in a sequence — the
/// purely numeric input to [`bound_verdict`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceCurves {
    pub orders: Vec<usize>,
    pub kinds: Vec<ExtremumKind>,
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
    /// values[i][j] = S_{orders[i]}(lambdas[j], p(orders[i]))
    pub values: Vec<Vec<f64>>,
}

/// Evaluate each solved order's curve on `grid_points` couplings over
/// (0, λ0].
pub fn sample_sequence_curves(
    series: &CoefficientSeries,
    seq: &ExtremumSequence,
    lambda0: f64,
    grid_points: usize,
    quad: QuadratureSpec,
) -> Result<SequenceCurves> {
    let solved = seq.solved();
    if solved.is_empty() {
        return Err(Error::InsufficientOrders { needed: 1, got: 0 });
    }
    let engine = Resummator::new(series, quad)?;
    let lambdas: Vec<f64> = (1..=grid_points)
        .map(|i| lambda0 * i as f64 / grid_points as f64)
        .collect();
    let mut values = Vec::with_capacity(solved.len());
    for rec in &solved {
        let row: Vec<Result<f64>> =
            par_map(&lambdas, |&lam| engine.value(rec.n, lam, rec.p_star));
        values.push(row.into_iter().collect::<Result<Vec<f64>>>()?);
    }
    Ok(SequenceCurves {
        orders: solved.iter().map(|r| r.n).collect(),
        kinds: solved.iter().map(|r| r.kind).collect(),
        lambda0,
        lambdas,
        values,
    })
}

/// Decide the bound direction from pairwise monotonicity of consecutive
/// curves at every grid coupling.
pub fn bound_verdict(curves: &SequenceCurves) -> BoundVerdict {
    let n_orders = curves.orders.len();
    let minima = curves.kinds.iter().all(|k| k.is_min());
    let maxima = curves.kinds.iter().all(|k| k.is_max());
    let has_global = curves.kinds.iter().any(|k| k.is_global());
    let basis = if maxima {
        ChainBasis::MaximaChain
    } else if minima && has_global {
        ChainBasis::GlobalMinimaChain
    } else {
        ChainBasis::LocalChain
    };
    if n_orders < 2 {
        return BoundVerdict {
            direction: BoundDirection::Inconclusive,
            monotone: false,
            basis,
            caveats: vec!["single-order chain: no pairwise trend available".into()],
        };
    }

    // ties below the numerical noise floor neither confirm nor break a
    // trend; strictness is decided by at least one resolved gap
    let mut all_up = true;
    let mut all_down = true;
    let mut any_strict = false;
    for i in 0..n_orders - 1 {
        for j in 0..curves.lambdas.len() {
            let a = curves.values[i][j];
            let b = curves.values[i + 1][j];
            let tol = 1e-9 * a.abs().max(b.abs()).max(1e-6);
            let gap = b - a;
            if gap > tol {
                all_down = false;
                any_strict = true;
            } else if gap < -tol {
                all_up = false;
                any_strict = true;
            }
        }
    }

    let mut caveats = Vec::new();
    let (direction, monotone) = if !any_strict {
        (BoundDirection::Inconclusive, true)
    } else if all_up {
        match basis {
            ChainBasis::GlobalMinimaChain => (BoundDirection::LowerBound, true),
            ChainBasis::MaximaChain | ChainBasis::LocalChain => {
                caveats.push(
                    "local extrema — the global-minimum argument is unavailable".into(),
                );
                (BoundDirection::LowerBound, true)
            }
        }
    } else if all_down {
        caveats.push("decreasing chain: upper-bound direction is not a priori guaranteed".into());
        (BoundDirection::UpperBound, true)
    } else {
        (BoundDirection::Inconclusive, false)
    };
    BoundVerdict {
        direction,
        monotone,
        basis,
        caveats,
    }
}

/// The ratio sequence c(N) = p(N+1)/p(N) over consecutive solved orders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnSequence {
    /// (N, N') pairs the ratios connect; N' is the next solved order.
    pub order_pairs: Vec<(usize, usize)>,
    pub values: Vec<f64>,
    /// |1/c(N+1) - (1 - 1/c(N) + 1/c(N)^2)| over consecutive ratios.
    pub recursion_residuals: Vec<f64>,
    /// K from fitting 1/c(N) ~ 1 + 1/(N+K); None with fewer than 2 ratios.
    pub k_fit: Option<f64>,
    pub strictly_decreasing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaSRow {
    pub n: usize,
    pub measured: f64,
    /// (A_1/p(N)) (1/c(N) - 1), the leading-order estimate.
    pub magic: f64,
    /// (α A_1 / 2 A_2) / (N+K)^2, the large-N closed form.
    pub large_n: Option<f64>,
    pub sign_consistent: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub cn: CnSequence,
    pub delta_s: Vec<DeltaSRow>,
    /// α = (A_1 - λ ∂A_1/∂λ) at λ0, from the top-order decomposition.
    pub alpha: f64,
    pub alpha_error: f64,
    pub identity_checks: Vec<IdentityCheck>,
    /// (λ, dS/dλ) samples for the top solved order.
    pub slope_profile: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub label: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn fit_k(orders: &[usize], cn: &[f64]) -> Option<f64> {
    // |1/c(N) - 1| = 1/(N+K) is the sign-correct large-N form for
    // chains with c > 1; linearized estimate first
    let g: Vec<f64> = orders
        .iter()
        .zip(cn)
        .filter(|(_, &c)| c > 1.0)
        .map(|(&n, &c)| 1.0 / (1.0 - 1.0 / c) - n as f64)
        .collect();
    if g.len() < 2 {
        return g.first().copied();
    }
    let seed = g.iter().sum::<f64>() / g.len() as f64;
    if g.len() == 2 {
        return Some(seed);
    }
    // golden-section least squares of |1/c - 1| against 1/(N+K)
    let loss = |k: f64| -> f64 {
        orders
            .iter()
            .zip(cn)
            .map(|(&n, &c)| {
                let model = 1.0 / (n as f64 + k);
                let y = (1.0 / c - 1.0).abs();
                (y - model).powi(2)
            })
            .sum()
    };
    let n_min = *orders.first()? as f64;
    let mut a = (-n_min + 0.05).max(seed - 20.0);
    let mut b = seed + 20.0;
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (loss(x1), loss(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = loss(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = loss(x2);
        }
        if (b - a).abs() < 1e-10 {
            break;
        }
    }
    Some(0.5 * (a + b))
}

/// Appendix-style convergence diagnostics for a principal sequence.
pub fn appendix_diagnostics(
    series: &CoefficientSeries,
    seq: &ExtremumSequence,
    lambda0: f64,
    quad: QuadratureSpec,
) -> Result<DiagnosticsReport> {
    let solved = seq.solved();
    if solved.len() < 3 {
        return Err(Error::InsufficientOrders {
            needed: 3,
            got: solved.len(),
        });
    }
    let engine = Resummator::new(series, quad)?;

    let orders: Vec<usize> = solved.iter().map(|r| r.n).collect();
    let mut order_pairs = Vec::new();
    let mut cn = Vec::new();
    for w in solved.windows(2) {
        order_pairs.push((w[0].n, w[1].n));
        cn.push(w[1].p_star / w[0].p_star);
    }
    let recursion_residuals: Vec<f64> = cn
        .windows(2)
        .map(|w| {
            let inv_next = 1.0 / w[1];
            let predicted = 1.0 - 1.0 / w[0] + 1.0 / (w[0] * w[0]);
            (inv_next - predicted).abs()
        })
        .collect();
    let strictly_decreasing = cn.windows(2).all(|w| w[1] < w[0]);
    let k_fit = fit_k(&orders[..cn.len()], &cn);

    // α from the top-order decomposition, differenced in λ
    let top = *solved.last().expect("nonempty");
    let a_of = |lam: f64| -> Result<f64> {
        Ok(engine.term_decomposition(top.n, lam, top.p_star)?[1])
    };
    const H: f64 = 1e-4;
    let g = |h: f64| -> Result<f64> { Ok((a_of(lambda0 * h.exp())? - a_of(lambda0 * (-h).exp())?) / (2.0 * h)) };
    let d1 = g(H)?;
    let d2 = g(H / 2.0)?;
    let da1_dloglam = (4.0 * d2 - d1) / 3.0;
    let a1_top = a_of(lambda0)?;
    // λ ∂A1/∂λ = ∂A1/∂ln λ
    let alpha = a1_top - da1_dloglam;
    let alpha_error = (d2 - d1).abs() / 3.0;

    let mut delta_s = Vec::new();
    for (i, w) in solved.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let e_lo = engine.eval(lo.n, lambda0, lo.p_star)?;
        let measured = hi.s_value - lo.s_value;
        let a1 = e_lo.terms.get(1).copied().unwrap_or(0.0);
        let a2 = e_lo.terms.get(2).copied().unwrap_or(0.0);
        let magic = (a1 / lo.p_star) * (1.0 / cn[i] - 1.0);
        let large_n = k_fit.map(|k| {
            (alpha * a1 / (2.0 * a2)) / (lo.n as f64 + k).powi(2)
        });
        delta_s.push(DeltaSRow {
            n: lo.n,
            measured,
            magic,
            large_n,
            sign_consistent: measured.signum() == magic.signum(),
        });
    }

    // identity checks: extremum identity (A1) and the origin limits
    let mut identity_checks = Vec::new();
    for rec in &solved {
        let e = engine.eval(rec.n, lambda0, rec.p_star)?;
        let lhs = lambda0
            * engine
                .derivative(rec.n, lambda0, rec.p_star, DerivVar::Lambda)?
                .value;
        let mut rhs = 0.0;
        let mut pn = 1.0;
        for (n, &a) in e.terms.iter().enumerate() {
            if n > 0 {
                pn *= rec.p_star;
                rhs += n as f64 * a / pn;
            }
        }
        let scale = rhs.abs().max(1e-12);
        identity_checks.push(IdentityCheck {
            label: format!("extremum_identity_N{}", rec.n),
            residual: (lhs - rhs).abs() / scale,
            tolerance: 1e-4,
            pass: (lhs - rhs).abs() / scale <= 1e-4,
        });
        // decomposition identity
        let resid = (e.value - e.decomposition_sum()).abs() / e.value.abs().max(1e-12);
        identity_checks.push(IdentityCheck {
            label: format!("decomposition_identity_N{}", rec.n),
            residual: resid,
            tolerance: 1e-12,
            pass: resid <= 1e-12,
        });
    }

    let slope_profile: Vec<(f64, f64)> = {
        let lams: Vec<f64> = (1..=20).map(|i| lambda0 * i as f64 / 20.0).collect();
        let rows: Vec<Result<(f64, f64)>> = par_map(&lams, |&lam| {
            Ok((
                lam,
                engine.derivative(top.n, lam, top.p_star, DerivVar::Lambda)?.value,
            ))
        });
        rows.into_iter().collect::<Result<Vec<_>>>()?
    };

    Ok(DiagnosticsReport {
        cn: CnSequence {
            order_pairs,
            values: cn,
            recursion_residuals,
            k_fit,
            strictly_decreasing,
        },
        delta_s,
        alpha,
        alpha_error,
        identity_checks,
        slope_profile,
    })
}

/// Origin value/slope checks and slope-sign profiles for a sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeReport {
    pub origin_checks: Vec<OriginCheck>,
    pub profiles: Vec<SlopeProfile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OriginCheck {
    pub n: usize,
    pub p: f64,
    /// |S(ε, p) - prefactor (f_0 + f_1 ε)| at ε = 1e-3
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeProfile {
    pub n: usize,
    pub p: f64,
    pub lambdas: Vec<f64>,
    pub slopes: Vec<f64>,
    /// couplings where dS/dλ changes sign (midpoints of flipped samples)
    pub sign_changes: Vec<f64>,
}

pub fn slope_checks(
    series: &CoefficientSeries,
    seq: &ExtremumSequence,
    lambda0: f64,
    quad: QuadratureSpec,
) -> Result<SlopeReport> {
    let solved = seq.solved();
    if solved.is_empty() {
        return Err(Error::InsufficientOrders { needed: 1, got: 0 });
    }
    let engine = Resummator::new(series, quad)?;
    let pf = series.prefactor();
    let f0 = series.coefficient(0);
    let f1 = series.coefficient(1);
    let f2 = if series.order() >= 2 {
        series.coefficient(2)
    } else {
        0.0
    };

    const EPS: f64 = 1e-3;
    let bound = 2.0 * (pf.abs() * f2.abs() + 1.0) * EPS * EPS;
    let mut origin_checks = Vec::new();
    let mut profiles = Vec::new();
    for rec in &solved {
        let s_eps = engine.value(rec.n, EPS, rec.p_star)?;
        let residual = (s_eps - pf * (f0 + f1 * EPS)).abs();
        origin_checks.push(OriginCheck {
            n: rec.n,
            p: rec.p_star,
            residual,
            bound,
            pass: residual <= bound,
        });

        let lambdas: Vec<f64> = (1..=20).map(|i| lambda0 * i as f64 / 20.0).collect();
        let slopes: Vec<Result<f64>> = par_map(&lambdas, |&lam| {
            Ok(engine.derivative(rec.n, lam, rec.p_star, DerivVar::Lambda)?.value)
        });
        let slopes = slopes.into_iter().collect::<Result<Vec<f64>>>()?;
        let mut sign_changes = Vec::new();
        for i in 0..slopes.len() - 1 {
            if slopes[i] != 0.0 && slopes[i] * slopes[i + 1] < 0.0 {
                sign_changes.push(0.5 * (lambdas[i] + lambdas[i + 1]));
            }
        }
        profiles.push(SlopeProfile {
            n: rec.n,
            p: rec.p_star,
            lambdas,
            slopes,
            sign_changes,
        });
    }
    Ok(SlopeReport {
        origin_checks,
        profiles,
    })
}
