//! Exact or independently computed reference values for the builtin
//! models: Borel integrals, the principal-value decomposition, the
//! Schwinger proper-time integral, and zero/slope extraction.

use serde::{Deserialize, Serialize};

use crate::bernoulli::bernoulli_numbers;
use crate::error::{Error, Result};
use crate::quad::adaptive_integrate;
use crate::series::BuiltinModel;

const REL: f64 = 1e-12;
const ABS: f64 = 1e-14;

/// Exact sum S(λ) by the model's Borel integral or closed form.
///
/// Defined for the Borel-summable models; the PV model is handled by
/// [`pv_split`], and the beta function has no closed-form sum.
pub fn exact_sum(model: BuiltinModel, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    match model {
        BuiltinModel::Prototype => {
            // (1/λ) ∫ e^{-z/λ}/(1+z) dz = ∫ e^{-u}/(1+λu) du
            let (v, _) = adaptive_integrate(
                |u| (-u).exp() / (1.0 + lambda * u),
                0.0,
                60.0,
                REL,
                ABS,
            )?;
            Ok(v)
        }
        BuiltinModel::Geometric => Ok(1.0 / (1.0 + lambda)),
        BuiltinModel::EulerHeisenberg => schwinger(lambda),
        BuiltinModel::PvModel | BuiltinModel::BetaPolymer => {
            Err(Error::NoExactOracle(model.id().into()))
        }
    }
}

/// The principal-value decomposition S_exact = S_pert - S_np of the
/// Borel-nonsummable model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PvSplit {
    pub lambda: f64,
    pub s_pert: f64,
    pub s_np: f64,
    pub s_exact: f64,
}

/// Evaluate the subtraction form of the PV prescription for
/// B(z) = 1/((1+z)(5-z)) with its pole at q = 5.
pub fn pv_split(lambda: f64) -> Result<PvSplit> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let q = 5.0;
    let eq = (-q / lambda).exp();
    // the removable point z = q handled by a local series of the numerator
    let integrand = |z: f64| -> f64 {
        let t = z - q;
        let denom = 1.0 + z;
        if t.abs() < 1e-6 {
            // (e^{-z/λ} - e^{-q/λ})/(q - z) = e^{-q/λ} (1/λ - t/(2λ²) + ...)
            eq * (1.0 / lambda - t / (2.0 * lambda * lambda)
                + t * t / (6.0 * lambda.powi(3)))
                / denom
        } else {
            -eq * (-t / lambda).exp_m1() / (denom * t)
        }
    };
    // beyond the cut the e^{-z/λ} part is below e^{-50}; the remaining
    // -e^{-q/λ} B(z) tail integrates in closed form
    let z_cut = (50.0 * lambda).max(60.0);
    let (body, _) = adaptive_integrate(integrand, 0.0, z_cut, REL, ABS)?;
    let tail = eq / 6.0 * ((1.0 + z_cut) / (z_cut - q)).ln();
    let s_exact = (body + tail) / lambda;
    let s_np = 5.0f64.ln() * eq / (6.0 * lambda);
    Ok(PvSplit {
        lambda,
        s_pert: s_exact + s_np,
        s_np,
        s_exact,
    })
}

// Taylor coefficients of coth(s) - 1/s - s/3 = Σ_{n>=2} 4^n B_{2n} s^{2n-1}/(2n)!,
// converging for |s| < π; 15 terms are far below f64 resolution at s = 1/2.
fn coth_series_coefficients() -> &'static [f64] {
    use std::sync::OnceLock;
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let table = bernoulli_numbers(32).expect("fixed even index");
        let mut coeffs = Vec::new();
        let mut pow4 = 16.0;
        let mut fact = 24.0; // (2n)! at n = 2
        for n in 2..=16usize {
            coeffs.push(pow4 * table.to_f64(2 * n).expect("table covers 2n") / fact);
            pow4 *= 4.0;
            fact *= (2 * n + 1) as f64 * (2 * n + 2) as f64;
        }
        coeffs
    })
}

/// Integrand of the dimensionless Schwinger sum, with the removable
/// origin treated by the series (≈ -s/45 near zero).
pub fn schwinger_integrand(s: f64, lambda: f64) -> f64 {
    let damp = (-s / lambda.sqrt()).exp();
    if s < 0.5 {
        let s2 = s * s;
        let mut acc = 0.0;
        let mut pow = s; // s^{2n-3} starting at n=2
        for c in coth_series_coefficients() {
            acc += c * pow;
            pow *= s2;
        }
        acc * damp
    } else {
        // coth s = 1 + 2/(e^{2s} - 1), stable for s >= 1/2
        let coth = 1.0 + 2.0 / (2.0 * s).exp_m1();
        (coth - 1.0 / s - s / 3.0) / (s * s) * damp
    }
}

/// 100 ∫ ds/s² (coth s - 1/s - s/3) e^{-s/√λ}, the exact one-loop sum.
fn schwinger(lambda: f64) -> Result<f64> {
    let mu = lambda.sqrt();
    let (low, _) = adaptive_integrate(|s| schwinger_integrand(s, lambda), 0.0, 0.5, REL, ABS)?;
    let s_max = (0.5f64).max(mu * 36.8); // e^{-s/√λ} < 1e-16 beyond
    let (high, _) = adaptive_integrate(|s| schwinger_integrand(s, lambda), 0.5, s_max, REL, ABS)?;
    Ok(100.0 * (low + high))
}

/// Root and slope of a curve on a bracketing interval.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroSlopeResult {
    pub lambda_star: f64,
    pub omega: f64,
}

/// Bracketed bisection/secant hybrid to 1e-6 in λ, slope by central
/// difference at the root.
pub fn zero_and_slope(
    curve: &mut dyn FnMut(f64) -> Result<f64>,
    bracket: (f64, f64),
) -> Result<ZeroSlopeResult> {
    let (mut a, mut b) = bracket;
    let mut fa = curve(a)?;
    let mut fb = curve(b)?;
    if fa == 0.0 {
        b = a;
        fb = fa;
    }
    if fa * fb > 0.0 {
        return Err(Error::NoZeroInBracket(bracket.0, bracket.1));
    }
    const TOL: f64 = 1e-6;
    while (b - a).abs() > TOL {
        // secant proposal, accepted only when it stays safely interior
        let mut mid = if fb != fa {
            b - fb * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let margin = 0.01 * (b - a).abs();
        if !(mid > a.min(b) + margin && mid < a.max(b) - margin) {
            mid = 0.5 * (a + b);
        }
        let fm = curve(mid)?;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fa * fm < 0.0 {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let root = 0.5 * (a + b);
    let h = (1e-5 * root.abs()).max(1e-7);
    let omega = (curve(root + h)? - curve(root - h)?) / (2.0 * h);
    Ok(ZeroSlopeResult {
        lambda_star: root,
        omega,
    })
}
