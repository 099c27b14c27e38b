//! Exact-rational consistency check: composing the z-series of the
//! conformal map with the w-truncated Borel polynomial must reproduce the
//! original Borel coefficients f_n/n! through order N, for any p.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Zero};

use crate::bernoulli::rational_to_f64;
use crate::error::{Error, Result};
use crate::series::CoefficientSeries;

/// Per-order residuals of the reconstruction. Exactness at each order is
/// decided in rational arithmetic; residuals are reported as f64.
#[derive(Debug, Clone)]
pub struct TaylorReport {
    pub n: usize,
    /// residual at z-order i for i = 0..=n+1 (the last is the truncation
    /// artifact and is generically nonzero)
    pub residuals: Vec<f64>,
    /// exact (rational) equality held at every order <= n
    pub exact_through_n: bool,
}

fn rat(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

// z-series of w: w(z) = -Σ_{k>=2} 2 binom(1/2, k) (pz)^{k-1}, from the
// binomial expansion of sqrt(1 + pz)
fn w_series(p: &BigRational, order: usize) -> Vec<BigRational> {
    let mut half_binoms = vec![BigRational::one()];
    for k in 0..=order + 1 {
        let prev = half_binoms[k].clone();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let factor =
            (half - BigRational::from(BigInt::from(k))) / BigRational::from(BigInt::from(k + 1));
        half_binoms.push(prev * factor);
    }
    let mut w = vec![BigRational::zero(); order + 1];
    let mut p_pow = BigRational::one();
    for j in 1..=order {
        p_pow *= p;
        // coefficient of z^j is -2 binom(1/2, j+1) p^j
        w[j] = -BigRational::from(BigInt::from(2)) * &half_binoms[j + 1] * &p_pow;
    }
    w
}

fn poly_mul_trunc(a: &[BigRational], b: &[BigRational], order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Verify the truncation consistency of the resummation at order `n` for
/// map parameter `p` (converted exactly from f64 into a rational).
///
/// The prefactor cancels on both sides and is ignored.
pub fn taylor_consistency(series: &CoefficientSeries, n: usize, p: f64) -> Result<TaylorReport> {
    if n > series.order() {
        return Err(Error::OrderOutOfRange {
            requested: n,
            order: series.order(),
        });
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let p_rat = rat(p)?;
    let four_over_p = BigRational::from(BigInt::from(4)) / &p_rat;

    // f_n / n! as exact rationals
    let mut borel = Vec::with_capacity(n + 1);
    let mut fact = BigInt::one();
    for (i, &f) in series.coefficients()[..=n].iter().enumerate() {
        if i > 0 {
            fact *= BigInt::from(i);
        }
        borel.push(rat(f)? / BigRational::from(fact.clone()));
    }

    // tau_m: coefficient of w^m in the truncated polynomial
    let mut tau = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut t = BigRational::zero();
        let mut pow = BigRational::one();
        for (nn, b) in borel.iter().take(m + 1).enumerate() {
            let c = if nn == 0 {
                if m == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            } else {
                binomial_big(nn + m - 1, m - nn)
            };
            if !c.is_zero() {
                t += b * &pow * BigRational::from(c);
            }
            pow *= &four_over_p;
        }
        tau.push(t);
    }

    // compose tau(w(z)) truncated at z^{n+1}
    let order = n + 1;
    let wz = w_series(&p_rat, order);
    let mut acc = vec![BigRational::zero(); order + 1];
    let mut w_pow = vec![BigRational::zero(); order + 1];
    w_pow[0] = BigRational::one();
    for t in &tau {
        if !t.is_zero() {
            for (a, wp) in acc.iter_mut().zip(&w_pow) {
                *a += t * wp;
            }
        }
        w_pow = poly_mul_trunc(&w_pow, &wz, order);
    }

    let mut residuals = Vec::with_capacity(order + 1);
    let mut exact = true;
    for i in 0..=order {
        let target = if i <= n { borel[i].clone() } else { BigRational::zero() };
        let resid = &acc[i] - &target;
        if i <= n && !resid.is_zero() {
            exact = false;
        }
        residuals.push(rational_to_f64(&resid));
    }
    Ok(TaylorReport {
        n,
        residuals,
        exact_through_n: exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{builtin_series, BuiltinModel};

    #[test]
    fn prototype_order_two() {
        let s = builtin_series(BuiltinModel::Prototype, 3).unwrap();
        let rep = taylor_consistency(&s, 2, 1.0).unwrap();
        assert!(rep.exact_through_n);
        assert_eq!(&rep.residuals[..3], &[0.0, 0.0, 0.0]);
        // truncation artifact at order N+1, computed independently with
        // exact fractions: -13/16 at p = 1
        assert_eq!(rep.residuals[3], -13.0 / 16.0);
    }

    #[test]
    fn order_zero_trivially_exact() {
        let s = builtin_series(BuiltinModel::Geometric, 2).unwrap();
        let rep = taylor_consistency(&s, 0, 2.5).unwrap();
        assert!(rep.exact_through_n);
    }

    #[test]
    fn exact_for_all_builtins_and_irrational_like_p() {
        // p is an arbitrary f64; its exact rational image must still cancel
        for model in BuiltinModel::ALL {
            let order = 7;
            let s = builtin_series(model, order).unwrap();
            for &p in &[0.37, 2.65, 16.5] {
                let rep = taylor_consistency(&s, order, p).unwrap();
                assert!(rep.exact_through_n, "{} at p = {p}", model.id());
                assert_ne!(
                    rep.residuals[order + 1], 0.0,
                    "truncation artifact should be nonzero for {}",
                    model.id()
                );
            }
        }
    }
}
