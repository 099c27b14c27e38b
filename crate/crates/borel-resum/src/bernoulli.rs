//! Exact rational Bernoulli numbers via the defining recurrence.
//!
//! The recurrence `sum_{k=0}^{m} C(m+1,k) B_k = 0` is evaluated in
//! `BigRational` arithmetic; no floating point enters until a caller
//! converts a value for coefficient assembly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Table of even-index Bernoulli numbers `B_0, B_2, ..., B_max`.
///
/// `B_1` is not stored: past `B_0` every odd-index value is zero except
/// `B_1` itself, which never appears in the even-index formulas used here.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    // entries[k] = B_{2k}
    entries: Vec<BigRational>,
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generate `B_0, B_2, ..., B_{max_even_index}` exactly.
pub fn bernoulli_numbers(max_even_index: usize) -> Result<BernoulliTable> {
    if max_even_index < 2 || max_even_index % 2 != 0 {
        return Err(Error::Domain(format!(
            "max_even_index must be even and >= 2, got {max_even_index}"
        )));
    }
    // full recurrence including odd indices (all zero past B_1)
    let mut all: Vec<BigRational> = Vec::with_capacity(max_even_index + 1);
    all.push(BigRational::one());
    for m in 1..=max_even_index {
        let mut s = BigRational::zero();
        for (k, bk) in all.iter().enumerate() {
            if !bk.is_zero() {
                s += BigRational::from(binomial(m + 1, k)) * bk;
            }
        }
        all.push(-s / BigRational::from(BigInt::from(m + 1)));
    }
    let entries = all.into_iter().step_by(2).collect();
    Ok(BernoulliTable { entries })
}

impl BernoulliTable {
    /// `B_{even_index}` as an exact rational, if stored.
    pub fn get(&self, even_index: usize) -> Option<&BigRational> {
        if even_index % 2 != 0 {
            return None;
        }
        self.entries.get(even_index / 2)
    }

    /// `B_{even_index}` converted to f64.
    pub fn to_f64(&self, even_index: usize) -> Option<f64> {
        self.get(even_index).map(rational_to_f64)
    }

    /// Largest stored even index.
    pub fn max_index(&self) -> usize {
        2 * (self.entries.len() - 1)
    }

    /// Signs of `B_2, B_4, ...` alternate, starting positive.
    pub fn signs_alternate(&self) -> bool {
        self.entries
            .iter()
            .skip(1)
            .enumerate()
            .all(|(i, b)| b.is_positive() == (i % 2 == 0))
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn base_case() {
        let t = bernoulli_numbers(2).unwrap();
        assert_eq!(t.get(0).unwrap(), &BigRational::one());
    }

    #[test]
    fn low_order_values() {
        let t = bernoulli_numbers(16).unwrap();
        assert_eq!(t.get(2).unwrap(), &ratio(1, 6));
        assert_eq!(t.get(4).unwrap(), &ratio(-1, 30));
        assert_eq!(t.get(6).unwrap(), &ratio(1, 42));
        assert_eq!(t.get(8).unwrap(), &ratio(-1, 30));
        assert_eq!(t.get(10).unwrap(), &ratio(5, 66));
        assert_eq!(t.get(12).unwrap(), &ratio(-691, 2730));
        assert_eq!(t.get(14).unwrap(), &ratio(7, 6));
        assert_eq!(t.get(16).unwrap(), &ratio(-3617, 510));
    }

    #[test]
    fn recurrence_holds_exactly() {
        // sum_{k=0}^{m} C(m+1,k) B_k = 0 for every even m in the table,
        // reconstructing the odd-index zeros and B_1 = -1/2.
        let t = bernoulli_numbers(30).unwrap();
        let mut all = vec![BigRational::one(), ratio(-1, 2)];
        for m in 2..=30 {
            if m % 2 == 0 {
                all.push(t.get(m).unwrap().clone());
            } else {
                all.push(BigRational::zero());
            }
        }
        for m in 1..=30usize {
            let mut s = BigRational::zero();
            for (k, bk) in all.iter().take(m + 1).enumerate() {
                s += BigRational::from(binomial(m + 1, k)) * bk;
            }
            assert!(s.is_zero(), "recurrence violated at m = {m}");
        }
    }

    #[test]
    fn signs_alternate() {
        let t = bernoulli_numbers(40).unwrap();
        assert!(t.signs_alternate());
    }

    #[test]
    fn odd_or_small_index_rejected() {
        assert!(bernoulli_numbers(3).is_err());
        assert!(bernoulli_numbers(0).is_err());
    }

    #[test]
    fn f64_conversion() {
        let t = bernoulli_numbers(12).unwrap();
        assert!((t.to_f64(2).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!((t.to_f64(12).unwrap() + 691.0 / 2730.0).abs() < 1e-16);
    }
}
