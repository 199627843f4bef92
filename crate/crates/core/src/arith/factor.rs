use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PrimeFactorization {
    factors: BTreeMap<u64, u32>,
}

impl PrimeFactorization {
    pub fn factors(&self) -> &BTreeMap<u64, u32> {
        &self.factors
    }

    /// Exponent of `q`, zero when `q` does not divide the factored integer.
    pub fn exponent(&self, q: u64) -> u32 {
        self.factors.get(&q).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The factored integer, rebuilt as a product of prime powers.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .map(|(&q, &e)| super::big_pow(q, e as u64))
            .product()
    }
}

/// Trial division by 2, 3 and then the 6k ± 1 wheel.
pub fn factorize(n: i64) -> Result<PrimeFactorization> {
    if n <= 0 {
        return Err(Error::domain(format!("cannot factorize {n}: need n >= 1")));
    }
    let mut n = n as u64;
    let mut factors = BTreeMap::new();
    for q in [2u64, 3] {
        while n.is_multiple_of(q) {
            *factors.entry(q).or_insert(0) += 1;
            n /= q;
        }
    }
    let mut q = 5u64;
    let mut step = 2u64;
    while q.saturating_mul(q) <= n {
        while n.is_multiple_of(q) {
            *factors.entry(q).or_insert(0) += 1;
            n /= q;
        }
        q += step;
        step = 6 - step;
    }
    if n > 1 {
        *factors.entry(n).or_insert(0) += 1;
    }
    Ok(PrimeFactorization { factors })
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) || q.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) || q.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Largest `e` with `q^e | n`.
pub fn valuation(q: u64, n: u64) -> Result<u32> {
    if !is_prime(q) {
        return Err(Error::domain(format!("{q} is not prime")));
    }
    if n == 0 {
        return Err(Error::domain("valuation of 0 is undefined"));
    }
    let mut n = n;
    let mut e = 0;
    while n.is_multiple_of(q) {
        n /= q;
        e += 1;
    }
    Ok(e)
}

/// Whether `t^n` divides `b^m`, decided on prime exponents so that no power is
/// ever materialized.
pub fn power_divides(t: u64, n: u64, b: u64, m: u64) -> bool {
    if n == 0 || t == 1 {
        return true;
    }
    if t == 0 {
        // 0^n with n >= 1 divides only 0.
        return b == 0 && m > 0;
    }
    if b == 0 {
        return m > 0;
    }
    let (Ok(tf), Ok(bf)) = (factorize(t as i64), factorize(b as i64)) else {
        return false;
    };
    tf.factors().iter().all(|(&q, &e)| {
        let need = (e as u128) * (n as u128);
        let have = (bf.exponent(q) as u128) * (m as u128);
        need <= have
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        let f = factorize(12).unwrap();
        assert_eq!(f.factors(), &BTreeMap::from([(2, 2), (3, 1)]));
        assert!(factorize(1).unwrap().is_empty());
        let f = factorize(360).unwrap();
        assert_eq!(f.factors(), &BTreeMap::from([(2, 3), (3, 2), (5, 1)]));
        assert_eq!(f.product(), BigUint::from(360u32));
    }

    #[test]
    fn factorize_rejects_nonpositive() {
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
        assert!(matches!(factorize(-7), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_large_prime_and_square() {
        let f = factorize(999_999_937).unwrap();
        assert_eq!(f.factors(), &BTreeMap::from([(999_999_937, 1)]));
        let f = factorize(1_000_000_014_000_000_049).unwrap(); // (10^9+7)^2
        assert_eq!(f.factors(), &BTreeMap::from([(1_000_000_007, 2)]));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(2, 12).unwrap(), 2);
        assert_eq!(valuation(5, 12).unwrap(), 0);
        assert_eq!(valuation(3, 18).unwrap(), 2);
        assert!(matches!(valuation(4, 12), Err(Error::Domain(_))));
    }

    #[test]
    fn power_divisibility() {
        assert!(power_divides(12, 2, 6, 4));
        assert!(!power_divides(12, 2, 6, 3));
        assert!(power_divides(2, 5, 6, 5));
        assert!(power_divides(7, 0, 6, 0));
        assert!(!power_divides(10, 1, 6, 100));
    }
}
