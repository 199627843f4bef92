use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{unit_parts, MissingDigitSet};
use crate::arith::{big_pow, Rational};
use crate::error::Result;

/// Whether `n` has an `m`-digit base-`b` representation using only digits of `D`.
pub fn digits_in_set(set: &MissingDigitSet, n: &BigUint, m: u64) -> bool {
    let b = BigUint::from(set.b());
    let mut x = n.clone();
    for _ in 0..m {
        let (q, r) = x.div_rem(&b);
        let d = u64::try_from(&r).expect("digit below b");
        if !set.contains_digit(d) {
            return false;
        }
        x = q;
    }
    x.is_zero()
}

/// Whether `x` is an endpoint of a level-`m` basic interval.
pub fn endpoint_member(set: &MissingDigitSet, x: &Rational, m: u64) -> Result<bool> {
    let (num, den) = unit_parts(x)?;
    let scaled = num * big_pow(set.b(), m);
    let (n, rem) = scaled.div_rem(&den);
    if !rem.is_zero() {
        return Ok(false);
    }
    Ok(digits_in_set(set, &n, m) || (!n.is_zero() && digits_in_set(set, &(n - 1u32), m)))
}

/// `#E(m) = 2·#D^m − P(m)`, where `P(m)` counts adjacent pairs of level-`m`
/// basic intervals that share an endpoint.
pub fn endpoints_count(set: &MissingDigitSet, m: u64) -> BigUint {
    let size = set.size();
    let adjacent = set
        .digits()
        .iter()
        .filter(|&&d| set.contains_digit(d + 1))
        .count() as u64;
    let carries = set.contains_digit(0) && set.contains_digit(set.b() - 1);
    let mut shared = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..m {
        // P(j) = A·#D^{j−1} + [0, b−1 ∈ D]·P(j−1)
        shared = if carries { shared } else { BigUint::zero() } + &power * adjacent;
        power *= size;
    }
    power * 2u32 - shared
}

/// `#E(m)` by summing `#D^{m−1−j}·A` over the `j` trailing `(b−1)`-digits of
/// the left partner of each shared endpoint.
pub fn endpoints_count_by_pairs(set: &MissingDigitSet, m: u64) -> BigUint {
    let size = BigUint::from(set.size());
    let adjacent = set
        .digits()
        .iter()
        .filter(|&&d| set.contains_digit(d + 1))
        .count() as u64;
    let carries = set.contains_digit(0) && set.contains_digit(set.b() - 1);
    let mut shared = BigUint::zero();
    for j in 0..m {
        if j == 0 || carries {
            shared += size.pow((m - 1 - j) as u32) * adjacent;
        }
    }
    size.pow(m as u32) * 2u32 - shared
}
