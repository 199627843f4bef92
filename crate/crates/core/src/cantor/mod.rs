//! Geometry of the missing-digit set `C(b, D)`: the points of `[0, 1]` with a
//! base-`b` expansion using only digits from `D`.

mod endpoints;
mod grid;
mod successor;
mod word;

pub use endpoints::{digits_in_set, endpoint_member, endpoints_count, endpoints_count_by_pairs};
pub use grid::{grid_count, grid_count_intervals, grid_count_pow};
pub use successor::{Certificate, Successor};

use num_bigint::{BigInt, BigUint, Sign};
use serde::Serialize;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::params::normalize_digits;

/// The set `C(b, D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingDigitSet {
    b: u64,
    digits: Vec<u64>,
    #[serde(skip)]
    in_d: Vec<bool>,
    /// `next_above[k]`: the smallest digit of `D` greater than `k`.
    #[serde(skip)]
    next_above: Vec<Option<u64>>,
}

impl MissingDigitSet {
    pub fn new(b: u64, digits: &[u64]) -> Result<Self> {
        if b < 3 {
            return Err(Error::domain(format!("base b = {b} must be at least 3")));
        }
        if b > 1 << 32 {
            return Err(Error::domain("base b must be below 2^32"));
        }
        let digits = normalize_digits(b, digits)?;
        let mut in_d = vec![false; b as usize];
        for &d in &digits {
            in_d[d as usize] = true;
        }
        let next_above = (0..b)
            .map(|k| digits.iter().copied().find(|&d| d > k))
            .collect();
        Ok(MissingDigitSet {
            b,
            digits,
            in_d,
            next_above,
        })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn size(&self) -> u64 {
        self.digits.len() as u64
    }

    pub fn contains_digit(&self, d: u64) -> bool {
        d < self.b && self.in_d[d as usize]
    }

    pub fn min_digit(&self) -> u64 {
        self.digits[0]
    }

    pub fn max_digit(&self) -> u64 {
        *self.digits.last().unwrap()
    }

    /// `min C = min D / (b − 1)`.
    pub fn min_point(&self) -> Rational {
        Rational::frac(self.min_digit() as i64, self.b as i64 - 1)
    }

    /// `max C = max D / (b − 1)`.
    pub fn max_point(&self) -> Rational {
        Rational::frac(self.max_digit() as i64, self.b as i64 - 1)
    }

    /// Whether some base-`b` expansion of `x` uses only digits of `D`.
    pub fn membership(&self, x: &Rational) -> Result<bool> {
        let (n, q) = unit_parts(x)?;
        if n == q {
            return Ok(self.contains_digit(self.b - 1));
        }
        if word::fits_u128(&q, self.b) {
            let small = |v: &BigUint| u128::try_from_big(v).expect("checked size");
            Ok(self.member_walk(small(&n), small(&q)))
        } else {
            Ok(self.member_walk(n, q))
        }
    }

    fn member_walk<W: Word>(&self, n: W, q: W) -> bool {
        let b = self.b;
        let mut state = n;
        let mut tortoise = state.clone();
        let (mut power, mut lam) = (1u64, 0u64);
        loop {
            let (k, rem) = state.mul_u64(b).div_rem(&q);
            let k = k.to_u64().expect("digit below b");
            if rem.is_nil() && k >= 1 {
                // Terminating expansion: the last nonzero digit k may also be
                // written as (k − 1) followed by (b − 1) forever.
                let standard = self.contains_digit(k) && self.contains_digit(0);
                let alternate = self.contains_digit(k - 1) && self.contains_digit(b - 1);
                return standard || alternate;
            }
            if !self.contains_digit(k) {
                return false;
            }
            state = rem;
            lam += 1;
            if state == tortoise {
                return true;
            }
            if lam == power {
                tortoise = state.clone();
                power *= 2;
                lam = 0;
            }
        }
    }

    /// `min{x ∈ C : x ≥ u}`, or for `strict` the infimum of `{x ∈ C : x > u}`.
    pub fn successor(&self, u: &Rational, strict: bool) -> Result<Option<Rational>> {
        Ok(self.successor_certified(u, strict)?.map(|s| s.value))
    }

    pub fn successor_certified(&self, u: &Rational, strict: bool) -> Result<Option<Successor>> {
        successor::successor(self, u, strict)
    }

    /// Whether `I ∩ C(b, D)` is non-empty. Parts of `I` outside `[0, 1]` are ignored.
    pub fn interval_intersects(&self, interval: &Interval) -> Result<bool> {
        let zero = Rational::zero();
        let one = Rational::one();
        let (lo, hi) = (&interval.lo, &interval.hi);
        match interval.openness {
            Openness::Closed => {
                let start = if lo < &zero { zero } else { lo.clone() };
                if &start > hi || start > one {
                    return Ok(false);
                }
                Ok(matches!(self.successor(&start, false)?, Some(x) if &x <= hi))
            }
            Openness::Open => {
                if lo >= hi || lo >= &one || hi <= &zero {
                    return Ok(false);
                }
                let inf = if lo < &zero {
                    self.successor(&zero, false)?
                } else {
                    self.successor(lo, true)?
                };
                Ok(matches!(inf, Some(x) if &x < hi))
            }
        }
    }
}

pub(crate) use word::Word;

/// Numerator and denominator of a rational in `[0, 1]`.
pub(crate) fn unit_parts(x: &Rational) -> Result<(BigUint, BigUint)> {
    if x.is_negative() || *x > 1i64 {
        return Err(Error::domain(format!("{x} is outside [0, 1]")));
    }
    Ok((
        x.numer().to_biguint().expect("non-negative"),
        x.denom().to_biguint().expect("positive"),
    ))
}

pub(crate) fn rational_from_parts(num: BigUint, den: BigUint) -> Rational {
    Rational::new(
        BigInt::from_biguint(Sign::Plus, num),
        BigInt::from_biguint(Sign::Plus, den),
    )
    .expect("positive denominator")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Openness {
    Open,
    Closed,
}

/// An interval with rational endpoints; an open interval with `lo = hi` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub openness: Openness,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, openness: Openness) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("interval endpoints out of order: {lo} > {hi}")));
        }
        Ok(Interval { lo, hi, openness })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, Openness::Closed)
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, Openness::Open)
    }

    /// The open ball `B(center, radius)`.
    pub fn ball(center: &Rational, radius: &Rational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::domain("negative radius"));
        }
        Self::open(center - radius, center + radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn cantor() -> MissingDigitSet {
        MissingDigitSet::new(3, &[0, 2]).unwrap()
    }

    #[test]
    fn successor_examples() {
        let c = cantor();
        assert_eq!(c.successor(&r(0, 1), false).unwrap(), Some(r(0, 1)));
        assert_eq!(c.successor(&r(2, 5), false).unwrap(), Some(r(2, 3)));
        assert_eq!(c.successor(&r(1, 3), false).unwrap(), Some(r(1, 3)));
        assert_eq!(c.successor(&r(1, 1), false).unwrap(), Some(r(1, 1)));
        assert_eq!(c.successor(&r(1, 1), true).unwrap(), None);
        assert!(c.successor(&r(3, 2), false).is_err());
    }

    #[test]
    fn strict_successor() {
        let c = cantor();
        // 1/3 is isolated from the right: the next point is 2/3.
        assert_eq!(c.successor(&r(1, 3), true).unwrap(), Some(r(2, 3)));
        // 0 is a limit of 3^-k from the right.
        assert_eq!(c.successor(&r(0, 1), true).unwrap(), Some(r(0, 1)));
        // 1/4 = 0.0202… lies in C and is approached from the right.
        assert_eq!(c.successor(&r(1, 4), true).unwrap(), Some(r(1, 4)));
        // 3/4 = 0.2020… also.
        assert_eq!(c.successor(&r(3, 4), true).unwrap(), Some(r(3, 4)));
    }

    #[test]
    fn successor_above_max() {
        let s = MissingDigitSet::new(5, &[1, 2]).unwrap();
        assert_eq!(s.successor(&r(3, 5), false).unwrap(), None);
        assert_eq!(s.successor(&r(1, 2), false).unwrap(), Some(r(1, 2)));
        assert_eq!(s.successor(&r(1, 2), true).unwrap(), None);
        assert_eq!(s.successor(&r(0, 1), false).unwrap(), Some(r(1, 4)));
    }

    #[test]
    fn membership_examples() {
        assert!(MissingDigitSet::new(5, &[2, 3]).unwrap().membership(&r(1, 2)).unwrap());
        let c = cantor();
        assert!(!c.membership(&r(1, 2)).unwrap());
        assert!(c.membership(&r(1, 3)).unwrap());
        assert!(c.membership(&r(1, 4)).unwrap());
        assert!(c.membership(&r(1, 1)).unwrap());
        assert!(c.membership(&r(0, 1)).unwrap());
        assert!(!c.membership(&r(4, 9)).unwrap());
        let s = MissingDigitSet::new(5, &[1, 2]).unwrap();
        assert!(!s.membership(&r(0, 1)).unwrap());
        assert!(!s.membership(&r(1, 1)).unwrap());
        assert!(!s.membership(&r(1, 5)).unwrap());
        assert!(s.membership(&r(1, 4)).unwrap());
    }

    #[test]
    fn interval_examples() {
        let c = cantor();
        assert!(!c.interval_intersects(&Interval::closed(r(2, 5), r(3, 5)).unwrap()).unwrap());
        assert!(c.interval_intersects(&Interval::closed(r(3, 10), r(2, 5)).unwrap()).unwrap());
        assert!(!c.interval_intersects(&Interval::open(r(1, 3), r(2, 3)).unwrap()).unwrap());
        assert!(c.interval_intersects(&Interval::closed(r(1, 3), r(2, 3)).unwrap()).unwrap());
        assert!(!c.interval_intersects(&Interval::open(r(1, 2), r(1, 2)).unwrap()).unwrap());
        assert!(c.interval_intersects(&Interval::open(r(-1, 2), r(1, 100)).unwrap()).unwrap());
        let s = MissingDigitSet::new(5, &[1, 2]).unwrap();
        // C(5,{1,2}) ⊂ [1/4, 1/2]; the ball around 1/5 of radius 1/100 misses it.
        let ball = Interval::ball(&r(1, 5), &r(1, 100)).unwrap();
        assert!(!s.interval_intersects(&ball).unwrap());
        // The open ball around 1/5 of radius 1/20 ends exactly at min C = 1/4.
        let ball = Interval::ball(&r(1, 5), &r(1, 20)).unwrap();
        assert!(!s.interval_intersects(&ball).unwrap());
        let closed = Interval::closed(r(3, 20), r(1, 4)).unwrap();
        assert!(s.interval_intersects(&closed).unwrap());
    }
}
