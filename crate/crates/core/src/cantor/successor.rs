use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::word::{fits_u128, Word};
use super::{rational_from_parts, unit_parts, MissingDigitSet};
use crate::arith::Rational;
use crate::error::Result;

/// How a successor value was obtained; replayable without the walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Certificate {
    /// The query point itself lies in the set (standard or alternate expansion).
    Query,
    /// The query point is a limit of points of the set from the right (strict mode only).
    RightLimit,
    /// The point `0.prefix tail tail tail…` in base `b`.
    Digits { prefix: Vec<u64>, tail: u64 },
}

impl Certificate {
    /// Rebuild the point encoded by a `Digits` certificate.
    pub fn replay(&self, b: u64) -> Option<Rational> {
        match self {
            Certificate::Digits { prefix, tail } => Some(digits_value(b, prefix, *tail)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Successor {
    pub value: Rational,
    pub certificate: Certificate,
}

/// `0.d₁d₂…d_k (tail)(tail)…` in base `b`.
pub(crate) fn digits_value(b: u64, prefix: &[u64], tail: u64) -> Rational {
    let mut p = BigUint::zero();
    for &d in prefix {
        p = p * b + d;
    }
    let scale = BigUint::from(b).pow(prefix.len() as u32);
    let num = p * (b - 1) + tail;
    rational_from_parts(num, scale * (b - 1))
}

pub(super) fn successor(set: &MissingDigitSet, u: &Rational, strict: bool) -> Result<Option<Successor>> {
    let (n, q) = unit_parts(u)?;
    if n == q {
        if !strict && set.contains_digit(set.b - 1) {
            return Ok(Some(Successor {
                value: Rational::one(),
                certificate: Certificate::Query,
            }));
        }
        return Ok(None);
    }
    let outcome = if fits_u128(&q, set.b) {
        let small = |v: &BigUint| u128::try_from_big(v).expect("checked size");
        walk(set, small(&n), small(&q), strict)
    } else {
        walk(set, n, q, strict)
    };
    Ok(match outcome {
        Walk::Query => Some(Successor {
            value: u.clone(),
            certificate: Certificate::Query,
        }),
        Walk::RightLimit => Some(Successor {
            value: u.clone(),
            certificate: Certificate::RightLimit,
        }),
        Walk::Fallback(prefix) => {
            let tail = set.min_digit();
            Some(Successor {
                value: digits_value(set.b, &prefix, tail),
                certificate: Certificate::Digits { prefix, tail },
            })
        }
        Walk::Nothing => None,
    })
}

enum Walk {
    Query,
    RightLimit,
    Fallback(Vec<u64>),
    Nothing,
}

/// Follow the standard expansion of `n/q` while its digits stay in `D`.
///
/// At each level the smallest digit of `D` above the current digit, followed by
/// the all-`min D` tail, is a candidate; deeper candidates are closer to the
/// query point, so only the deepest is kept. A repeated remainder means the
/// whole expansion lies in `D`.
fn walk<W: Word>(set: &MissingDigitSet, n: W, q: W, strict: bool) -> Walk {
    let b = set.b;
    let max_d = set.max_digit();
    let mut digits: Vec<u64> = Vec::new();
    let mut fallback: Option<(usize, u64)> = None;
    let mut last_below_max: Option<usize> = None;
    let mut state = n;
    let mut tortoise = state.clone();
    let (mut power, mut lam) = (1usize, 0usize);
    let finish = |digits: &[u64], fallback: Option<(usize, u64)>| match fallback {
        Some((level, d)) => {
            let mut prefix = digits[..level].to_vec();
            prefix.push(d);
            Walk::Fallback(prefix)
        }
        None => Walk::Nothing,
    };
    loop {
        let level = digits.len();
        let (k, rem) = state.mul_u64(b).div_rem(&q);
        let k = k.to_u64().expect("digit below b");
        if !strict
            && rem.is_nil()
            && k >= 1
            && set.contains_digit(k - 1)
            && set.contains_digit(b - 1)
        {
            return Walk::Query;
        }
        if let Some(d) = set.next_above[k as usize] {
            fallback = Some((level, d));
        }
        if !set.contains_digit(k) {
            return finish(&digits, fallback);
        }
        digits.push(k);
        if k < max_d {
            last_below_max = Some(level);
        }
        state = rem;
        lam += 1;
        if state == tortoise {
            if !strict {
                return Walk::Query;
            }
            // The last `lam` digits form one full period of the expansion.
            let period_start = digits.len() - lam;
            return match last_below_max {
                Some(i) if i >= period_start => Walk::RightLimit,
                _ => finish(&digits, fallback),
            };
        }
        if lam == power {
            tortoise = state.clone();
            power *= 2;
            lam = 0;
        }
    }
}
