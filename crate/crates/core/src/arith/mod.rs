//! Exact integer and rational kernel.
//!
//! Everything downstream is decided with these primitives: prime
//! factorizations and valuations for the parameter profile, normalized
//! rationals for ball centres and radii, and exact sign decisions for rational
//! combinations of logarithms of integers.

mod factor;
pub(crate) mod json;
mod logform;
mod rational;

pub use factor::{factorize, is_prime, power_divides, valuation, PrimeFactorization};
pub use json::round_sig;
pub use logform::{
    compare_log_form, compare_log_form_capped, set_bits_cap, LogLinearForm, LogRatio, SExponent,
    DEFAULT_BITS_CAP,
};
pub use rational::{ceil_scale, Rational};

use num_bigint::BigUint;
use num_traits::One;

/// `base^exp` as an arbitrary-precision integer.
pub fn big_pow(base: u64, exp: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut sq = BigUint::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}
