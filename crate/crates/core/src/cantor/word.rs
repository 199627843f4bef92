use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// Unsigned integer backing the digit walks: `u128` when the operands are
/// small enough, `BigUint` otherwise.
pub(crate) trait Word: Clone + Eq + Ord {
    fn from_u64(x: u64) -> Self;
    fn try_from_big(x: &BigUint) -> Option<Self>;
    fn to_big(&self) -> BigUint;
    fn is_nil(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_u64(&self, k: u64) -> Self;
    fn div_rem(&self, o: &Self) -> (Self, Self);
    fn to_u64(&self) -> Option<u64>;
}

impl Word for u128 {
    fn from_u64(x: u64) -> Self {
        x as u128
    }
    fn try_from_big(x: &BigUint) -> Option<Self> {
        x.to_u128()
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_u64(&self, k: u64) -> Self {
        self * k as u128
    }
    fn div_rem(&self, o: &Self) -> (Self, Self) {
        (self / o, self % o)
    }
    fn to_u64(&self) -> Option<u64> {
        u64::try_from(*self).ok()
    }
}

impl Word for BigUint {
    fn from_u64(x: u64) -> Self {
        BigUint::from(x)
    }
    fn try_from_big(x: &BigUint) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_u64(&self, k: u64) -> Self {
        self * k
    }
    fn div_rem(&self, o: &Self) -> (Self, Self) {
        Integer::div_rem(self, o)
    }
    fn to_u64(&self) -> Option<u64> {
        ToPrimitive::to_u64(self)
    }
}

/// Whether every intermediate of a digit walk with modulus `q` in base `b` fits in `u128`.
pub(crate) fn fits_u128(q: &BigUint, b: u64) -> bool {
    q.bits() + 64 - (b.leading_zeros() as u64) < 127
}
