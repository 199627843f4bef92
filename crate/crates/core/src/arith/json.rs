//! Serialization helpers for arbitrary-precision integers.
//!
//! Integers that fit in 64 bits are written as JSON numbers; larger ones as
//! decimal strings, so that the output never loses precision.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

pub(crate) struct BigIntJson<'a>(pub &'a BigInt);

impl Serialize for BigIntJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if let Some(v) = self.0.to_i64() {
            s.serialize_i64(v)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

pub(crate) fn biguint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

pub(crate) fn opt_biguint<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => biguint(x, s),
        None => s.serialize_none(),
    }
}

pub(crate) fn opt_biguint_vec<S: Serializer>(
    v: &Option<Vec<BigUint>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    match v {
        None => s.serialize_none(),
        Some(items) => {
            let mut seq = s.serialize_seq(Some(items.len()))?;
            for it in items {
                seq.serialize_element(&BigUintJson(it))?;
            }
            seq.end()
        }
    }
}

pub(crate) struct BigUintJson<'a>(pub &'a BigUint);

impl Serialize for BigUintJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        biguint(self.0, s)
    }
}

/// Round to 12 significant digits so that float output is byte-stable.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub(crate) fn float12<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(round_sig(*v))
    } else if v.is_nan() {
        s.serialize_str("NaN")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn opt_float12<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => float12(x, s),
        None => s.serialize_none(),
    }
}
