use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::factor::factorize;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Default cap on the size of either side of an exact log comparison.
pub const DEFAULT_BITS_CAP: u64 = 1_000_000;

/// A rational linear combination `Σ cᵢ·log aᵢ` of logarithms of integers `aᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogLinearForm {
    terms: Vec<(Rational, u64)>,
}

impl LogLinearForm {
    pub fn zero() -> Self {
        LogLinearForm { terms: Vec::new() }
    }

    pub fn new(terms: Vec<(Rational, u64)>) -> Result<Self> {
        if let Some((_, a)) = terms.iter().find(|(_, a)| *a < 2) {
            return Err(Error::domain(format!("logarithm base {a} must be at least 2")));
        }
        Ok(LogLinearForm { terms })
    }

    /// `log a`.
    pub fn log(a: u64) -> Result<Self> {
        Self::term(Rational::one(), a)
    }

    /// `c·log a`.
    pub fn term(c: Rational, a: u64) -> Result<Self> {
        Self::new(vec![(c, a)])
    }

    pub fn terms(&self) -> &[(Rational, u64)] {
        &self.terms
    }

    pub fn plus(&self, other: &LogLinearForm) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LogLinearForm { terms }
    }

    pub fn minus(&self, other: &LogLinearForm) -> Self {
        self.plus(&other.negated())
    }

    pub fn negated(&self) -> Self {
        self.scaled(&Rational::from(-1i64))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        LogLinearForm {
            terms: self.terms.iter().map(|(k, a)| (k * c, *a)).collect(),
        }
    }

    /// Floating value; for display and cross-checks only.
    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(c, a)| c.to_f64() * (*a as f64).ln()).sum()
    }

    /// The form rewritten as `Σ e_q·log q` over primes, with zero exponents dropped.
    pub fn prime_exponents(&self) -> BTreeMap<u64, Rational> {
        let mut acc: BTreeMap<u64, Rational> = BTreeMap::new();
        for (c, a) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let fac = factorize(*a as i64).expect("bases are at least 2");
            for (&q, &e) in fac.factors() {
                let entry = acc.entry(q).or_insert_with(Rational::zero);
                *entry = &*entry + &(c * &Rational::from(e as u64));
            }
        }
        acc.retain(|_, v| !v.is_zero());
        acc
    }

    /// Exactly zero, decided by unique factorization.
    pub fn is_zero(&self) -> bool {
        self.prime_exponents().is_empty()
    }

    /// The rational `k` with `self = k·other`, if the two forms are proportional.
    pub fn ratio_to(&self, other: &LogLinearForm) -> Option<Rational> {
        let a = self.prime_exponents();
        let b = other.prime_exponents();
        if b.is_empty() {
            return None;
        }
        if a.is_empty() {
            return Some(Rational::zero());
        }
        if a.len() != b.len() || a.keys().ne(b.keys()) {
            return None;
        }
        let (q0, b0) = b.iter().next().unwrap();
        let k = &a[q0] / b0;
        b.iter().all(|(q, e)| a[q] == &k * e).then_some(k)
    }
}

static BITS_CAP: AtomicU64 = AtomicU64::new(DEFAULT_BITS_CAP);

/// Set the process-wide size cap used by [`compare_log_form`].
pub fn set_bits_cap(bits: u64) {
    BITS_CAP.store(bits, AtomicOrdering::Relaxed);
}

/// Exact sign of a log-linear form, with the process-wide size cap.
pub fn compare_log_form(f: &LogLinearForm) -> Result<Ordering> {
    compare_log_form_capped(f, BITS_CAP.load(AtomicOrdering::Relaxed))
}

/// Exact sign of `Σ cᵢ·log aᵢ`.
///
/// The form is merged over primes, denominators are cleared, and the two
/// integer products `∏ q^{E_q}` for positive and negative exponents are
/// compared. A resource error is returned instead of building an integer larger
/// than `max_bits`.
pub fn compare_log_form_capped(f: &LogLinearForm, max_bits: u64) -> Result<Ordering> {
    let exps = f.prime_exponents();
    if exps.is_empty() {
        return Ok(Ordering::Equal);
    }
    if exps.values().all(|e| e.is_positive()) {
        return Ok(Ordering::Greater);
    }
    if exps.values().all(|e| e.is_negative()) {
        return Ok(Ordering::Less);
    }
    let lcm = exps
        .values()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let mut ints: Vec<(u64, BigInt)> = exps
        .iter()
        .map(|(q, e)| (*q, e.numer() * (&lcm / e.denom())))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, e)| acc.gcd(e));
    for (_, e) in ints.iter_mut() {
        *e = &*e / &g;
    }
    let mut pos = BigUint::one();
    let mut neg = BigUint::one();
    let mut pos_bits = 0f64;
    let mut neg_bits = 0f64;
    for (q, e) in &ints {
        let mag = e.abs().to_f64().unwrap_or(f64::INFINITY);
        let bits = mag * (*q as f64).log2();
        if e.is_positive() {
            pos_bits += bits;
        } else {
            neg_bits += bits;
        }
        if pos_bits.max(neg_bits) > max_bits as f64 {
            return Err(Error::resource(format!(
                "exact log comparison needs more than {max_bits} bits"
            )));
        }
    }
    for (q, e) in &ints {
        let exp = e.abs().to_u32().expect("bounded by the bits cap");
        let power = BigUint::from(*q).pow(exp);
        if e.is_positive() {
            pos *= power;
        } else {
            neg *= power;
        }
    }
    Ok(pos.cmp(&neg))
}

impl fmt::Display for LogLinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, a)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if mag == 1 {
                write!(f, "log({a})")?;
            } else {
                write!(f, "{mag}*log({a})")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermJson<'a> {
    coef: &'a Rational,
    base: u64,
}

impl Serialize for LogLinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(c, a)| TermJson { coef: c, base: *a }))
    }
}

/// A quotient of two log-linear forms, such as `log #D / log b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRatio {
    pub num: LogLinearForm,
    pub den: LogLinearForm,
}

impl LogRatio {
    /// `log a / log b`.
    pub fn of_logs(a: u64, b: u64) -> Result<Self> {
        Ok(LogRatio {
            num: LogLinearForm::log(a)?,
            den: LogLinearForm::log(b)?,
        })
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }

    /// The exact rational value when numerator and denominator are proportional.
    pub fn as_rational(&self) -> Option<Rational> {
        self.num.ratio_to(&self.den)
    }
}

impl fmt::Display for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl Serialize for LogRatio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LogRatio", 4)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.serialize_field("exact", &self.as_rational())?;
        st.serialize_field("value", &super::json::round_sig(self.to_f64()))?;
        st.end()
    }
}

/// An exponent `s` that is either rational or of the form `c·log A / log B`.
///
/// The second shape represents boundary exponents such as `s = log 2 / log 3`
/// exactly, which is enough to decide criterion sums whose growth term is a
/// multiple of `log B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExponent {
    Rational(Rational),
    LogRatio { scale: Rational, num: u64, den: u64 },
}

impl SExponent {
    /// `scale·log num / log den`, collapsed to a rational when the logs are commensurable.
    pub fn log_ratio(scale: Rational, num: u64, den: u64) -> Result<Self> {
        if den < 2 {
            return Err(Error::domain("log ratio denominator base must be at least 2"));
        }
        if num == 1 || scale.is_zero() {
            return Ok(SExponent::Rational(Rational::zero()));
        }
        if num == 0 {
            return Err(Error::domain("log(0) is undefined"));
        }
        let r = LogRatio::of_logs(num, den)?;
        Ok(match r.as_rational() {
            Some(q) => SExponent::Rational(&q * &scale),
            None => SExponent::LogRatio { scale, num, den },
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            SExponent::Rational(r) => r.to_f64(),
            SExponent::LogRatio { scale, num, den } => {
                scale.to_f64() * (*num as f64).ln() / (*den as f64).ln()
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            SExponent::Rational(r) => r.is_negative(),
            SExponent::LogRatio { scale, .. } => scale.is_negative(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            SExponent::Rational(r) => Some(r),
            SExponent::LogRatio { .. } => None,
        }
    }

    /// `s·form` as a log-linear form.
    ///
    /// For a log-ratio exponent this is linear only when `form` is a rational
    /// multiple of `log den`; otherwise a capability error is returned.
    pub fn times(&self, form: &LogLinearForm) -> Result<LogLinearForm> {
        match self {
            SExponent::Rational(r) => Ok(form.scaled(r)),
            SExponent::LogRatio { scale, num, den } => {
                let k = form.ratio_to(&LogLinearForm::log(*den)?).ok_or_else(|| {
                    Error::capability(format!(
                        "s = {self} times {form} is not a rational log-linear form"
                    ))
                })?;
                LogLinearForm::term(&k * scale, *num)
            }
        }
    }
}

impl From<Rational> for SExponent {
    fn from(r: Rational) -> Self {
        SExponent::Rational(r)
    }
}

impl fmt::Display for SExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExponent::Rational(r) => write!(f, "{r}"),
            SExponent::LogRatio { scale, num, den } if *scale == 1 => {
                write!(f, "log({num})/log({den})")
            }
            SExponent::LogRatio { scale, num, den } => write!(f, "{scale}*log({num})/log({den})"),
        }
    }
}

impl FromStr for SExponent {
    type Err = Error;

    /// Accepts `a/b`, `log(A)/log(B)` and `c*log(A)/log(B)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.contains("log") {
            return Ok(SExponent::Rational(s.parse()?));
        }
        let bad = || Error::parse(format!("expected c*log(A)/log(B), got {s:?}"));
        let (scale, rest) = match s.split_once('*') {
            Some((c, rest)) => (c.parse::<Rational>()?, rest.trim()),
            None => (Rational::one(), s),
        };
        let (a, b) = rest.split_once('/').ok_or_else(bad)?;
        let arg = |part: &str| -> Result<u64> {
            part.trim()
                .strip_prefix("log(")
                .and_then(|p| p.strip_suffix(')'))
                .and_then(|p| p.trim().parse().ok())
                .ok_or_else(bad)
        };
        SExponent::log_ratio(scale, arg(a)?, arg(b)?)
    }
}

impl Serialize for SExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SExponent::Rational(r) => r.serialize(s),
            SExponent::LogRatio { scale, num, den } => {
                let mut st = s.serialize_struct("SExponent", 4)?;
                st.serialize_field("scale", scale)?;
                st.serialize_field("log_num", num)?;
                st.serialize_field("log_den", den)?;
                st.serialize_field("value", &super::json::round_sig(self.to_f64()))?;
                st.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(terms: &[(i64, i64, u64)]) -> LogLinearForm {
        LogLinearForm::new(
            terms
                .iter()
                .map(|&(n, d, a)| (Rational::frac(n, d), a))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(compare_log_form(&form(&[(1, 1, 8), (-3, 1, 2)])).unwrap(), Ordering::Equal);
        assert_eq!(compare_log_form(&form(&[(1, 2, 9), (-1, 1, 3)])).unwrap(), Ordering::Equal);
        assert_eq!(compare_log_form(&form(&[(1, 1, 12), (-2, 1, 6)])).unwrap(), Ordering::Less);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(compare_log_form(&LogLinearForm::zero()).unwrap(), Ordering::Equal);
        assert!(LogLinearForm::new(vec![(Rational::one(), 1)]).is_err());
    }

    #[test]
    fn close_call() {
        // 2^10 = 1024 > 1000 = 10^3
        assert_eq!(compare_log_form(&form(&[(10, 1, 2), (-3, 1, 10)])).unwrap(), Ordering::Greater);
        // 3^(5/3) ≈ 6.24 > 6
        assert_eq!(compare_log_form(&form(&[(5, 3, 3), (-1, 1, 6)])).unwrap(), Ordering::Greater);
    }

    #[test]
    fn bits_cap() {
        let f = form(&[(1_000_001, 1, 3), (-1_500_000, 1, 2)]);
        assert!(matches!(compare_log_form(&f), Err(Error::Resource(_))));
        assert_eq!(compare_log_form_capped(&f, 10_000_000).unwrap(), Ordering::Greater);
    }

    #[test]
    fn ratio_detection() {
        let a = form(&[(1, 1, 8)]);
        let b = form(&[(1, 1, 2)]);
        assert_eq!(a.ratio_to(&b), Some(Rational::from(3i64)));
        assert_eq!(form(&[(1, 1, 6)]).ratio_to(&b), None);
    }

    #[test]
    fn s_exponent_parsing() {
        assert_eq!(
            "1/2".parse::<SExponent>().unwrap(),
            SExponent::Rational(Rational::frac(1, 2))
        );
        let s: SExponent = "log(2)/log(3)".parse().unwrap();
        assert!(matches!(s, SExponent::LogRatio { num: 2, den: 3, .. }));
        assert_eq!(
            "log(8)/log(2)".parse::<SExponent>().unwrap(),
            SExponent::Rational(Rational::from(3i64))
        );
        assert!("log(2)/lg(3)".parse::<SExponent>().is_err());
    }

    #[test]
    fn s_times_commensurable_form() {
        let s: SExponent = "log(2)/log(3)".parse().unwrap();
        let f = s.times(&form(&[(2, 1, 3)])).unwrap();
        assert_eq!(f.ratio_to(&form(&[(1, 1, 4)])), Some(Rational::one()));
        assert!(matches!(s.times(&form(&[(1, 1, 2)])), Err(Error::Capability(_))));
    }
}
