//! Parameter profiles of a base pair `(b, t)` and of a digit set `D`.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};

use crate::arith::{compare_log_form, factorize, LogLinearForm, LogRatio, Rational};
use crate::error::{Error, Result};

/// Multiplicative relation between `b` and `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MultClass {
    /// `b^m = t^n` for some positive `m, n`.
    Dependent,
    /// Independent, but `b` and `t` have the same prime divisors.
    IndependentSamePrimes,
    /// The prime supports of `b` and `t` differ.
    IndependentDifferentPrimes,
}

/// Classify the pair by comparing exponent vectors over the prime supports.
pub fn classify(b: u64, t: u64) -> Result<MultClass> {
    check_bases(b, t)?;
    let fb = factorize(b as i64)?;
    let ft = factorize(t as i64)?;
    if fb.primes().ne(ft.primes()) {
        return Ok(MultClass::IndependentDifferentPrimes);
    }
    let mut ratios = fb
        .primes()
        .map(|q| Rational::frac(ft.exponent(q) as i64, fb.exponent(q) as i64));
    let first = ratios.next().expect("b >= 3 has a prime divisor");
    Ok(if ratios.all(|r| r == first) {
        MultClass::Dependent
    } else {
        MultClass::IndependentSamePrimes
    })
}

fn check_bases(b: u64, t: u64) -> Result<()> {
    if b < 3 {
        return Err(Error::domain(format!("base b = {b} must be at least 3")));
    }
    if t < 2 {
        return Err(Error::domain(format!("base t = {t} must be at least 2")));
    }
    if b > i64::MAX as u64 || t > i64::MAX as u64 {
        return Err(Error::domain("bases must fit in a signed 64-bit integer"));
    }
    Ok(())
}

/// Valuation data of one common prime `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeData {
    pub q: u64,
    pub v_b: u32,
    pub v_t: u32,
    /// `v_q(t) / v_q(b)`.
    pub ratio: Rational,
}

/// Everything derivable from `(b, t)` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamProfile {
    pub b: u64,
    pub t: u64,
    pub class: MultClass,
    /// Common primes in ascending order.
    pub primes: Vec<PrimeData>,
    pub alpha1: Rational,
    pub alpha2: Rational,
    /// Number of primes whose ratio exceeds `alpha1`; only defined for independent pairs.
    #[serde(serialize_with = "inapplicable")]
    pub kstar: Option<u64>,
    /// `b` stripped of the primes whose ratio exceeds `alpha1`; only defined for independent pairs.
    #[serde(serialize_with = "inapplicable")]
    pub bstar: Option<u64>,
    /// `alpha1 = l1 / l0` in lowest terms.
    pub l0: u64,
    pub l1: u64,
}

fn inapplicable<S: Serializer, T: Serialize>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => x.serialize(s),
        None => s.serialize_str("inapplicable"),
    }
}

/// Build the profile of `(b, t)`; pairs with different prime supports are rejected.
pub fn build_param_profile(b: u64, t: u64) -> Result<ParamProfile> {
    let class = classify(b, t)?;
    if class == MultClass::IndependentDifferentPrimes {
        return Err(Error::hypothesis(format!(
            "b = {b} and t = {t} have different prime divisors; alpha1 and alpha2 are undefined"
        )));
    }
    let fb = factorize(b as i64)?;
    let ft = factorize(t as i64)?;
    let primes: Vec<PrimeData> = fb
        .primes()
        .map(|q| {
            let (v_b, v_t) = (fb.exponent(q), ft.exponent(q));
            PrimeData {
                q,
                v_b,
                v_t,
                ratio: Rational::frac(v_t as i64, v_b as i64),
            }
        })
        .collect();
    let alpha1 = primes.iter().map(|p| &p.ratio).min().unwrap().clone();
    let alpha2 = primes.iter().map(|p| &p.ratio).max().unwrap().clone();
    let (kstar, bstar) = if class == MultClass::IndependentSamePrimes {
        let upper: Vec<&PrimeData> = primes.iter().filter(|p| p.ratio > alpha1).collect();
        let strip: u64 = upper.iter().map(|p| p.q.pow(p.v_b)).product();
        (Some(upper.len() as u64), Some(b / strip))
    } else {
        (None, None)
    };
    let l0 = u64::try_from(alpha1.denom()).expect("small denominator");
    let l1 = u64::try_from(alpha1.numer()).expect("small numerator");
    Ok(ParamProfile {
        b,
        t,
        class,
        primes,
        alpha1,
        alpha2,
        kstar,
        bstar,
        l0,
        l1,
    })
}

impl ParamProfile {
    /// `log t / log b` as an exact ratio of logarithms.
    pub fn log_t_over_log_b(&self) -> LogRatio {
        LogRatio::of_logs(self.t, self.b).expect("bases are at least 2")
    }

    pub fn is_independent_same_primes(&self) -> bool {
        self.class == MultClass::IndependentSamePrimes
    }

    /// `⌈alpha2 · n⌉`.
    pub fn ceil_alpha2(&self, n: u64) -> u64 {
        let v = crate::arith::ceil_scale(&self.alpha2, n);
        u64::try_from(v).expect("level fits in u64")
    }
}

/// Exactly decide `alpha1 < log t / log b < alpha2`.
pub fn check_strict_sandwich(profile: &ParamProfile) -> Result<bool> {
    if profile.class != MultClass::IndependentSamePrimes {
        return Err(Error::hypothesis(format!(
            "strict sandwich needs multiplicatively independent bases with equal prime support; ({}, {}) is {:?}",
            profile.b, profile.t, profile.class
        )));
    }
    let log_t = LogLinearForm::log(profile.t)?;
    let log_b = LogLinearForm::log(profile.b)?;
    let lower = compare_log_form(&log_t.minus(&log_b.scaled(&profile.alpha1)))?;
    let upper = compare_log_form(&log_b.scaled(&profile.alpha2).minus(&log_t))?;
    Ok(lower == Ordering::Greater && upper == Ordering::Greater)
}

/// Everything derivable from `(b, t, D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitProfile {
    #[serde(rename = "D")]
    pub digits: Vec<u64>,
    /// `log #D / log b`.
    pub gamma: LogRatio,
    pub mstar: u64,
    #[serde(rename = "D1", serialize_with = "inapplicable")]
    pub d1: Option<Vec<u64>>,
    #[serde(rename = "D2", serialize_with = "inapplicable")]
    pub d2: Option<Vec<u64>>,
    #[serde(rename = "Dstar", serialize_with = "inapplicable")]
    pub dstar: Option<Vec<u64>>,
    #[serde(serialize_with = "inapplicable")]
    pub d_subset_dstar: Option<bool>,
    /// `0 ∈ D` or `b − 1 ∈ D`.
    pub has_extreme_digit: bool,
}

/// Sort a digit list and check it against base `b`.
pub fn normalize_digits(b: u64, digits: &[u64]) -> Result<Vec<u64>> {
    let mut d = digits.to_vec();
    d.sort_unstable();
    if let Some(w) = d.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("digit {} listed twice", w[0])));
    }
    if let Some(&x) = d.iter().find(|&&x| x >= b) {
        return Err(Error::domain(format!("digit {x} out of range for base {b}")));
    }
    if d.len() < 2 {
        return Err(Error::domain("a digit set needs at least two digits"));
    }
    Ok(d)
}

/// `min(min D, b − 1 − max D)`.
pub fn mstar(b: u64, digits: &[u64]) -> u64 {
    let lo = *digits.iter().min().expect("non-empty");
    let hi = *digits.iter().max().expect("non-empty");
    lo.min(b - 1 - hi)
}

/// Build the digit profile; `D1`, `D2`, `Dstar` are only populated for independent pairs.
pub fn build_digit_profile(profile: &ParamProfile, digits: &[u64]) -> Result<DigitProfile> {
    let b = profile.b;
    let digits = normalize_digits(b, digits)?;
    let gamma = LogRatio::of_logs(digits.len() as u64, b)?;
    let mstar = mstar(b, &digits);
    let has_extreme_digit = digits[0] == 0 || *digits.last().unwrap() == b - 1;
    let (d1, d2, dstar, subset) = match profile.bstar {
        Some(bstar) => {
            let d1: Vec<u64> = (1..b / bstar).map(|k| k * bstar).collect();
            let d2: Vec<u64> = d1.iter().map(|d| d - 1).collect();
            let dstar: Vec<u64> = (0..b)
                .filter(|x| !d1.contains(x) && !d2.contains(x))
                .collect();
            let subset = digits.iter().all(|d| dstar.contains(d));
            (Some(d1), Some(d2), Some(dstar), Some(subset))
        }
        None => (None, None, None, None),
    };
    Ok(DigitProfile {
        digits,
        gamma,
        mstar,
        d1,
        d2,
        dstar,
        d_subset_dstar: subset,
        has_extreme_digit,
    })
}

impl DigitProfile {
    pub fn size(&self) -> u64 {
        self.digits.len() as u64
    }

    pub fn gamma_value(&self) -> f64 {
        self.gamma.to_f64()
    }
}
