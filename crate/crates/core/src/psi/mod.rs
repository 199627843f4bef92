//! Approximation functions `ψ`.
//!
//! The stepped geometric family `ψ(n) = c·β^{−⌈(pn+q)/r⌉}` is exactly
//! evaluable and drives every set enumeration. The float family
//! `ψ(n) = c·base^{−rate·n}·n^{−τ}` is only used for dimension values.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{compare_log_form, LogLinearForm, LogRatio, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PsiSpec {
    /// `ψ(n) = c·beta^{−⌈(p·n + q)/r⌉}`.
    Stepped {
        c: Rational,
        beta: u64,
        p: u64,
        q: i64,
        r: u64,
    },
    /// `ψ(n) = c·base^{−rate·n}·n^{−tau}`.
    Float {
        base: u64,
        c: f64,
        tau: f64,
        rate: f64,
    },
}

impl PsiSpec {
    pub fn stepped(c: Rational, beta: u64, p: u64, q: i64, r: u64) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::domain("psi constant c must be positive"));
        }
        if beta < 2 {
            return Err(Error::domain("psi base beta must be at least 2"));
        }
        if r == 0 {
            return Err(Error::domain("psi step r must be positive"));
        }
        Ok(PsiSpec::Stepped { c, beta, p, q, r })
    }

    /// `beta^{−(p·n + q)}`.
    pub fn geometric(beta: u64, p: u64, q: i64) -> Result<Self> {
        Self::stepped(Rational::one(), beta, p, q, 1)
    }

    pub fn float(base: u64, c: f64, tau: f64, rate: f64) -> Result<Self> {
        if base < 2 {
            return Err(Error::domain("psi base must be at least 2"));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain("psi constant c must be positive"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::domain("psi exponent tau must be non-negative"));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::domain("psi rate must be non-negative"));
        }
        Ok(PsiSpec::Float { base, c, tau, rate })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PsiSpec::Stepped { .. })
    }

    fn require_stepped(&self) -> Result<(&Rational, u64, u64, i64, u64)> {
        match self {
            PsiSpec::Stepped { c, beta, p, q, r } => Ok((c, *beta, *p, *q, *r)),
            PsiSpec::Float { .. } => Err(Error::capability(
                "float-only psi supports dimension values, not exact evaluation",
            )),
        }
    }

    /// The integer exponent `⌈(p·n + q)/r⌉` of a stepped spec.
    pub fn step_exponent(&self, n: u64) -> Result<i64> {
        let (_, _, p, q, r) = self.require_stepped()?;
        let num = p as i128 * n as i128 + q as i128;
        Ok(Integer::div_ceil(&num, &(r as i128)) as i64)
    }

    /// `ψ(n)` exactly.
    pub fn eval_exact(&self, n: u64) -> Result<Rational> {
        let (c, beta, ..) = self.require_stepped()?;
        let e = self.step_exponent(n)?;
        Ok(c * &Rational::from(beta).pow(-e)?)
    }

    /// Natural logarithm of `ψ(n)`.
    pub fn ln_eval(&self, n: u64) -> f64 {
        match self {
            PsiSpec::Stepped { c, beta, .. } => {
                let e = self.step_exponent(n).expect("stepped");
                ln_rational(c) - e as f64 * (*beta as f64).ln()
            }
            PsiSpec::Float { base, c, tau, rate } => {
                let nf = n.max(1) as f64;
                c.ln() - rate * nf * (*base as f64).ln() - tau * nf.ln()
            }
        }
    }

    /// Per-step decay `(p/r)·log beta` of a stepped spec.
    pub fn decay_form(&self) -> Result<LogLinearForm> {
        let (_, beta, p, _, r) = self.require_stepped()?;
        LogLinearForm::term(Rational::frac(p as i64, r as i64), beta)
    }

    /// Sign of `ψ(n) − other`.
    pub fn compare_at(&self, n: u64, other: &Rational) -> Result<Ordering> {
        Ok(self.eval_exact(n)?.cmp(other))
    }
}

pub(crate) fn ln_rational(r: &Rational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 900;
    (x.abs() >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `λ_ψ = liminf −log ψ(n) / (n log t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda {
    #[serde(serialize_with = "crate::arith::json::float12")]
    pub value: f64,
    /// Exact value for stepped specs.
    pub exact: Option<LogRatio>,
}

pub fn lambda_psi(psi: &PsiSpec, t: u64) -> Result<Lambda> {
    if t < 2 {
        return Err(Error::domain("t must be at least 2"));
    }
    match psi {
        PsiSpec::Stepped { p: 0, .. } => Ok(Lambda {
            value: 0.0,
            exact: Some(LogRatio {
                num: LogLinearForm::zero(),
                den: LogLinearForm::log(t)?,
            }),
        }),
        PsiSpec::Stepped { .. } => {
            let exact = LogRatio {
                num: psi.decay_form()?,
                den: LogLinearForm::log(t)?,
            };
            Ok(Lambda {
                value: exact.to_f64(),
                exact: Some(exact),
            })
        }
        PsiSpec::Float { base, rate, .. } => Ok(Lambda {
            value: rate * (*base as f64).ln() / (t as f64).ln(),
            exact: None,
        }),
    }
}

/// A threshold sequence `k·b^{−⌈alpha·n⌉ − shift}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    pub k: Rational,
    pub b: u64,
    pub alpha: Rational,
    pub shift: i64,
}

impl Threshold {
    /// `b^{−⌈alpha·n⌉−1}`.
    pub fn alpha2(b: u64, alpha2: Rational) -> Self {
        Threshold {
            k: Rational::one(),
            b,
            alpha: alpha2,
            shift: 1,
        }
    }

    pub fn exponent(&self, n: u64) -> i64 {
        let e = crate::arith::ceil_scale(&self.alpha, n);
        e.to_i64().expect("exponent fits in i64") + self.shift
    }

    pub fn eval(&self, n: u64) -> Rational {
        &self.k * &Rational::from(self.b).pow(-self.exponent(n)).expect("b >= 2")
    }
}

/// Outcome of an eventual threshold comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdDecision {
    pub holds: bool,
    /// Least `N0` with `ψ(n) ≤ threshold(n)` for every `n ≥ N0`.
    pub n0: Option<u64>,
}

/// Decide whether `ψ(n) ≤ b^{−⌈alpha2·n⌉−1}` for all large `n`.
pub fn eventually_below_threshold(
    psi: &PsiSpec,
    b: u64,
    alpha2: &Rational,
) -> Result<ThresholdDecision> {
    eventually_below(psi, &Threshold::alpha2(b, alpha2.clone()))
}

/// Decide whether `ψ(n) ≤ thr(n)` for all large `n`, and find the least `N0`.
///
/// The exponential slopes are compared exactly. With a strictly faster decay
/// of `ψ`, a stabilization point is located by an exact check of a linear
/// lower bound and every earlier `n` is tested directly. On a slope tie the
/// difference of the two exponent sequences is periodic, so one period decides.
pub fn eventually_below(psi: &PsiSpec, thr: &Threshold) -> Result<ThresholdDecision> {
    let (c, beta, _p, q, r) = psi.require_stepped()?;
    if thr.b < 2 {
        return Err(Error::domain("threshold base must be at least 2"));
    }
    if !thr.k.is_positive() {
        return Ok(ThresholdDecision {
            holds: false,
            n0: None,
        });
    }
    let log_b = LogLinearForm::log(thr.b)?;
    let slope = psi.decay_form()?.minus(&log_b.scaled(&thr.alpha));
    let holds_at = |n: u64| -> Result<bool> { Ok(psi.eval_exact(n)? <= thr.eval(n)) };
    match compare_log_form(&slope)? {
        Ordering::Less => Ok(ThresholdDecision {
            holds: false,
            n0: None,
        }),
        Ordering::Equal => {
            let period = r.lcm(&u64::try_from(thr.alpha.denom()).expect("small denominator"));
            for n in 1..=period {
                if !holds_at(n)? {
                    return Ok(ThresholdDecision {
                        holds: false,
                        n0: None,
                    });
                }
            }
            Ok(ThresholdDecision {
                holds: true,
                n0: Some(1),
            })
        }
        Ordering::Greater => {
            // For n ≥ n*, ψ(n) ≤ c·β^{−(pn+q)/r} ≤ k·b^{−αn−1−shift} ≤ thr(n).
            // The middle inequality is linear in n, so checking it at n* suffices.
            let log_c = log_of_rational(c)?;
            let log_k = log_of_rational(&thr.k)?;
            let beta_form = LogLinearForm::log(beta)?;
            let bound_at = |n: u64| -> Result<bool> {
                let lhs = beta_form.scaled(&Rational::frac(q, r as i64)).plus(&psi.decay_form()?.scaled(&Rational::from(n)));
                let rhs = log_c
                    .minus(&log_k)
                    .plus(&log_b.scaled(&(&thr.alpha * &Rational::from(n) + Rational::from(1 + thr.shift))));
                Ok(compare_log_form(&lhs.minus(&rhs))? != Ordering::Less)
            };
            let slope_f = slope.to_f64().max(f64::MIN_POSITIVE);
            let offset = ln_rational(c) - ln_rational(&thr.k)
                + (1 + thr.shift) as f64 * (thr.b as f64).ln()
                - (q as f64 / r as f64) * (beta as f64).ln();
            let mut n_star = ((offset / slope_f).max(1.0).ceil() as u64).saturating_add(1);
            while !bound_at(n_star)? {
                n_star = n_star.saturating_mul(2);
                if n_star > 1 << 24 {
                    return Err(Error::resource("threshold stabilization point is too far out"));
                }
            }
            let mut n0 = 1;
            for n in (1..n_star).rev() {
                if !holds_at(n)? {
                    n0 = n + 1;
                    break;
                }
            }
            Ok(ThresholdDecision {
                holds: true,
                n0: Some(n0),
            })
        }
    }
}

/// `log(x)` for a positive rational with 64-bit numerator and denominator.
pub(crate) fn log_of_rational(x: &Rational) -> Result<LogLinearForm> {
    let part = |v: &BigInt| -> Result<LogLinearForm> {
        let v = v.to_u64().ok_or_else(|| {
            Error::capability(format!("constant {x} is too large for an exact log form"))
        })?;
        if v == 1 {
            Ok(LogLinearForm::zero())
        } else {
            LogLinearForm::log(v)
        }
    };
    if !x.is_positive() {
        return Err(Error::domain("logarithm of a non-positive number"));
    }
    Ok(part(x.numer())?.minus(&part(x.denom())?))
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiSpec::Stepped { c, beta, p, q, r } => {
                write!(f, "geom:c={c},beta={beta},p={p},q={q},r={r}")
            }
            PsiSpec::Float { base, c, tau, rate } => {
                write!(f, "float:t={base},c={c},tau={tau},rate={rate}")
            }
        }
    }
}

fn parse_float_expr(v: &str) -> Result<f64> {
    let v = v.trim();
    let bad = || Error::parse(format!("not a number: {v:?}"));
    if let Some((a, b)) = v.split_once('/') {
        let inner = |s: &str| -> Result<f64> {
            let s = s.trim();
            match s.strip_prefix("log(").and_then(|s| s.strip_suffix(')')) {
                Some(arg) => Ok(parse_float_expr(arg)?.ln()),
                None => s.parse::<f64>().map_err(|_| bad()),
            }
        };
        return Ok(inner(a)? / inner(b)?);
    }
    v.parse::<f64>().map_err(|_| bad())
}

impl FromStr for PsiSpec {
    type Err = Error;

    /// Parses `geom:c=1/4,beta=5,p=1,q=0,r=1` or `float:t=2,c=1,tau=0.01[,rate=…]`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("psi spec needs a kind prefix: {s:?}")))?;
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got {part:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let int = |key: &str, default: Option<i64>| -> Result<i64> {
            match kv.get(key) {
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::parse(format!("{key}={v} is not an integer"))),
                None => default.ok_or_else(|| Error::parse(format!("missing {key}="))),
            }
        };
        let nonneg = |key: &str, default: Option<i64>| -> Result<u64> {
            u64::try_from(int(key, default)?)
                .map_err(|_| Error::domain(format!("{key} must be non-negative")))
        };
        match kind.trim() {
            "geom" => {
                let allowed = ["c", "beta", "p", "q", "r"];
                if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(Error::parse(format!("unknown geom key {k:?}")));
                }
                let c = match kv.get("c") {
                    Some(v) => v.parse()?,
                    None => Rational::one(),
                };
                PsiSpec::stepped(
                    c,
                    nonneg("beta", None)?,
                    nonneg("p", Some(1))?,
                    int("q", Some(0))?,
                    nonneg("r", Some(1))?,
                )
            }
            "float" => {
                let allowed = ["t", "c", "tau", "rate"];
                if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(Error::parse(format!("unknown float key {k:?}")));
                }
                let fl = |key: &str, default: f64| -> Result<f64> {
                    kv.get(key).map_or(Ok(default), |v| parse_float_expr(v))
                };
                PsiSpec::float(
                    nonneg("t", None)?,
                    fl("c", 1.0)?,
                    fl("tau", 0.0)?,
                    fl("rate", 1.0)?,
                )
            }
            other => Err(Error::parse(format!("unknown psi kind {other:?}"))),
        }
    }
}

impl Serialize for PsiSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use crate::arith::json::round_sig;
        match self {
            PsiSpec::Stepped { c, beta, p, q, r } => {
                let mut st = s.serialize_struct("PsiSpec", 7)?;
                st.serialize_field("kind", "geom")?;
                st.serialize_field("spec", &self.to_string())?;
                st.serialize_field("c", c)?;
                st.serialize_field("beta", beta)?;
                st.serialize_field("p", p)?;
                st.serialize_field("q", q)?;
                st.serialize_field("r", r)?;
                st.end()
            }
            PsiSpec::Float { base, c, tau, rate } => {
                let mut st = s.serialize_struct("PsiSpec", 6)?;
                st.serialize_field("kind", "float")?;
                st.serialize_field("spec", &self.to_string())?;
                st.serialize_field("t", base)?;
                st.serialize_field("c", &round_sig(*c))?;
                st.serialize_field("tau", &round_sig(*tau))?;
                st.serialize_field("rate", &round_sig(*rate))?;
                st.end()
            }
        }
    }
}
