use std::cmp::Ordering;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{converges_geometric, criterion_sign, threshold_holds};
use crate::arith::{big_pow, compare_log_form, LogLinearForm, Rational, SExponent};
use crate::cantor::{grid_count_intervals, grid_count_pow, Interval, MissingDigitSet};
use crate::error::{Error, Result};
use crate::params::{build_digit_profile, build_param_profile, classify, DigitProfile, MultClass, ParamProfile};
use crate::psi::{eventually_below, PsiSpec, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeasureClass {
    Zero,
    /// `H^s(W ∩ C) = H^s(C)`.
    FullMeasureOfC,
    Infinite,
    EmptySet,
    GapUnknown,
    NotApplicable,
}

/// The criterion behind a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Middle-third Cantor set with `t = 3`.
    #[serde(rename = "LSV")]
    MiddleThird,
    /// `b = t` with the `m*`-shifted sum.
    #[serde(rename = "LLW1")]
    ShiftedSum,
    /// Multiplicatively dependent `b ≠ t` with `Σ ψ(n)^s t^{γn}`.
    #[serde(rename = "LLW-dependent")]
    DependentSum,
    /// Convergence of `Σ ψ(n)^s b^{α₂γn}`.
    #[serde(rename = "LLW2-convergent")]
    Alpha2Convergent,
    /// Divergence of `Σ ψ(n)^s b^{α₁γn}`.
    #[serde(rename = "LLW2-divergent")]
    Alpha1Divergent,
    /// Emptiness when `D` avoids `0` and `b − 1`.
    #[serde(rename = "Thm1.1(i)")]
    Emptiness,
    /// Identity with `W_{b^{α₁}}(ψ)` for integer `α₁`.
    #[serde(rename = "Thm1.1(ii)")]
    Alpha1Identity,
    /// The `α₁` criterion for `D ⊆ D*`.
    #[serde(rename = "Thm1.2")]
    Alpha1Criterion,
    /// Box-counting sufficient condition for measure zero.
    #[serde(rename = "Thm1.4")]
    BoxCounting,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

fn hyp(name: &str, holds: bool) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        holds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub measure_class: MeasureClass,
    pub theorem_applied: Theorem,
    pub s: SExponent,
    pub notes: String,
    pub hypotheses: Vec<Hypothesis>,
}

impl Verdict {
    fn new(class: MeasureClass, theorem: Theorem, s: &SExponent, notes: impl Into<String>, hypotheses: Vec<Hypothesis>) -> Self {
        Verdict {
            measure_class: class,
            theorem_applied: theorem,
            s: s.clone(),
            notes: notes.into(),
            hypotheses,
        }
    }
}

/// Hausdorff `s`-measure verdict for `W_t(ψ) ∩ C(b, D)`.
///
/// Capability errors are returned when `s` is a log ratio that does not
/// combine linearly with the decay of `ψ`.
pub fn measure_verdict(
    profile: &ParamProfile,
    digits: &DigitProfile,
    psi: &PsiSpec,
    s: &SExponent,
) -> Result<Verdict> {
    if s.is_negative() {
        return Err(Error::domain("s must be non-negative"));
    }
    if !psi.is_exact() {
        let theorem = match profile.class {
            MultClass::Dependent if profile.b == profile.t => Theorem::ShiftedSum,
            MultClass::Dependent => Theorem::DependentSum,
            _ => Theorem::Alpha2Convergent,
        };
        return Ok(Verdict::new(
            MeasureClass::NotApplicable,
            theorem,
            s,
            "criterion sums are only decided for stepped psi",
            vec![hyp("psi is stepped geometric", false)],
        ));
    }
    let log_d = LogLinearForm::log(digits.size())?;
    match profile.class {
        MultClass::Dependent if profile.b == profile.t => shifted_sum(profile, digits, psi, s, &log_d),
        MultClass::Dependent => dependent(profile, digits, psi, s, &log_d),
        MultClass::IndependentSamePrimes => independent(profile, digits, psi, s, &log_d),
        MultClass::IndependentDifferentPrimes => Ok(different_primes(s)),
    }
}

/// Verdict from raw parameters, including pairs with different prime divisors.
pub fn verdict_for(b: u64, t: u64, digits: &[u64], psi: &PsiSpec, s: &SExponent) -> Result<Verdict> {
    if classify(b, t)? == MultClass::IndependentDifferentPrimes {
        crate::params::normalize_digits(b, digits)?;
        return Ok(different_primes(s));
    }
    let profile = build_param_profile(b, t)?;
    let dp = build_digit_profile(&profile, digits)?;
    measure_verdict(&profile, &dp, psi, s)
}

fn different_primes(s: &SExponent) -> Verdict {
    Verdict::new(
        MeasureClass::NotApplicable,
        Theorem::Alpha2Convergent,
        s,
        "b and t have different prime divisors; no measure criterion is available",
        vec![hyp("b and t have the same prime divisors", false)],
    )
}

fn shifted_sum(
    profile: &ParamProfile,
    digits: &DigitProfile,
    psi: &PsiSpec,
    s: &SExponent,
    log_d: &LogLinearForm,
) -> Result<Verdict> {
    let b = profile.b;
    let theorem = if b == 3 && digits.digits == [0, 2] {
        Theorem::MiddleThird
    } else {
        Theorem::ShiftedSum
    };
    let mut hypotheses = vec![hyp("b = t", true), hyp("m* = 0", digits.mstar == 0)];
    if digits.mstar > 0 {
        let shift = Threshold {
            k: Rational::frac(digits.mstar as i64, (b - 1) as i64),
            b,
            alpha: Rational::one(),
            shift: 0,
        };
        let below = eventually_below(psi, &shift)?;
        hypotheses.push(hyp("psi(n) > m*/((b-1) b^n) for infinitely many n", !below.holds));
        if below.holds {
            let n0 = below.n0.unwrap_or(1);
            let notes = if n0 == 1 {
                "the shifted sum has no terms".to_string()
            } else {
                format!("the shifted sum has terms only for n < {n0}")
            };
            return Ok(Verdict::new(
                MeasureClass::EmptySet,
                theorem,
                s,
                format!("{notes}; it converges for s = 0, so the counting measure of the intersection is zero"),
                hypotheses,
            ));
        }
    }
    // Infinitely many shifted terms are comparable to ψ(n), so the plain sum decides.
    let conv = converges_geometric(psi, s, log_d)?;
    Ok(Verdict::new(
        if conv { MeasureClass::Zero } else { MeasureClass::FullMeasureOfC },
        theorem,
        s,
        format!("sum psi(n)^s b^(gamma n) {}", if conv { "converges" } else { "diverges" }),
        hypotheses,
    ))
}

fn dependent(
    profile: &ParamProfile,
    digits: &DigitProfile,
    psi: &PsiSpec,
    s: &SExponent,
    log_d: &LogLinearForm,
) -> Result<Verdict> {
    let rho = profile
        .log_t_over_log_b()
        .as_rational()
        .expect("dependent bases have a rational log ratio");
    let mut hypotheses = vec![hyp("0 or b-1 in D", digits.has_extreme_digit)];
    if digits.has_extreme_digit {
        let conv = converges_geometric(psi, s, &log_d.scaled(&rho))?;
        return Ok(Verdict::new(
            if conv { MeasureClass::Zero } else { MeasureClass::FullMeasureOfC },
            Theorem::DependentSum,
            s,
            format!("sum psi(n)^s t^(gamma n) {}", if conv { "converges" } else { "diverges" }),
            hypotheses,
        ));
    }
    let thr = threshold_holds(psi, profile.b, &profile.alpha2)?.unwrap_or(false);
    hypotheses.push(hyp("psi(n) <= b^(-ceil(alpha2 n)-1) eventually", thr));
    if thr {
        return Ok(Verdict::new(
            MeasureClass::EmptySet,
            Theorem::Emptiness,
            s,
            "D avoids 0 and b-1 and psi is eventually below the threshold",
            hypotheses,
        ));
    }
    Ok(Verdict::new(
        MeasureClass::NotApplicable,
        Theorem::DependentSum,
        s,
        "m* > 0 with b != t: the dependent criterion needs 0 or b-1 in D",
        hypotheses,
    ))
}

fn independent(
    profile: &ParamProfile,
    digits: &DigitProfile,
    psi: &PsiSpec,
    s: &SExponent,
    log_d: &LogLinearForm,
) -> Result<Verdict> {
    let thr = threshold_holds(psi, profile.b, &profile.alpha2)?.unwrap_or(false);
    let extreme = digits.has_extreme_digit;
    let subset = digits.d_subset_dstar.unwrap_or(false);
    let hypotheses = vec![
        hyp("b and t have the same prime divisors", true),
        hyp("psi(n) <= b^(-ceil(alpha2 n)-1) eventually", thr),
        hyp("0 or b-1 in D", extreme),
        hyp("D subset of Dstar", subset),
    ];
    if !extreme {
        return Ok(if thr {
            Verdict::new(
                MeasureClass::EmptySet,
                Theorem::Emptiness,
                s,
                "D avoids 0 and b-1 and psi is eventually below the threshold",
                hypotheses,
            )
        } else {
            Verdict::new(
                MeasureClass::NotApplicable,
                Theorem::Emptiness,
                s,
                "D avoids 0 and b-1, and psi is not eventually below the threshold",
                hypotheses,
            )
        });
    }
    let alpha1_sum = log_d.scaled(&profile.alpha1);
    if subset && thr {
        let conv = converges_geometric(psi, s, &alpha1_sum)?;
        return Ok(Verdict::new(
            if conv { MeasureClass::Zero } else { MeasureClass::Infinite },
            Theorem::Alpha1Criterion,
            s,
            format!("sum psi(n)^s b^(alpha1 gamma n) {}", if conv { "converges" } else { "diverges" }),
            hypotheses,
        ));
    }
    if converges_geometric(psi, s, &log_d.scaled(&profile.alpha2))? {
        return Ok(Verdict::new(
            MeasureClass::Zero,
            Theorem::Alpha2Convergent,
            s,
            "sum psi(n)^s b^(alpha2 gamma n) converges",
            hypotheses,
        ));
    }
    if !converges_geometric(psi, s, &alpha1_sum)? {
        return Ok(Verdict::new(
            MeasureClass::FullMeasureOfC,
            Theorem::Alpha1Divergent,
            s,
            "sum psi(n)^s b^(alpha1 gamma n) diverges",
            hypotheses,
        ));
    }
    Ok(Verdict::new(
        MeasureClass::GapUnknown,
        Theorem::Alpha2Convergent,
        s,
        "the alpha2 sum diverges while the alpha1 sum converges",
        hypotheses,
    ))
}

/// A set `A ⊆ [0, 1]` whose grid counts are available.
#[derive(Debug, Clone)]
pub enum CoverSet {
    Intervals(Vec<Interval>),
    Cantor(MissingDigitSet),
}

impl CoverSet {
    fn grid_count(&self, t: u64, n: u64) -> Result<num_bigint::BigUint> {
        match self {
            CoverSet::Intervals(iv) => grid_count_intervals(iv, &big_pow(t, n)),
            CoverSet::Cantor(set) => Ok(grid_count_pow(set, t, n)),
        }
    }
}

/// Sufficient condition `Σ ψ(n)^s N_{t⁻ⁿ}(A) < ∞` for `H^s(W_t(ψ) ∩ A) = 0`.
///
/// The growth of `N_{t⁻ⁿ}(A)` is `t^n` for a set of positive length, constant
/// for finitely many points and `t^{γn}` for `C(b, D)`. The partial sum over
/// `n ≤ n_probe` is reported from exact grid counts.
pub fn theorem14_bound(a: &CoverSet, t: u64, psi: &PsiSpec, s: &SExponent, n_probe: u64) -> Result<Verdict> {
    if t < 2 {
        return Err(Error::domain("t must be at least 2"));
    }
    let positive = match s {
        SExponent::Rational(r) => r.is_positive(),
        SExponent::LogRatio { scale, .. } => scale.is_positive(),
    };
    let hypotheses = vec![hyp("s > 0", positive), hyp("psi is stepped geometric", psi.is_exact())];
    if !positive || !psi.is_exact() {
        return Ok(Verdict::new(
            MeasureClass::NotApplicable,
            Theorem::BoxCounting,
            s,
            "needs s > 0 and a stepped psi",
            hypotheses,
        ));
    }
    let sign = match a {
        CoverSet::Intervals(iv) => {
            for i in iv {
                if i.lo.is_negative() || i.hi > 1 {
                    return Err(Error::domain("intervals must lie in [0, 1]"));
                }
            }
            let growth = if iv.iter().any(|i| i.hi > i.lo) {
                LogLinearForm::log(t)?
            } else {
                LogLinearForm::zero()
            };
            criterion_sign(psi, s, &growth)?
        }
        CoverSet::Cantor(set) => cantor_sign(set, t, psi, s)?,
    };
    let sf = s.to_f64();
    let mut partial = 0.0;
    for n in 1..=n_probe {
        let count = a.grid_count(t, n)?.to_f64().unwrap_or(f64::INFINITY);
        partial += (sf * psi.ln_eval(n)).exp() * count;
    }
    let partial = format!("partial sum over n <= {n_probe}: {:.6e}", partial);
    Ok(if sign == Ordering::Greater {
        Verdict::new(
            MeasureClass::Zero,
            Theorem::BoxCounting,
            s,
            format!("sum psi(n)^s N(t^-n) converges; {partial}"),
            hypotheses,
        )
    } else {
        Verdict::new(
            MeasureClass::GapUnknown,
            Theorem::BoxCounting,
            s,
            format!("sum psi(n)^s N(t^-n) diverges and the criterion is one-sided; {partial}"),
            hypotheses,
        )
    })
}

/// Sign of `s·decay(ψ) − γ·log t` for `A = C(b, D)`.
fn cantor_sign(set: &MissingDigitSet, t: u64, psi: &PsiSpec, s: &SExponent) -> Result<Ordering> {
    let b = set.b();
    let log_d = LogLinearForm::log(set.size())?;
    let log_b = LogLinearForm::log(b)?;
    let log_t = LogLinearForm::log(t)?;
    if let Some(rho) = log_t.ratio_to(&log_b) {
        return criterion_sign(psi, s, &log_d.scaled(&rho));
    }
    // Divide through by log t: compare s·k·log b with log #D where decay = k·log t.
    let k = psi.decay_form()?.ratio_to(&log_t).ok_or_else(|| {
        Error::capability(format!(
            "the decay of {psi} is not a rational multiple of log {t}; the comparison is not log-linear"
        ))
    })?;
    compare_log_form(&s.times(&log_b.scaled(&k))?.minus(&log_d))
}
