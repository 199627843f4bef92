//! Measure verdicts and dimension formulas for `W_t(ψ) ∩ C(b, D)`.
//!
//! Every convergence decision for a stepped `ψ` is an exact sign test of a
//! log-linear form. Floats only appear in reported dimension values.

mod report;
mod verdict;

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::{compare_log_form, LogLinearForm, Rational, SExponent};
use crate::error::{Error, Result};
use crate::psi::{eventually_below, PsiSpec, Threshold};

pub use report::{dim_report, dim_report_upper_only, BoundType, DimIntersection, DimReport};
pub use verdict::{
    measure_verdict, theorem14_bound, verdict_for, CoverSet, Hypothesis, MeasureClass, Theorem,
    Verdict,
};

/// Decide whether `Σ ψ(n)^s·Bⁿ` converges, with `log B` given by `growth`.
///
/// The terms are `≍ exp(n·(log B − s·(p/r)·log β))`, so the series converges
/// iff `s·(p/r)·log β − log B > 0`. A zero exponent gives terms bounded below
/// by a positive constant and hence divergence.
pub fn converges_geometric(psi: &PsiSpec, s: &SExponent, growth: &LogLinearForm) -> Result<bool> {
    Ok(criterion_sign(psi, s, growth)? == Ordering::Greater)
}

/// Sign of `s·decay(ψ) − growth`.
pub(crate) fn criterion_sign(
    psi: &PsiSpec,
    s: &SExponent,
    growth: &LogLinearForm,
) -> Result<Ordering> {
    if s.is_negative() {
        return Err(Error::domain("s must be non-negative"));
    }
    let decay = psi.decay_form()?;
    compare_log_form(&s.times(&decay)?.minus(growth))
}

/// Whether `ψ(n) ≤ b^{−⌈alpha2·n⌉−1}` eventually, or `None` when undecidable.
///
/// Stepped specs are decided exactly. Float specs are decided by their decay
/// rate when it differs from `alpha2·log b` by a clear margin.
pub(crate) fn threshold_holds(psi: &PsiSpec, b: u64, alpha2: &Rational) -> Result<Option<bool>> {
    match psi {
        PsiSpec::Stepped { .. } => {
            Ok(Some(eventually_below(psi, &Threshold::alpha2(b, alpha2.clone()))?.holds))
        }
        PsiSpec::Float { base, rate, .. } => {
            let own = rate * (*base as f64).ln();
            let thr = alpha2.to_f64() * (b as f64).ln();
            let margin = 1e-9 * thr.abs().max(1.0);
            Ok(if own > thr + margin {
                Some(true)
            } else if own < thr - margin {
                Some(false)
            } else {
                None
            })
        }
    }
}

/// A rounded float together with its exact description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Value {
    pub formula: String,
    #[serde(serialize_with = "crate::arith::json::float12")]
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> SExponent {
        x.parse().unwrap()
    }

    #[test]
    fn geometric_examples() {
        let psi: PsiSpec = "geom:beta=3,p=2".parse().unwrap();
        let growth = LogLinearForm::log(2).unwrap();
        assert!(converges_geometric(&psi, &s("1/2"), &growth).unwrap());

        let psi: PsiSpec = "geom:beta=3,p=1".parse().unwrap();
        assert!(!converges_geometric(&psi, &s("log(2)/log(3)"), &growth).unwrap());

        let psi: PsiSpec = "geom:beta=6,p=2,q=1".parse().unwrap();
        let growth = LogLinearForm::log(4).unwrap();
        assert!(converges_geometric(&psi, &s("1"), &growth).unwrap());
        assert!(!converges_geometric(&psi, &s("1/5"), &growth).unwrap());
    }

    #[test]
    fn float_psi_is_a_capability_error() {
        let psi: PsiSpec = "float:t=6,rate=2".parse().unwrap();
        let growth = LogLinearForm::log(2).unwrap();
        assert!(matches!(
            converges_geometric(&psi, &s("1"), &growth),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn float_threshold() {
        let a2 = Rational::from(2i64);
        let psi: PsiSpec = "float:t=6,rate=log(3)/log(1.5)".parse().unwrap();
        assert_eq!(threshold_holds(&psi, 6, &a2).unwrap(), Some(true));
        let psi: PsiSpec = "float:t=6,rate=1.5".parse().unwrap();
        assert_eq!(threshold_holds(&psi, 6, &a2).unwrap(), Some(false));
        let psi: PsiSpec = "float:t=6,rate=2".parse().unwrap();
        assert_eq!(threshold_holds(&psi, 6, &a2).unwrap(), None);
    }
}
