use serde::Serialize;

use super::{threshold_holds, Value};
use crate::arith::{LogRatio, Rational};
use crate::error::Result;
use crate::params::{normalize_digits, DigitProfile, MultClass, ParamProfile};
use crate::psi::{eventually_below, lambda_psi, Lambda, PsiSpec, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundType {
    Equal,
    UpperBound,
    TwoSidedBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimIntersection {
    /// `product`, `alpha1-corrected`, `alpha-sandwich`, `self-similar-upper` or `empty`.
    pub formula: &'static str,
    #[serde(serialize_with = "crate::arith::json::float12")]
    pub value: f64,
    pub bound_type: BoundType,
    #[serde(serialize_with = "crate::arith::json::opt_float12")]
    pub lower: Option<f64>,
    #[serde(serialize_with = "crate::arith::json::opt_float12")]
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimReport {
    #[serde(rename = "dim_C")]
    pub dim_c: Value,
    pub lambda: Lambda,
    #[serde(rename = "dim_W", serialize_with = "crate::arith::json::float12")]
    pub dim_w: f64,
    pub dim_intersection: DimIntersection,
    /// `dim_W · dim_C`, an upper bound for every `(b, t, D)`.
    #[serde(serialize_with = "crate::arith::json::float12")]
    pub self_similar_upper: f64,
}

fn dim_w(lambda: &Lambda) -> f64 {
    if lambda.value <= 1.0 {
        1.0
    } else {
        1.0 / lambda.value
    }
}

fn dim_c(gamma: &LogRatio) -> Value {
    Value {
        formula: gamma.to_string(),
        value: gamma.to_f64(),
    }
}

fn upper_only(dim_c: Value, lambda: Lambda) -> DimReport {
    let w = dim_w(&lambda);
    let product = w * dim_c.value;
    DimReport {
        dim_c,
        lambda,
        dim_w: w,
        dim_intersection: DimIntersection {
            formula: "self-similar-upper",
            value: product,
            bound_type: BoundType::UpperBound,
            lower: None,
            upper: Some(product),
        },
        self_similar_upper: product,
    }
}

/// Dimension report for pairs with different prime divisors: only the self-similar upper bound.
pub fn dim_report_upper_only(b: u64, t: u64, digits: &[u64], psi: &PsiSpec) -> Result<DimReport> {
    let d = normalize_digits(b, digits)?;
    let gamma = LogRatio::of_logs(d.len() as u64, b)?;
    Ok(upper_only(dim_c(&gamma), lambda_psi(psi, t)?))
}

/// `dim_H C(b, D)`, `dim_H W_t(ψ)` and the best available statement on the intersection.
pub fn dim_report(profile: &ParamProfile, digits: &DigitProfile, psi: &PsiSpec) -> Result<DimReport> {
    let lambda = lambda_psi(psi, profile.t)?;
    let mut report = upper_only(dim_c(&digits.gamma), lambda);
    let product = report.self_similar_upper;
    let scale = |alpha: &Rational| alpha.to_f64() * (profile.b as f64).ln() / (profile.t as f64).ln();
    let equal = |formula, value| DimIntersection {
        formula,
        value,
        bound_type: BoundType::Equal,
        lower: Some(value),
        upper: Some(value),
    };
    let empty = equal("empty", 0.0);
    let thr = threshold_holds(psi, profile.b, &profile.alpha2)?.unwrap_or(false);
    report.dim_intersection = match profile.class {
        MultClass::Dependent if digits.has_extreme_digit => equal("product", product),
        MultClass::Dependent if profile.b == profile.t => {
            let shift = Threshold {
                k: Rational::frac(digits.mstar as i64, (profile.b - 1) as i64),
                b: profile.b,
                alpha: Rational::one(),
                shift: 0,
            };
            let below = match psi {
                PsiSpec::Stepped { .. } => Some(eventually_below(psi, &shift)?.holds),
                PsiSpec::Float { .. } => threshold_holds(psi, profile.b, &Rational::one())?,
            };
            match below {
                Some(true) => empty,
                Some(false) => equal("product", product),
                None => report.dim_intersection,
            }
        }
        MultClass::Dependent | MultClass::IndependentSamePrimes if !digits.has_extreme_digit && thr => empty,
        MultClass::IndependentSamePrimes if digits.has_extreme_digit => {
            if thr && digits.d_subset_dstar == Some(true) {
                equal("alpha1-corrected", scale(&profile.alpha1) * product)
            } else {
                let lower = scale(&profile.alpha1) * product;
                let upper = scale(&profile.alpha2) * product;
                DimIntersection {
                    formula: "alpha-sandwich",
                    value: lower,
                    bound_type: BoundType::TwoSidedBounds,
                    lower: Some(lower),
                    upper: Some(upper),
                }
            }
        }
        _ => report.dim_intersection,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_digit_profile, build_param_profile};

    fn report(b: u64, t: u64, d: &[u64], psi: &str) -> DimReport {
        let p = build_param_profile(b, t).unwrap();
        let dp = build_digit_profile(&p, d).unwrap();
        dim_report(&p, &dp, &psi.parse().unwrap()).unwrap()
    }

    #[test]
    fn middle_third_product() {
        let r = report(3, 3, &[0, 2], "geom:beta=3,p=2");
        assert_eq!(r.dim_intersection.bound_type, BoundType::Equal);
        assert_eq!(r.dim_intersection.formula, "product");
        assert!((r.dim_intersection.value - 0.5 * 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn random_dimension_example() {
        let r = report(6, 12, &[0, 1, 4, 5], "float:t=6,rate=log(3)/log(1.5)");
        assert_eq!(r.dim_intersection.formula, "alpha1-corrected");
        let v = r.dim_intersection.value;
        assert!((v - (r.dim_w + r.dim_c.value - 1.0)).abs() < 1e-9);
        assert!((v - 0.2856).abs() < 1e-4);
    }

    #[test]
    fn slow_psi_has_full_dimension() {
        let r = report(6, 12, &[0, 1, 4, 5], "geom:beta=12,p=1");
        assert_eq!(r.dim_w, 1.0);
    }

    #[test]
    fn sandwich_and_upper() {
        let r = report(6, 12, &[0, 2], "geom:beta=6,p=2,q=1");
        let d = &r.dim_intersection;
        assert_eq!(d.bound_type, BoundType::TwoSidedBounds);
        assert!(d.lower.unwrap() < r.self_similar_upper && r.self_similar_upper < d.upper.unwrap());
    }
}
