use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::json;

use super::CheckReport;
use crate::arith::{big_pow, Rational};
use crate::budget::Budgets;
use crate::cantor::{grid_count_pow, MissingDigitSet};
use crate::error::{Error, Result};
use crate::gamma::{endpoint_candidates, gamma_bruteforce, gamma_endpoint, gamma_residue_dp, proof_sets};
use crate::params::{build_digit_profile, build_param_profile, classify, normalize_digits, DigitProfile, MultClass, ParamProfile};
use crate::psi::{eventually_below, eventually_below_threshold, PsiSpec, Threshold};

fn members(r: crate::gamma::GammaResult) -> Vec<BigUint> {
    r.members.expect("members requested")
}

fn independent_setup(b: u64, t: u64, digits: &[u64]) -> Result<(ParamProfile, DigitProfile, MissingDigitSet)> {
    let profile = build_param_profile(b, t)?;
    if profile.class != MultClass::IndependentSamePrimes {
        return Err(Error::hypothesis(format!(
            "needs multiplicatively independent bases with equal prime support; ({b}, {t}) is {:?}",
            profile.class
        )));
    }
    let dp = build_digit_profile(&profile, digits)?;
    let set = MissingDigitSet::new(b, &dp.digits)?;
    Ok((profile, dp, set))
}

fn require_threshold(profile: &ParamProfile, psi: &PsiSpec, n: u64) -> Result<()> {
    let thr = Threshold::alpha2(profile.b, profile.alpha2.clone());
    if psi.eval_exact(n)? > thr.eval(n) {
        return Err(Error::hypothesis(format!(
            "psi(n) <= b^(-ceil(alpha2 n) - 1) fails at n = {n}"
        )));
    }
    Ok(())
}

fn is_subset(a: &[BigUint], b: &[BigUint]) -> Option<BigUint> {
    let bs: BTreeSet<&BigUint> = b.iter().collect();
    a.iter().find(|x| !bs.contains(x)).cloned()
}

/// `Γₙ(brute) ⊆ Gₙ ⊆ E(m1)` memberwise and, when `D ⊆ D*`, agreement of all three methods.
pub fn check_gamma_chain(
    b: u64,
    t: u64,
    digits: &[u64],
    psi: &PsiSpec,
    n_max: u64,
    budgets: &Budgets,
) -> Result<CheckReport> {
    let (profile, dp, set) = independent_setup(b, t, digits)?;
    let refined = dp.d_subset_dstar == Some(true);
    let mut report = CheckReport::new("gamma_chain");
    let mut levels = Vec::new();
    for n in 1..=n_max {
        require_threshold(&profile, psi, n)?;
        let ps = proof_sets(&profile, n)?;
        let inputs = json!({"b": b, "t": t, "D": &dp.digits, "psi": psi.to_string(), "n": n});
        let brute = members(gamma_bruteforce(&set, t, psi, n, budgets)?);
        let g = endpoint_candidates(&set, t, n, ps.m0, budgets)?;
        report.instances_tested += 1;
        if let Some(p) = is_subset(&brute, &g) {
            report.fail(inputs.clone(), format!("p = {p} in Gamma_n but not in G_n"), "Gamma_n subset of G_n");
        }
        let mut level = json!({"n": n, "m0": ps.m0, "M": ps.modulus.to_string(), "gamma": brute.len(), "G": g.len()});
        if refined {
            let e = endpoint_candidates(&set, t, n, ps.m1, budgets)?;
            level["E"] = json!(e.len());
            level["m1"] = json!(ps.m1);
            if let Some(p) = is_subset(&g, &e) {
                report.fail(inputs.clone(), format!("p = {p} in G_n but not in E(m1)"), "G_n subset of E(m1)");
            }
            let ep = members(gamma_endpoint(&set, t, psi, n, &profile, &dp, budgets)?);
            let rd = members(gamma_residue_dp(&set, t, psi, n, &profile, true, budgets)?);
            if ep != brute || rd != brute {
                report.fail(
                    inputs,
                    format!("brute {}, endpoint {}, dp {} members", brute.len(), ep.len(), rd.len()),
                    "identical member lists",
                );
            }
        }
        levels.push(level);
    }
    report.detail("levels", levels);
    report.detail("refined", refined);
    Ok(report)
}

/// `#Γₙ` exactly: the residue DP with members when its hypotheses hold, otherwise brute force.
fn exact_count(
    set: &MissingDigitSet,
    t: u64,
    psi: &PsiSpec,
    n: u64,
    profile: Option<&ParamProfile>,
    budgets: &Budgets,
) -> Result<Option<BigUint>> {
    if let Some(p) = profile.filter(|p| p.class == MultClass::IndependentSamePrimes) {
        match gamma_residue_dp(set, t, psi, n, p, true, budgets) {
            Ok(r) => return Ok(Some(r.count)),
            Err(Error::Resource(_)) | Err(Error::Hypothesis(_)) => {}
            Err(e) => return Err(e),
        }
    }
    match gamma_bruteforce(set, t, psi, n, budgets) {
        Ok(r) => Ok(Some(r.count)),
        Err(Error::Resource(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `count / #D^{α₁n}`, computed exactly when `α₁n` is an integer.
fn alpha1_ratio(count: &BigUint, profile: &ParamProfile, size: u64, n: u64) -> f64 {
    let e = &profile.alpha1 * &Rational::from(n);
    if e.is_integer() {
        let growth = big_pow(size, e.floor().to_u64().expect("small exponent"));
        Rational::from_big_ratio(count.clone(), growth).to_f64()
    } else {
        count.to_f64().unwrap_or(f64::INFINITY) / (e.to_f64() * (size as f64).ln()).exp()
    }
}

/// Part (i): `#Γₙ ≤ 2·grid_count(t⁻ⁿ)` whenever `ψ(n) ≤ ½t⁻ⁿ`.
/// Part (ii): the ratio `#Γₙ / b^{α₁γn}` over `n ≤ n_max`.
///
/// `max_ratio` is taken over the residue DP candidate counts, the level at which
/// the digit-string bound lives. The ratios of the exact counts are reported in
/// `details` alongside.
pub fn check_prop31(
    b: u64,
    t: u64,
    digits: &[u64],
    psi: &PsiSpec,
    n_max: u64,
    budgets: &Budgets,
) -> Result<CheckReport> {
    let digits = normalize_digits(b, digits)?;
    let set = MissingDigitSet::new(b, &digits)?;
    let class = classify(b, t)?;
    let profile = match class {
        MultClass::IndependentDifferentPrimes => None,
        _ => Some(build_param_profile(b, t)?),
    };
    let mut report = CheckReport::new("prop31");
    let mut part_i = Vec::new();
    for n in 1..=n_max {
        let half = Rational::from_big_ratio(BigUint::from(1u32), big_pow(t, n) * 2u32);
        if psi.eval_exact(n)? > half {
            continue;
        }
        let Some(count) = exact_count(&set, t, psi, n, profile.as_ref(), budgets)? else {
            report.notes.push(format!("part (i) skipped at n = {n}: no exact method within budget"));
            continue;
        };
        let grid = grid_count_pow(&set, t, n);
        report.instances_tested += 1;
        part_i.push(json!({"n": n, "gamma": count.to_string(), "grid": grid.to_string()}));
        if count > &grid * 2u32 {
            report.fail(
                json!({"b": b, "t": t, "D": &digits, "psi": psi.to_string(), "n": n, "part": "i"}),
                format!("#Gamma_n = {count}"),
                format!("<= 2 * {grid}"),
            );
        }
    }
    report.detail("part_i", part_i);

    let Some(profile) = profile.filter(|p| p.class == MultClass::IndependentSamePrimes) else {
        report.notes.push("part (ii) needs independent bases with equal prime support".into());
        return Ok(report);
    };
    let dp = build_digit_profile(&profile, &digits)?;
    if dp.d_subset_dstar != Some(true) {
        report.notes.push("part (ii) needs D subset of Dstar".into());
        return Ok(report);
    }
    for n in 1..=n_max {
        if require_threshold(&profile, psi, n).is_err() {
            report.notes.push(format!("part (ii) needs the threshold for every n; fails at n = {n}"));
            return Ok(report);
        }
    }
    let mut pre_ratios = Vec::new();
    let mut exact_ratios = Vec::new();
    for n in 1..=n_max {
        let pre = gamma_residue_dp(&set, t, psi, n, &profile, false, budgets)?
            .prefilter_count
            .expect("residue DP reports a candidate count");
        pre_ratios.push(alpha1_ratio(&pre, &profile, dp.size(), n));
        let exact = exact_count(&set, t, psi, n, Some(&profile), budgets)?;
        exact_ratios.push(exact.map(|c| alpha1_ratio(&c, &profile, dp.size(), n)));
        report.instances_tested += 1;
    }
    let (arg, max) = pre_ratios
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    report.max_ratio = Some(max);
    if let Some(i) = (arg + 1..pre_ratios.len()).find(|&i| pre_ratios[i] > pre_ratios[i - 1] * (1.0 + 1e-12)) {
        report.fail(
            json!({"b": b, "t": t, "D": &digits, "psi": psi.to_string(), "n": i + 1, "part": "ii"}),
            format!("ratio rises to {} after the maximum at n = {}", pre_ratios[i], arg + 1),
            "non-increasing ratios after the maximum",
        );
    }
    let exact_max = exact_ratios.iter().flatten().cloned().fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    report.detail("prefilter_ratios", &pre_ratios);
    report.detail("exact_ratios", &exact_ratios);
    report.detail("max_ratio_exact", exact_max);
    Ok(report)
}

/// `{p/tⁿ : p ∈ Γₙ(ψ; t)} = {q/b^{α₁n} : q ∈ Γₙ(ψ; b^{α₁})}` as sets of rationals.
pub fn check_wb_alpha1_identity(
    b: u64,
    t: u64,
    digits: &[u64],
    psi: &PsiSpec,
    n_max: u64,
    budgets: &Budgets,
) -> Result<CheckReport> {
    let (profile, dp, set) = independent_setup(b, t, digits)?;
    if !profile.alpha1.is_integer() {
        return Err(Error::hypothesis(format!("alpha1 = {} is not an integer", profile.alpha1)));
    }
    if dp.d_subset_dstar != Some(true) {
        return Err(Error::hypothesis("D is not a subset of Dstar"));
    }
    let a1 = profile.alpha1.floor().to_u32().expect("small alpha1");
    let u = b.checked_pow(a1).ok_or_else(|| Error::resource("b^alpha1 overflows"))?;
    let mut report = CheckReport::new("wb_alpha1_identity");
    let mut sizes = Vec::new();
    for n in 1..=n_max {
        require_threshold(&profile, psi, n)?;
        let to_points = |base: u64, ps: Vec<BigUint>| -> BTreeSet<Rational> {
            let den = big_pow(base, n);
            ps.into_iter().map(|p| Rational::from_big_ratio(p, den.clone())).collect()
        };
        let lhs = to_points(t, members(gamma_bruteforce(&set, t, psi, n, budgets)?));
        let rhs = to_points(u, members(gamma_bruteforce(&set, u, psi, n, budgets)?));
        report.instances_tested += 1;
        sizes.push(json!({"n": n, "t_side": lhs.len(), "b_alpha1_side": rhs.len()}));
        if lhs != rhs {
            let diff: Vec<String> = lhs.symmetric_difference(&rhs).take(5).map(|r| r.to_string()).collect();
            report.fail(
                json!({"b": b, "t": t, "D": &dp.digits, "psi": psi.to_string(), "n": n}),
                format!("points differ, e.g. {diff:?}"),
                "equal point sets",
            );
        }
    }
    report.detail("b_alpha1", u);
    report.detail("levels", sizes);
    Ok(report)
}

/// `Γₙ = ∅` for `N0 ≤ n ≤ n_max` when `D` avoids `0` and `b − 1`.
///
/// The sharpened threshold `m*/((b−1)·b^{⌈α₂n⌉})` is tried first, then
/// `b^{−⌈α₂n⌉−1}`. Pairs with different prime divisors are scanned without a
/// threshold and the half-point witness is recorded when it applies.
pub fn check_emptiness(
    b: u64,
    t: u64,
    digits: &[u64],
    psi: &PsiSpec,
    n_max: u64,
    budgets: &Budgets,
) -> Result<CheckReport> {
    let digits = normalize_digits(b, digits)?;
    if digits[0] == 0 || *digits.last().unwrap() == b - 1 {
        return Err(Error::hypothesis("D must avoid both 0 and b-1"));
    }
    let set = MissingDigitSet::new(b, &digits)?;
    let mut report = CheckReport::new("emptiness");
    let n0 = if classify(b, t)? == MultClass::IndependentDifferentPrimes {
        report.notes.push("b and t have different prime divisors; the emptiness statement does not apply".into());
        if b % 2 == 1 && t.is_multiple_of(2) && digits.contains(&((b - 1) / 2)) {
            report.detail("half_point_witness", "1/2 lies in C(b, D) and equals (t^n / 2) / t^n for every n");
        }
        1
    } else {
        let profile = build_param_profile(b, t)?;
        let mstar = crate::params::mstar(b, &digits);
        let sharp = Threshold {
            k: Rational::frac(mstar as i64, (b - 1) as i64),
            b,
            alpha: profile.alpha2.clone(),
            shift: 0,
        };
        let decision = eventually_below(psi, &sharp)?;
        let decision = if decision.holds {
            report.detail("threshold", "sharpened");
            decision
        } else {
            report.detail("threshold", "alpha2");
            eventually_below_threshold(psi, b, &profile.alpha2)?
        };
        if !decision.holds {
            return Err(Error::hypothesis("psi is not eventually below either emptiness threshold"));
        }
        decision.n0.unwrap_or(1)
    };
    report.detail("N0", n0);
    let mut counts = Vec::new();
    for n in n0..=n_max {
        let g = gamma_bruteforce(&set, t, psi, n, budgets)?;
        report.instances_tested += 1;
        counts.push(json!({"n": n, "count": g.count.to_string()}));
        if let Some(p) = g.members.as_ref().and_then(|m| m.first()) {
            report.fail(
                json!({"b": b, "t": t, "D": &digits, "psi": psi.to_string(), "n": n}),
                format!("{} hits, first p = {p}", g.count),
                "no hits",
            );
        }
    }
    report.detail("levels", counts);
    report.notes.push(format!("evidence for n <= {n_max}, not a proof"));
    Ok(report)
}

/// Hit counts for `ψ(n) = c·b^{−⌈α₂n⌉−1}` with `c > 1`, where it is open whether
/// `D` must contain `0` or `b − 1`. Nothing is asserted.
pub fn explore_above_threshold(
    b: u64,
    t: u64,
    digits: &[u64],
    c: &Rational,
    n_max: u64,
    budgets: &Budgets,
) -> Result<CheckReport> {
    let profile = build_param_profile(b, t)?;
    let digits = normalize_digits(b, digits)?;
    let set = MissingDigitSet::new(b, &digits)?;
    let a2 = &profile.alpha2;
    let (p, r) = (
        a2.numer().to_u64().expect("small alpha2"),
        a2.denom().to_u64().expect("small alpha2"),
    );
    let psi = PsiSpec::stepped(c.clone(), b, p, r as i64, r)?;
    let mut report = CheckReport::new("explore_above_threshold");
    let mut counts = Vec::new();
    for n in 1..=n_max {
        let g = gamma_bruteforce(&set, t, &psi, n, budgets)?;
        report.instances_tested += 1;
        counts.push(json!({"n": n, "count": g.count.to_string()}));
    }
    report.detail("psi", psi.to_string());
    report.detail("levels", counts);
    report.notes.push("exploratory; nothing is asserted".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(s: &str) -> PsiSpec {
        s.parse().unwrap()
    }

    #[test]
    fn chain_examples() {
        let b = Budgets::default();
        let p = psi("geom:beta=6,p=2,q=1");
        for d in [vec![0, 1, 4, 5], vec![0, 5], vec![1, 4]] {
            let r = check_gamma_chain(6, 12, &d, &p, 3, &b).unwrap();
            assert!(r.passed(), "{d:?}: {:?}", r.failures);
        }
    }

    #[test]
    fn prop31_examples() {
        let b = Budgets::default();
        let r = check_prop31(6, 12, &[0, 1, 4, 5], &psi("geom:beta=6,p=2,q=1"), 6, &b).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_ratio, Some(2.0));
        let r = check_prop31(3, 3, &[0, 2], &psi("geom:c=1/2,beta=3,p=1"), 8, &b).unwrap();
        assert!(r.passed());
        assert_eq!(r.instances_tested, 8);
        let r = check_prop31(5, 5, &[1, 2], &psi("geom:c=1/4,beta=5,p=1"), 6, &b).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn identity_examples() {
        let b = Budgets::default();
        let p = psi("geom:beta=6,p=2,q=1");
        assert!(check_wb_alpha1_identity(6, 12, &[0, 1, 4, 5], &p, 3, &b).unwrap().passed());
        assert!(check_wb_alpha1_identity(6, 12, &[0, 5], &p, 3, &b).unwrap().passed());
        let p = psi("geom:beta=12,p=2,q=1");
        assert!(matches!(
            check_wb_alpha1_identity(12, 18, &[0, 11], &p, 2, &b),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn emptiness_examples() {
        let b = Budgets::default();
        assert!(check_emptiness(5, 5, &[1, 2], &psi("geom:c=1/4,beta=5,p=1"), 6, &b).unwrap().passed());
        assert!(check_emptiness(6, 12, &[1, 4], &psi("geom:beta=6,p=2,q=1"), 4, &b).unwrap().passed());
        let r = check_emptiness(5, 2, &[2, 3], &psi("geom:beta=2,p=5"), 4, &b).unwrap();
        assert!(!r.passed());
        assert!(r.details.contains_key("half_point_witness"));
    }
}
