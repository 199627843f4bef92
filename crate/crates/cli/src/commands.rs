use digitdioph::arith::{big_pow, round_sig, Rational, SExponent};
use digitdioph::cantor::{grid_count_pow, MissingDigitSet};
use digitdioph::dimension::{dim_report, dim_report_upper_only, measure_verdict, verdict_for};
use digitdioph::gamma::{
    gamma_bruteforce, gamma_endpoint, gamma_residue_dp, proof_sets, GammaResult,
};
use digitdioph::params::{
    build_digit_profile, build_param_profile, check_strict_sandwich, classify, normalize_digits,
    DigitProfile, MultClass, ParamProfile,
};
use digitdioph::psi::{eventually_below_threshold, PsiSpec};
use digitdioph::verify::{
    check_divisibility, check_emptiness, check_forced_digits, check_gamma_chain, check_prop31,
    check_wb_alpha1_identity, explore_above_threshold, sweep_lemmas, CheckReport,
};
use digitdioph::{Budgets, Error};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::output::{Format, Report, Table};
use crate::{Base, Check, CliError, Command, GammaArgs, MethodArg, WithPsi, WithPsiRange};

pub(crate) fn dispatch(cmd: &Command, budgets: &Budgets) -> Result<Report, CliError> {
    match cmd {
        Command::Profile { b, t, digits } => profile(*b, *t, digits.as_ref().map(|d| &d.0[..])),
        Command::Gamma(args) => gamma(args, budgets),
        Command::Verdict { inner, s } => verdict(inner, s),
        Command::Dim { inner } => dim(inner),
        Command::Boxcount { base, n_max } => boxcount(base, *n_max),
        Command::Verify { check } => verify(check, budgets),
        Command::Sweep { spec } => crate::sweep::run_sweep(spec, budgets),
    }
}

pub(crate) fn to_json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("structs serialize to objects"),
    }
}

/// Profile of `(b, t)`, or `None` for pairs with different prime divisors.
pub(crate) fn profile_of(b: u64, t: u64) -> Result<Option<ParamProfile>, Error> {
    match classify(b, t)? {
        MultClass::IndependentDifferentPrimes => Ok(None),
        _ => build_param_profile(b, t).map(Some),
    }
}

/// Validated setup shared by the commands that take `b t D`.
pub(crate) struct Setup {
    pub b: u64,
    pub t: u64,
    pub digits: Vec<u64>,
    pub set: MissingDigitSet,
    pub profile: Option<ParamProfile>,
    pub digit_profile: Option<DigitProfile>,
}

impl Setup {
    pub fn new(b: u64, t: u64, digits: &[u64]) -> Result<Self, Error> {
        let profile = profile_of(b, t)?;
        let digits = normalize_digits(b, digits)?;
        let set = MissingDigitSet::new(b, &digits)?;
        let digit_profile = match &profile {
            Some(p) => Some(build_digit_profile(p, &digits)?),
            None => None,
        };
        Ok(Setup {
            b,
            t,
            digits,
            set,
            profile,
            digit_profile,
        })
    }

    pub fn from_base(base: &Base) -> Result<Self, Error> {
        Self::new(base.b, base.t, &base.digits.0)
    }

    pub fn inputs(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("b".into(), json!(self.b));
        m.insert("t".into(), json!(self.t));
        m.insert("D".into(), json!(self.digits));
        m
    }

    pub fn require_profile(&self) -> Result<(&ParamProfile, &DigitProfile), Error> {
        match (&self.profile, &self.digit_profile) {
            (Some(p), Some(d)) => Ok((p, d)),
            _ => Err(Error::Hypothesis(format!(
                "b = {} and t = {} have different prime divisors",
                self.b, self.t
            ))),
        }
    }

    /// Classification, valuation ratios and the threshold decision for `psi`.
    pub fn derived(&self, psi: Option<&PsiSpec>) -> Result<Value, Error> {
        let mut m = Map::new();
        m.insert("class".into(), to_json(classify(self.b, self.t)?));
        if let Some(p) = &self.profile {
            m.insert("alpha1".into(), to_json(&p.alpha1));
            m.insert("alpha2".into(), to_json(&p.alpha2));
            m.insert("l0".into(), json!(p.l0));
            m.insert("l1".into(), json!(p.l1));
            if let Some(dp) = &self.digit_profile {
                m.insert("mstar".into(), json!(dp.mstar));
                m.insert("d_subset_dstar".into(), to_json(dp.d_subset_dstar));
                m.insert("has_extreme_digit".into(), json!(dp.has_extreme_digit));
            }
            if let Some(psi) = psi.filter(|p| p.is_exact()) {
                let d = eventually_below_threshold(psi, p.b, &p.alpha2)?;
                m.insert(
                    "threshold".into(),
                    json!({ "holds": d.holds, "N0": d.n0 }),
                );
            }
        }
        Ok(Value::Object(m))
    }
}

fn profile(b: u64, t: u64, digits: Option<&[u64]>) -> Result<Report, CliError> {
    let p = build_param_profile(b, t)?;
    let mut out = object(to_json(&p));
    // The alphabets D1, D2, D* depend on b* only, so they are read off the full digit set.
    let all: Vec<u64> = (0..b).collect();
    let full = build_digit_profile(&p, &all)?;
    out.insert("D1".into(), object(to_json(&full))["D1"].clone());
    out.insert("D2".into(), object(to_json(&full))["D2"].clone());
    out.insert("Dstar".into(), object(to_json(&full))["Dstar"].clone());
    out.insert("strict_sandwich".into(), json!(check_strict_sandwich(&p)?));
    let mut inputs = Map::new();
    inputs.insert("b".into(), json!(b));
    inputs.insert("t".into(), json!(t));
    if let Some(d) = digits {
        let dp = build_digit_profile(&p, d)?;
        inputs.insert("D".into(), json!(dp.digits));
        out.insert("digits".into(), to_json(&dp));
    }
    out.insert("inputs".into(), Value::Object(inputs));
    Ok(Report::json(Value::Object(out)))
}

/// `#Γₙ / b^{α₁γn} = count / #D^{α₁n}`: an exact rational when `α₁n` is an integer.
pub(crate) fn alpha1_ratio(count: &BigUint, profile: &ParamProfile, size: u64, n: u64) -> Value {
    let e = &profile.alpha1 * &Rational::from(n);
    if e.is_integer() {
        let growth = big_pow(size, e.floor().to_u64().expect("small exponent"));
        Value::String(Rational::from_big_ratio(count.clone(), growth).to_string())
    } else {
        let ln = ln_big(count) - e.to_f64() * (size as f64).ln();
        json!(round_sig(ln.exp()))
    }
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub(crate) fn gamma_at(
    setup: &Setup,
    psi: &PsiSpec,
    n: u64,
    method: MethodArg,
    members: bool,
    budgets: &Budgets,
) -> Result<GammaResult, Error> {
    match method {
        MethodArg::Brute => gamma_bruteforce(&setup.set, setup.t, psi, n, budgets),
        MethodArg::Endpoint => {
            let (p, dp) = setup.require_profile()?;
            gamma_endpoint(&setup.set, setup.t, psi, n, p, dp, budgets)
        }
        MethodArg::Dp => {
            let (p, _) = setup.require_profile()?;
            gamma_residue_dp(&setup.set, setup.t, psi, n, p, members, budgets)
        }
    }
}

/// One gamma result as JSON, with the level bookkeeping and the growth ratio.
pub(crate) fn gamma_entry(setup: &Setup, result: &GammaResult, members: bool) -> Map<String, Value> {
    let mut m = object(to_json(result));
    if !members {
        m.remove("members");
    }
    let (mut m0, mut m1, mut modulus, mut ratio) = (Value::Null, Value::Null, Value::Null, Value::Null);
    if let Some(p) = &setup.profile {
        if let Ok(ps) = proof_sets(p, result.n) {
            let ps = object(to_json(&ps));
            m0 = ps["m0"].clone();
            m1 = ps["m1"].clone();
            modulus = ps["M"].clone();
        }
        ratio = alpha1_ratio(&result.count, p, setup.digits.len() as u64, result.n);
    }
    m.insert("m0".into(), m0);
    m.insert("m1".into(), m1);
    m.insert("M".into(), modulus);
    m.insert("ratio_to_b_alpha1_gamma_n".into(), ratio);
    m
}

fn gamma(args: &GammaArgs, budgets: &Budgets) -> Result<Report, CliError> {
    let setup = Setup::from_base(&args.inner.base)?;
    let psi = &args.inner.psi;
    let levels: Vec<u64> = match (args.n, args.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(hi)) => (args.n_min.unwrap_or(1)..=hi).collect(),
        (None, None) => return Err(CliError::Input("one of --n or --n-max is required".into())),
    };
    let mut inputs = setup.inputs();
    inputs.insert("psi".into(), json!(psi.to_string()));
    inputs.insert("method".into(), json!(args.method.to_string()));
    inputs.insert("members".into(), json!(args.members));
    inputs.insert("budgets".into(), to_json(budgets));
    let mut entries = Vec::new();
    let mut table = Table::new(&["n", "count", "count_kind", "ratio_to_b_alpha1_gamma_n"]);
    for &n in &levels {
        let r = gamma_at(&setup, psi, n, args.method, args.members, budgets)?;
        let e = gamma_entry(&setup, &r, args.members);
        table.push(vec![
            n.to_string(),
            cell(&e["count"]),
            cell(&e["count_kind"]),
            cell(&e["ratio_to_b_alpha1_gamma_n"]),
        ]);
        entries.push(Value::Object(e));
    }
    let mut out = Map::new();
    match args.n {
        Some(n) => {
            inputs.insert("n".into(), json!(n));
            out.insert("result".into(), entries.pop().expect("one level"));
        }
        None => {
            inputs.insert("n_min".into(), json!(levels.first()));
            inputs.insert("n_max".into(), json!(args.n_max));
            out.insert("results".into(), Value::Array(entries));
        }
    }
    out.insert("inputs".into(), Value::Object(inputs));
    out.insert("derived".into(), setup.derived(Some(psi))?);
    let mut report = Report::json(Value::Object(out));
    report.table = Some(table);
    Ok(report)
}

fn verdict(inner: &WithPsi, s: &SExponent) -> Result<Report, CliError> {
    let setup = Setup::from_base(&inner.base)?;
    let v = match &setup.profile {
        Some(p) => measure_verdict(p, setup.digit_profile.as_ref().unwrap(), &inner.psi, s)?,
        None => verdict_for(setup.b, setup.t, &setup.digits, &inner.psi, s)?,
    };
    let mut inputs = setup.inputs();
    inputs.insert("psi".into(), json!(inner.psi.to_string()));
    inputs.insert("s".into(), to_json(s));
    Ok(Report::json(json!({
        "inputs": inputs,
        "derived": setup.derived(Some(&inner.psi))?,
        "verdict": v,
    })))
}

fn dim(inner: &WithPsi) -> Result<Report, CliError> {
    let setup = Setup::from_base(&inner.base)?;
    let report = match &setup.profile {
        Some(p) => dim_report(p, setup.digit_profile.as_ref().unwrap(), &inner.psi)?,
        None => dim_report_upper_only(setup.b, setup.t, &setup.digits, &inner.psi)?,
    };
    let mut inputs = setup.inputs();
    inputs.insert("psi".into(), json!(inner.psi.to_string()));
    Ok(Report::json(json!({
        "inputs": inputs,
        "derived": setup.derived(Some(&inner.psi))?,
        "report": report,
    })))
}

/// Grid counts at mesh `t⁻ⁿ` with `log_t(count) / n`, which tends to `γ`.
pub(crate) fn boxcount_rows(setup: &Setup, n_max: u64) -> Vec<(u64, BigUint, f64)> {
    (1..=n_max)
        .map(|n| {
            let count = grid_count_pow(&setup.set, setup.t, n);
            let ratio = ln_big(&count) / (n as f64 * (setup.t as f64).ln());
            (n, count, round_sig(ratio))
        })
        .collect()
}

pub(crate) fn gamma_dimension(setup: &Setup) -> f64 {
    round_sig((setup.digits.len() as f64).ln() / (setup.b as f64).ln())
}

fn boxcount(base: &Base, n_max: u64) -> Result<Report, CliError> {
    let setup = Setup::from_base(base)?;
    let gamma = gamma_dimension(&setup);
    let mut table = Table::new(&["n", "grid_count", "log_ratio", "gamma"]);
    let mut rows = Vec::new();
    for (n, count, ratio) in boxcount_rows(&setup, n_max) {
        table.push(vec![n.to_string(), count.to_string(), ratio.to_string(), gamma.to_string()]);
        let count = match count.to_u64() {
            Some(c) => json!(c),
            None => json!(count.to_string()),
        };
        rows.push(json!({ "n": n, "grid_count": count, "log_ratio": ratio }));
    }
    let mut inputs = setup.inputs();
    inputs.insert("n_max".into(), json!(n_max));
    let mut report = Report::json(json!({
        "inputs": inputs,
        "gamma": gamma,
        "rows": rows,
    }));
    report.table = Some(table);
    Ok(report)
}

fn check_report(inputs: Value, reports: Vec<CheckReport>) -> Report {
    let failed = reports.iter().any(|r| !r.passed());
    let mut out = Map::new();
    out.insert("inputs".into(), inputs);
    out.insert("passed".into(), json!(!failed));
    if reports.len() == 1 {
        out.insert("report".into(), to_json(&reports[0]));
    } else {
        out.insert("reports".into(), to_json(&reports));
    }
    let mut report = Report::json(Value::Object(out));
    report.failed = failed;
    report
}

fn range_inputs(args: &WithPsiRange) -> Result<Value, Error> {
    let setup = Setup::from_base(&args.inner.base)?;
    let mut inputs = setup.inputs();
    inputs.insert("psi".into(), json!(args.inner.psi.to_string()));
    inputs.insert("n_max".into(), json!(args.n_max));
    inputs.insert("derived".into(), setup.derived(Some(&args.inner.psi))?);
    Ok(Value::Object(inputs))
}

fn verify(check: &Check, budgets: &Budgets) -> Result<Report, CliError> {
    type RangeCheck = fn(u64, u64, &[u64], &PsiSpec, u64, &Budgets) -> Result<CheckReport, Error>;
    let ranged = |args: &WithPsiRange, f: RangeCheck| -> Result<Report, CliError> {
        let inputs = range_inputs(args)?;
        let base = &args.inner.base;
        let r = f(base.b, base.t, &base.digits.0, &args.inner.psi, args.n_max, budgets)?;
        Ok(check_report(inputs, vec![r]))
    };
    match check {
        Check::Divisibility { b, t, n_max } => {
            let r = check_divisibility(*b, *t, *n_max)?;
            Ok(check_report(json!({ "b": b, "t": t, "n_max": n_max }), vec![r]))
        }
        Check::ForcedDigits { b, t, n } => {
            let r = check_forced_digits(*b, *t, *n, budgets)?;
            Ok(check_report(json!({ "b": b, "t": t, "n": n }), vec![r]))
        }
        Check::GammaChain(args) => ranged(args, check_gamma_chain),
        Check::Prop31(args) => ranged(args, check_prop31),
        Check::WbIdentity(args) => ranged(args, check_wb_alpha1_identity),
        Check::Emptiness(args) => ranged(args, check_emptiness),
        Check::Explore { base, c, n_max } => {
            let setup = Setup::from_base(base)?;
            let r = explore_above_threshold(base.b, base.t, &base.digits.0, c, *n_max, budgets)?;
            let mut inputs = setup.inputs();
            inputs.insert("c".into(), to_json(c));
            inputs.insert("n_max".into(), json!(n_max));
            Ok(check_report(Value::Object(inputs), vec![r]))
        }
        Check::LemmaSweep {
            seed,
            pairs,
            max,
            n_div,
            n_forced,
        } => {
            let reports = sweep_lemmas(*seed, *pairs, *max, *n_div, *n_forced, budgets)?;
            let inputs = json!({
                "seed": seed, "pairs": pairs, "max": max, "n_div": n_div, "n_forced": n_forced,
            });
            Ok(check_report(inputs, reports))
        }
    }
}

/// Tables default to CSV.
pub(crate) fn table_report(json: Value, table: Table, failed: bool) -> Report {
    Report {
        json,
        table: Some(table),
        default_format: Format::Csv,
        failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_exact_for_integer_exponents() {
        let p = build_param_profile(6, 12).unwrap();
        assert_eq!(alpha1_ratio(&BigUint::from(32u32), &p, 4, 2), json!("2"));
        let p = build_param_profile(12, 18).unwrap();
        assert_eq!(alpha1_ratio(&BigUint::from(8u32), &p, 4, 2), json!("2"));
        assert_eq!(alpha1_ratio(&BigUint::from(8u32), &p, 4, 1), json!(4.0));
    }

    #[test]
    fn ln_big_matches_small_values() {
        assert!((ln_big(&BigUint::from(1000u32)) - 1000f64.ln()).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&big) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }
}
