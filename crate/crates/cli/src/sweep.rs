//! Batch runs described by a JSON file.
//!
//! ```json
//! {"kind": "gamma", "method": "dp", "configs": [
//!   {"b": 6, "t": 12, "D": [0, 1, 4, 5], "psi": "geom:beta=6,p=2,q=1", "n_max": 12}
//! ]}
//! ```
//!
//! Kinds and their CSV columns:
//! - `gamma`: b, t, D, psi, n, method, count, count_kind, prefilter_count, ratio_to_b_alpha1_gamma_n
//! - `verdict` (configs carry a list `s`): b, t, D, psi, s, measure_class, theorem_applied
//! - `dim`: b, t, D, psi, dim_C, dim_W, dim_intersection, formula, bound_type, lower, upper
//! - `boxcount`: b, t, D, n, grid_count, log_ratio, gamma
//! - `explore` (configs carry `c`): b, t, D, c, n, count
//! - `lemmas`: check_name, instances_tested, failures

use std::path::Path;

use digitdioph::arith::{Rational, SExponent};
use digitdioph::dimension::{dim_report, dim_report_upper_only, measure_verdict, verdict_for};
use digitdioph::psi::PsiSpec;
use digitdioph::verify::{explore_above_threshold, sweep_lemmas};
use digitdioph::{Budgets, Error};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::commands::{
    boxcount_rows, cell, gamma_at, gamma_dimension, gamma_entry, table_report, to_json, Setup,
};
use crate::output::{Report, Table};
use crate::{CliError, MethodArg};

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SweepSpec {
    Gamma {
        method: MethodArg,
        #[serde(default)]
        members: bool,
        configs: Vec<RangeConfig>,
    },
    Verdict {
        configs: Vec<VerdictConfig>,
    },
    Dim {
        configs: Vec<PsiConfig>,
    },
    Boxcount {
        configs: Vec<RangeConfig>,
    },
    Explore {
        configs: Vec<RangeConfig>,
    },
    Lemmas {
        #[serde(default)]
        seed: u64,
        pairs: usize,
        max: u64,
        n_div: u64,
        n_forced: u64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeConfig {
    b: u64,
    t: u64,
    #[serde(rename = "D")]
    digits: Vec<u64>,
    #[serde(default)]
    psi: Option<String>,
    #[serde(default)]
    c: Option<String>,
    #[serde(default = "one")]
    n_min: u64,
    n_max: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiConfig {
    b: u64,
    t: u64,
    #[serde(rename = "D")]
    digits: Vec<u64>,
    psi: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictConfig {
    b: u64,
    t: u64,
    #[serde(rename = "D")]
    digits: Vec<u64>,
    psi: String,
    s: Vec<String>,
}

fn digits_cell(d: &[u64]) -> String {
    d.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_psi(s: Option<&String>) -> Result<PsiSpec, CliError> {
    s.ok_or_else(|| CliError::Input("config needs a psi".into()))?
        .parse()
        .map_err(CliError::Lib)
}

pub(crate) fn run_sweep(path: &Path, budgets: &Budgets) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let spec: SweepSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid sweep spec {}: {e}", path.display())))?;
    let (table, failed) = match &spec {
        SweepSpec::Gamma {
            method,
            members,
            configs,
        } => (gamma_table(*method, *members, configs, budgets)?, false),
        SweepSpec::Verdict { configs } => (verdict_table(configs)?, false),
        SweepSpec::Dim { configs } => (dim_table(configs)?, false),
        SweepSpec::Boxcount { configs } => (boxcount_table(configs)?, false),
        SweepSpec::Explore { configs } => (explore_table(configs, budgets)?, false),
        SweepSpec::Lemmas {
            seed,
            pairs,
            max,
            n_div,
            n_forced,
        } => {
            let reports = sweep_lemmas(*seed, *pairs, *max, *n_div, *n_forced, budgets)?;
            let mut table = Table::new(&["check_name", "instances_tested", "failures"]);
            for r in &reports {
                table.push(vec![
                    r.check_name.clone(),
                    r.instances_tested.to_string(),
                    r.failures.len().to_string(),
                ]);
            }
            let failed = reports.iter().any(|r| !r.passed());
            (table, failed)
        }
    };
    let json = json!({ "inputs": { "spec": path.display().to_string() }, "rows": table.to_json() });
    Ok(table_report(json, table, failed))
}

fn gamma_table(
    method: MethodArg,
    members: bool,
    configs: &[RangeConfig],
    budgets: &Budgets,
) -> Result<Table, CliError> {
    let mut table = Table::new(&[
        "b",
        "t",
        "D",
        "psi",
        "n",
        "method",
        "count",
        "count_kind",
        "prefilter_count",
        "ratio_to_b_alpha1_gamma_n",
    ]);
    for c in configs {
        let setup = Setup::new(c.b, c.t, &c.digits)?;
        let psi = parse_psi(c.psi.as_ref())?;
        for n in c.n_min..=c.n_max {
            let r = gamma_at(&setup, &psi, n, method, members, budgets)?;
            let e = gamma_entry(&setup, &r, false);
            table.push(vec![
                c.b.to_string(),
                c.t.to_string(),
                digits_cell(&setup.digits),
                psi.to_string(),
                n.to_string(),
                method.to_string(),
                cell(&e["count"]),
                cell(&e["count_kind"]),
                cell(&e["prefilter_count"]),
                cell(&e["ratio_to_b_alpha1_gamma_n"]),
            ]);
        }
    }
    Ok(table)
}

fn verdict_table(configs: &[VerdictConfig]) -> Result<Table, CliError> {
    let mut table = Table::new(&["b", "t", "D", "psi", "s", "measure_class", "theorem_applied"]);
    for c in configs {
        let setup = Setup::new(c.b, c.t, &c.digits)?;
        let psi: PsiSpec = c.psi.parse()?;
        for s in &c.s {
            let s_exp: SExponent = s.parse()?;
            let v = match &setup.profile {
                Some(p) => measure_verdict(p, setup.digit_profile.as_ref().unwrap(), &psi, &s_exp)?,
                None => verdict_for(c.b, c.t, &setup.digits, &psi, &s_exp)?,
            };
            table.push(vec![
                c.b.to_string(),
                c.t.to_string(),
                digits_cell(&setup.digits),
                psi.to_string(),
                s.clone(),
                cell(&to_json(v.measure_class)),
                cell(&to_json(v.theorem_applied)),
            ]);
        }
    }
    Ok(table)
}

fn dim_table(configs: &[PsiConfig]) -> Result<Table, CliError> {
    let mut table = Table::new(&[
        "b",
        "t",
        "D",
        "psi",
        "dim_C",
        "dim_W",
        "dim_intersection",
        "formula",
        "bound_type",
        "lower",
        "upper",
    ]);
    for c in configs {
        let setup = Setup::new(c.b, c.t, &c.digits)?;
        let psi: PsiSpec = c.psi.parse()?;
        let r = match &setup.profile {
            Some(p) => dim_report(p, setup.digit_profile.as_ref().unwrap(), &psi)?,
            None => dim_report_upper_only(c.b, c.t, &setup.digits, &psi)?,
        };
        let v = to_json(&r);
        let inter = &v["dim_intersection"];
        table.push(vec![
            c.b.to_string(),
            c.t.to_string(),
            digits_cell(&setup.digits),
            psi.to_string(),
            cell(&v["dim_C"]["value"]),
            cell(&v["dim_W"]["value"]),
            cell(&inter["value"]),
            cell(&inter["formula"]),
            cell(&inter["bound_type"]),
            cell(&inter["lower"]),
            cell(&inter["upper"]),
        ]);
    }
    Ok(table)
}

fn boxcount_table(configs: &[RangeConfig]) -> Result<Table, CliError> {
    let mut table = Table::new(&["b", "t", "D", "n", "grid_count", "log_ratio", "gamma"]);
    for c in configs {
        let setup = Setup::new(c.b, c.t, &c.digits)?;
        let gamma = gamma_dimension(&setup);
        for (n, count, ratio) in boxcount_rows(&setup, c.n_max) {
            if n < c.n_min {
                continue;
            }
            table.push(vec![
                c.b.to_string(),
                c.t.to_string(),
                digits_cell(&setup.digits),
                n.to_string(),
                count.to_string(),
                ratio.to_string(),
                gamma.to_string(),
            ]);
        }
    }
    Ok(table)
}

fn explore_table(configs: &[RangeConfig], budgets: &Budgets) -> Result<Table, CliError> {
    let mut table = Table::new(&["b", "t", "D", "c", "n", "count"]);
    for c in configs {
        let setup = Setup::new(c.b, c.t, &c.digits)?;
        let k: Rational = c
            .c
            .as_ref()
            .ok_or_else(|| CliError::Input("explore configs need c".into()))?
            .parse()?;
        let r = explore_above_threshold(c.b, c.t, &setup.digits, &k, c.n_max, budgets)?;
        let rows = r
            .details
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::Lib(Error::Capability("explore report has no levels".into())))?;
        for row in rows {
            let n = row["n"].as_u64().unwrap_or(0);
            if n < c.n_min {
                continue;
            }
            table.push(vec![
                c.b.to_string(),
                c.t.to_string(),
                digits_cell(&setup.digits),
                k.to_string(),
                n.to_string(),
                cell(&row["count"]),
            ]);
        }
    }
    Ok(table)
}
