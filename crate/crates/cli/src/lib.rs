//! Command-line front end for `digitdioph`.
//!
//! Every subcommand echoes its resolved inputs and prints JSON with sorted
//! keys; gamma, boxcount and sweep tables can also be written as CSV or as
//! an aligned text table.
//!
//! Exit codes: 0 success, 1 invalid input or unmet hypothesis, 2 resource
//! budget exceeded, 3 verification failure.

mod commands;
mod output;
mod sweep;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use digitdioph::arith::{Rational, SExponent};
use digitdioph::psi::PsiSpec;
use digitdioph::{Budgets, Error};

pub use output::{Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "digitdioph",
    version,
    about = "Counting and measure verdicts for t-adic approximation on missing digit sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Worker threads for the enumeration engines (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; csv and table are available for gamma, boxcount and sweep.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Maximum number of points visited by an enumeration.
    #[arg(long, global = true, env = "DIGITDIOPH_BUDGET_ENUM")]
    pub budget_enum: Option<u64>,
    /// Maximum number of live residues in the residue DP.
    #[arg(long, global = true, env = "DIGITDIOPH_BUDGET_RESIDUE")]
    pub budget_residue: Option<u64>,
    /// Maximum bit size of integers built by exact comparisons.
    #[arg(long, global = true, env = "DIGITDIOPH_BUDGET_BITS")]
    pub budget_bits: Option<u64>,
}

impl GlobalOpts {
    pub fn budgets(&self) -> Budgets {
        let d = Budgets::default();
        Budgets {
            enumeration: self.budget_enum.unwrap_or(d.enumeration),
            residue: self.budget_residue.unwrap_or(d.residue),
            bits: self.budget_bits.unwrap_or(d.bits),
        }
    }
}

/// A comma-separated digit list such as `0,1,4,5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digits(pub Vec<u64>);

impl FromStr for Digits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|d| {
                d.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("not a digit: {:?}", d.trim()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Digits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Brute,
    Endpoint,
    Dp,
}

impl fmt::Display for MethodArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodArg::Brute => "brute",
            MethodArg::Endpoint => "endpoint",
            MethodArg::Dp => "dp",
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct Base {
    /// Base of the digit expansion.
    pub b: u64,
    /// Denominator base of the approximating rationals.
    pub t: u64,
    /// Allowed digits, comma separated.
    pub digits: Digits,
}

#[derive(Args, Debug, Clone)]
pub struct WithPsi {
    #[command(flatten)]
    pub base: Base,
    /// Approximation function, e.g. `geom:c=1,beta=6,p=2,q=1,r=1` or `float:t=2,c=1,tau=0.5`.
    #[arg(long)]
    pub psi: PsiSpec,
}

#[derive(Args, Debug, Clone)]
pub struct WithPsiRange {
    #[command(flatten)]
    pub inner: WithPsi,
    /// Largest level to check.
    #[arg(long)]
    pub n_max: u64,
}

#[derive(Args, Debug, Clone)]
pub struct GammaArgs {
    #[command(flatten)]
    pub inner: WithPsi,
    /// A single level.
    #[arg(long, conflicts_with_all = ["n_max", "n_min"], required_unless_present = "n_max")]
    pub n: Option<u64>,
    /// First level of a range.
    #[arg(long, requires = "n_max")]
    pub n_min: Option<u64>,
    /// Last level of a range.
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Dp)]
    pub method: MethodArg,
    /// Output the numerators; with the residue DP this also turns the count into `#Γₙ`.
    #[arg(long)]
    pub members: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Valuation data, alpha1, alpha2, b* and the digit alphabets of (b, t).
    Profile {
        b: u64,
        t: u64,
        /// Optional digit set, comma separated.
        digits: Option<Digits>,
    },
    /// The hit sets Γₙ(ψ).
    Gamma(GammaArgs),
    /// Hausdorff s-measure verdict for W_t(ψ) ∩ C(b, D).
    Verdict {
        #[command(flatten)]
        inner: WithPsi,
        /// Exponent, e.g. `1/2` or `log(2)/log(3)`.
        #[arg(long)]
        s: SExponent,
    },
    /// Dimension report for C(b, D), W_t(ψ) and their intersection.
    Dim {
        #[command(flatten)]
        inner: WithPsi,
    },
    /// Grid counts of C(b, D) at mesh t⁻ⁿ.
    Boxcount {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        n_max: u64,
    },
    /// Run a verification check.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Run a batch described by a JSON file and output one table.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// tⁿ divides b^⌈α₂n⌉ for n ≤ n_max.
    Divisibility {
        b: u64,
        t: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Digit strings avoiding D1 (or D2) divisible by b*ⁿ are forced.
    ForcedDigits {
        b: u64,
        t: u64,
        #[arg(long)]
        n: u64,
    },
    /// Γₙ inside the endpoint superset, memberwise.
    GammaChain(WithPsiRange),
    /// Covering bound and growth ratio of #Γₙ.
    Prop31(WithPsiRange),
    /// Equality of the t-adic and b^alpha1-adic hit sets.
    WbIdentity(WithPsiRange),
    /// Γₙ is empty when D avoids the extreme digits.
    Emptiness(WithPsiRange),
    /// Counts for ψ = c·b^{-⌈α₂n⌉}, above the emptiness threshold; asserts nothing.
    Explore {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        c: Rational,
        #[arg(long)]
        n_max: u64,
    },
    /// Divisibility and forced digits on random same-prime pairs.
    LemmaSweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
        #[arg(long, default_value_t = 30)]
        n_div: u64,
        #[arg(long, default_value_t = 4)]
        n_forced: u64,
    },
}

/// Failure of a command before any output was produced.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Resource(_)) => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Input(s) => f.write_str(s),
        }
    }
}

/// Parse `args` (including the program name), run the command and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    execute(&cli, out, err)
}

/// Run an already parsed command line.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let budgets = cli.global.budgets();
    budgets.apply_bits_cap();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return EXIT_INPUT;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| commands::dispatch(&cli.command, &budgets));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let format = cli.global.format.unwrap_or(report.default_format);
    let text = match report.render(format) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    if report.failed {
        EXIT_VERIFY
    } else {
        EXIT_OK
    }
}
