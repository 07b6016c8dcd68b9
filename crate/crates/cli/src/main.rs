//! `fdcalc`: apply discrete fractional operators to sampled data and run the
//! verification suites.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors (with a one-line diagnostic on stderr).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fdcalc_core::harness::{
    csv_from_report_json, generate, run_suite, FamilyKind, FunctionFamily, Suite, SuiteConfig, Tamper,
};
use fdcalc_core::numerics::{format_significant, parse_number, parse_rational};
use fdcalc_core::operators::OperatorTag;
use fdcalc_core::{Backend, Error, FracOrder, GridFn, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(name = "fdcalc", version, about = "Discrete fractional sums and differences on shifted integer grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator to a sampled function.
    Compute(ComputeArgs),
    /// Run a verification suite and write a report.
    Verify(VerifyArgs),
    /// Re-emit a saved JSON report as CSV or a one-line summary.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Fracsum,
    Diff,
    Caputo,
    Rl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    F64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug)]
struct ComputeArgs {
    #[arg(long, value_enum)]
    op: Op,
    /// Order of the fractional sum, as p/q (decimals allowed with --backend f64).
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Order of the Caputo or Riemann–Liouville difference.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Order of the forward difference.
    #[arg(long)]
    m: Option<usize>,
    /// Grid base. Must match the first `t` of --input when both are given.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// CSV file with header `t,value`.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    input: Option<PathBuf>,
    /// Generated input: polynomial:DEG:RANGE, fixed:c0;c1;..., geometric:R,
    /// random:RANGE, admissible:M or vanishing:FROM:TO.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 16)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// taylor, identities, inequalities, backend_agreement or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Optional CSV flattening of the report, one row per case.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Seeded instances per inequality.
    #[arg(long)]
    inequality_cases: Option<usize>,
    /// Seeded cases per randomised identity.
    #[arg(long)]
    identity_cases: Option<usize>,
    /// Scale kernel coefficient INDEX by 1.001 in the Taylor suite.
    #[arg(long, hide = true, value_name = "INDEX")]
    perturb_kernel: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Summary,
}

#[derive(clap::Args, Debug)]
struct ReportArgs {
    /// Report written by `fdcalc verify`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "summary")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compute(args) => compute(&args),
        Command::Verify(args) => verify(&args),
        Command::Report(args) => report(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("fdcalc: verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("fdcalc: error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

// ---------------------------------------------------------------------------
// compute

fn compute(args: &ComputeArgs) -> Result<(), Failure> {
    match args.backend {
        BackendArg::Exact => compute_with::<Rational>(args),
        BackendArg::F64 => compute_with::<f64>(args),
    }
}

fn number(text: &str, flag: &str, backend: Backend) -> Result<Rational, Failure> {
    parse_number(text, backend != Backend::Exact).map_err(|e| Failure::Input(format!("--{flag}: {e}")))
}

fn operator(args: &ComputeArgs, backend: Backend) -> Result<OperatorTag, Failure> {
    fn need<'a>(v: &'a Option<String>, op: Op, flag: &str) -> Result<&'a str, Failure> {
        v.as_deref().ok_or_else(|| Failure::Input(format!("--op {} requires --{flag}", format!("{op:?}").to_lowercase())))
    }
    Ok(match args.op {
        Op::Fracsum => {
            let nu = number(need(&args.nu, args.op, "nu")?, "nu", backend)?;
            OperatorTag::FracSum(nu)
        }
        Op::Diff => OperatorTag::ForwardDiff(
            args.m.ok_or_else(|| Failure::Input("--op diff requires --m".into()))?,
        ),
        Op::Caputo | Op::Rl => {
            let mu = FracOrder::new(number(need(&args.mu, args.op, "mu")?, "mu", backend)?)?;
            if matches!(args.op, Op::Caputo) {
                OperatorTag::Caputo(mu)
            } else {
                OperatorTag::RiemannLiouville(mu)
            }
        }
    })
}

fn parse_family(spec: &str) -> Result<FamilyKind, Failure> {
    let bad = || Failure::Input(format!("unrecognised --family {spec:?}"));
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad());
    let idx = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    Ok(match parts.as_slice() {
        ["polynomial", d, r] => FamilyKind::Polynomial { degree: idx(d)?, coeff_range: int(r)? },
        ["fixed", c] => FamilyKind::FixedPolynomial(c.split([';', ',']).map(int).collect::<Result<_, _>>()?),
        ["geometric", r] => FamilyKind::Geometric(parse_rational(r)?),
        ["random", r] => FamilyKind::RandomInteger(int(r)?),
        ["admissible", m] => FamilyKind::AdmissibleTail { vanish_up_to: idx(m)? },
        ["vanishing", from, to] => FamilyKind::VanishingDiffs { from: idx(from)?, to: idx(to)? },
        _ => return Err(bad()),
    })
}

fn compute_with<S: Scalar>(args: &ComputeArgs) -> Result<(), Failure> {
    let op = operator(args, S::BACKEND)?;
    let a = args.a.as_deref().map(|t| number(t, "a", Backend::Exact)).transpose()?;
    let f: GridFn<S> = match (&args.input, &args.family) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let f = GridFn::<S>::read_csv(BufReader::new(file))?;
            if let Some(a) = &a {
                if a != f.base() {
                    return Err(Failure::Input(format!(
                        "--a {a} does not match the first grid point {} of {}",
                        f.base(),
                        path.display()
                    )));
                }
            }
            f
        }
        (None, Some(spec)) => generate(&FunctionFamily {
            kind: parse_family(spec)?,
            seed: args.seed,
            a: a.unwrap_or_default(),
            length: args.length,
        })?,
        (None, None) => return Err(Failure::Input("one of --input or --family is required".into())),
    };
    let required = op.min_input_len();
    if f.len() < required {
        return Err(Error::TooShort { required, got: f.len() }.into());
    }
    let g = op.apply(&f)?;
    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Csv => g.write_csv(&mut out)?,
        Format::Json => {
            let points: Vec<_> = g
                .points()
                .zip(g.values())
                .map(|(t, v)| serde_json::json!({ "t": t.to_string(), "value": v.to_text() }))
                .collect();
            let doc = serde_json::json!({
                "op": op.to_string(),
                "backend": S::BACKEND.name(),
                "base": g.base().to_string(),
                "points": points,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialisable"))?;
        }
    }
    out.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let suite: Suite = args.suite.parse()?;
    let defaults = SuiteConfig::default();
    let config = SuiteConfig {
        backend: match args.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::F64 => Backend::F64,
        },
        seed: args.seed,
        jobs: args.jobs,
        inequality_cases: args.inequality_cases.unwrap_or(defaults.inequality_cases),
        identity_cases: args.identity_cases.unwrap_or(defaults.identity_cases),
        tamper: args.perturb_kernel.map(|index| Tamper { index, ..Tamper::default() }),
        ..defaults
    };
    let report = run_suite(suite, &config)?;
    if let Some(path) = &args.report {
        let mut out = open_out(Some(path))?;
        writeln!(out, "{}", report.to_json()?)?;
        out.flush()?;
    }
    if let Some(path) = &args.csv {
        let mut out = open_out(Some(path))?;
        report.write_csv(&mut out)?;
        out.flush()?;
    }
    let summary = format!(
        "suite {} ({}, seed {}): {}, {} cases, {} failed, max |residual| {}, min slack {}",
        report.suite,
        config.backend.name(),
        config.seed,
        if report.passed() { "pass" } else { "fail" },
        report.cases_total,
        report.cases_failed,
        format_significant(report.max_abs_residual, 6),
        report.min_slack.map_or("n/a".to_string(), |s| format_significant(s, 6)),
    );
    println!("{summary}");
    if report.passed() {
        Ok(())
    } else {
        let first = report.failures().next().map(|c| c.key.clone()).unwrap_or_default();
        Err(Failure::Verification(format!("{} case(s) failed, first {first}", report.cases_failed)))
    }
}

// ---------------------------------------------------------------------------
// report

fn report(args: &ReportArgs) -> Result<(), Failure> {
    let mut text = String::new();
    File::open(&args.input)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
    let verdict = doc.get("verdict").and_then(|v| v.as_str()).unwrap_or("");
    if verdict != "pass" && verdict != "fail" {
        return Err(Failure::Input(format!("{}: not a verification report", args.input.display())));
    }
    let mut out = open_out(args.out.as_deref())?;
    match args.format {
        ReportFormat::Csv => write!(out, "{}", csv_from_report_json(&text)?)?,
        ReportFormat::Summary => {
            let field = |k: &str| doc.get(k).map_or("null".to_string(), |v| v.to_string());
            writeln!(
                out,
                "suite {}: {verdict}, {} cases, {} failed, max |residual| {}, min slack {}",
                doc.get("suite").and_then(|v| v.as_str()).unwrap_or("?"),
                field("cases_total"),
                field("cases_failed"),
                field("max_abs_residual"),
                field("min_slack"),
            )?;
        }
    }
    out.flush()?;
    if verdict == "pass" {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} records a failing verdict", args.input.display())))
    }
}
