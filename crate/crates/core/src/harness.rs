//! Seeded function generators, a brute-force fractional-sum oracle and the
//! suite runner that turns identity residuals and inequality certificates into
//! a [`VerificationReport`].
//!
//! Every case draws from its own ChaCha8 stream (`seed`, stream = case index),
//! so reports do not depend on evaluation order or thread count. Cases are
//! sorted by key before the report is assembled.

use std::collections::BTreeMap;
use std::io::Write;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::GridFn;
use crate::identities::{
    caputo_rl_residual, closed_kernel_sum, closed_kernel_sum_f64, commute_diff_sum_residual,
    composition_residual, direct_kernel_sum, direct_kernel_sum_f64, exchange_residual,
    exchange_residual_terms, remainder_routes_residual, sum_falling, sum_falling_direct,
    sum_falling_f64, taylor_caputo_rhs, taylor_extended_rhs, averaged_kernel_residual,
    CaputoTaylor, ResidualSeries,
};
use crate::inequalities::{
    avg_sobolev, ostrowski, poincare, remainder_bound, remainder_bound_p, sobolev, AvgSobolevSpec,
    BoundCertificate, HolderPair, WeightFn,
};
use crate::numerics::{falling_factorial_f64, format_significant, int, rat, to_f64, Backend, FracOrder, Scalar};
use crate::operators::{
    caputo_difference, fractional_sum, rl_difference, Kernel, PerturbedKernel, RisingKernel,
};
use crate::{Error, Rational, Result};

/// Identifier of the generator recorded in reports.
pub const PRNG: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64, one stream per case";

/// Relative tolerance for float residuals, against `max(1, |lhs|, |rhs|)`.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Relative tolerance for the oracle cross-check.
pub const ORACLE_REL_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Function families

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Random integer coefficients in `[−coeff_range, coeff_range]`.
    Polynomial { degree: usize, coeff_range: i64 },
    /// `Σ c_k t^k` with the given coefficients.
    FixedPolynomial(Vec<i64>),
    /// `ratio^(t−a)`.
    Geometric(#[serde(with = "rational_text")] Rational),
    /// Independent integers in `[−range, range]`.
    RandomInteger(i64),
    /// Integer-valued with `Δ^k f(a) = 0` for `k < vanish_up_to`.
    AdmissibleTail { vanish_up_to: usize },
    /// Integer-valued with `Δ^k f(a) = 0` exactly for `k ∈ from..to`; the
    /// other initial differences and the tail `Δ^to f` are random.
    VanishingDiffs { from: usize, to: usize },
}

impl FamilyKind {
    pub fn name(&self) -> String {
        match self {
            FamilyKind::Polynomial { degree, .. } => format!("polynomial{degree}"),
            FamilyKind::FixedPolynomial(c) => format!(
                "fixed_polynomial[{}]",
                c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
            ),
            FamilyKind::Geometric(r) => format!("geometric{r}"),
            FamilyKind::RandomInteger(r) => format!("random_integer{r}"),
            FamilyKind::AdmissibleTail { vanish_up_to } => format!("admissible_tail{vanish_up_to}"),
            FamilyKind::VanishingDiffs { from, to } => format!("vanishing_diffs{from}..{to}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFamily {
    pub kind: FamilyKind,
    pub seed: u64,
    #[serde(with = "rational_text")]
    pub a: Rational,
    pub length: usize,
}

/// Magnitude bound for the random parts of the integrated families.
const TAIL_RANGE: i64 = 9;

/// Samples `family` on `{a, …, a+length−1}`. Same family, same grid.
pub fn generate<S: Scalar>(family: &FunctionFamily) -> Result<GridFn<S>> {
    if family.length == 0 {
        return Err(Error::Config("family length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(family.seed);
    let n = family.length;
    let a = &family.a;
    let values: Vec<Rational> = match &family.kind {
        FamilyKind::Polynomial { degree, coeff_range } => {
            if *coeff_range < 0 {
                return Err(Error::Config("coefficient range must be nonnegative".into()));
            }
            let c: Vec<i64> = (0..=*degree).map(|_| rng.gen_range(-coeff_range..=*coeff_range)).collect();
            polynomial(&c, a, n)
        }
        FamilyKind::FixedPolynomial(c) => polynomial(c, a, n),
        FamilyKind::Geometric(r) => {
            let mut x = Rational::one();
            (0..n)
                .map(|_| {
                    let v = x.clone();
                    x *= r;
                    v
                })
                .collect()
        }
        FamilyKind::RandomInteger(range) => {
            if *range < 0 {
                return Err(Error::Config("integer range must be nonnegative".into()));
            }
            (0..n).map(|_| int(rng.gen_range(-range..=*range))).collect()
        }
        FamilyKind::AdmissibleTail { vanish_up_to } => integrate_up(&mut rng, 0, *vanish_up_to, n),
        FamilyKind::VanishingDiffs { from, to } => {
            if from > to {
                return Err(Error::Config(format!("vanishing range {from}..{to} is reversed")));
            }
            integrate_up(&mut rng, *from, *to, n)
        }
    };
    GridFn::from_samples(a.clone(), values.iter().map(S::from_rational).collect())
}

fn polynomial(c: &[i64], a: &Rational, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|j| {
            let t = a + int(j as i64);
            c.iter().rev().fold(Rational::zero(), |acc, &k| acc * &t + int(k))
        })
        .collect()
}

/// Builds `f` from `Δ^k f(a)` for `k < depth` (zero on `from..depth`) and a
/// random tail `Δ^depth f`, summing forward `depth` times.
fn integrate_up(rng: &mut ChaCha8Rng, from: usize, depth: usize, n: usize) -> Vec<Rational> {
    let initial: Vec<i64> =
        (0..depth).map(|k| if k < from { rng.gen_range(-TAIL_RANGE..=TAIL_RANGE) } else { 0 }).collect();
    let mut g: Vec<i64> = (0..n.saturating_sub(depth)).map(|_| rng.gen_range(-TAIL_RANGE..=TAIL_RANGE)).collect();
    for k in (0..depth).rev() {
        let mut acc = initial[k];
        let mut next = Vec::with_capacity(g.len() + 1);
        next.push(acc);
        for d in &g {
            acc += d;
            next.push(acc);
        }
        g = next;
    }
    g.truncate(n);
    g.into_iter().map(int).collect()
}

// ---------------------------------------------------------------------------
// Oracle

/// `Δ^{−ν} f(t) = (1/Γ(ν)) Σ_{s=a}^{t−ν} (t−s−1)^(ν−1) f(s)`, one falling
/// factorial per term, in `f64`.
pub fn oracle_fracsum<S: Scalar>(f: &GridFn<S>, nu: &Rational, t: &Rational) -> Result<f64> {
    if !nu.is_positive() {
        return Err(Error::Domain(format!("fractional sum order must be positive, got {nu}")));
    }
    let offset = t - f.base() - nu;
    if !offset.denom().is_one() || offset.is_negative() {
        return Err(Error::Domain(format!("t = {t} is not in N_{}", f.base() + nu)));
    }
    let n = offset.to_integer().to_usize().filter(|&n| n < f.len()).ok_or_else(|| {
        Error::OutOfRange(format!("{t} needs samples up to {}", f.base() + &offset))
    })?;
    let (t, nu) = (to_f64(t), to_f64(nu));
    let a = to_f64(f.base());
    let mut acc = 0.0;
    for (j, v) in f.values()[..=n].iter().enumerate() {
        let s = a + j as f64;
        acc += falling_factorial_f64(t - s - 1.0, nu - 1.0)? * v.to_f64();
    }
    Ok(acc / libm::tgamma(nu))
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Taylor,
    Identities,
    Inequalities,
    BackendAgreement,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Taylor => "taylor",
            Suite::Identities => "identities",
            Suite::Inequalities => "inequalities",
            Suite::BackendAgreement => "backend_agreement",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "taylor" => Suite::Taylor,
            "identities" => Suite::Identities,
            "inequalities" => Suite::Inequalities,
            "backend_agreement" | "backend-agreement" => Suite::BackendAgreement,
            "all" => Suite::All,
            other => return Err(Error::Config(format!("unknown suite {other:?}"))),
        })
    }
}

/// Multiply kernel coefficient `index` by `1 + rel` in the Taylor suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Tamper {
    pub index: usize,
    pub rel: Rational,
}

impl Default for Tamper {
    fn default() -> Self {
        Self { index: 1, rel: rat(1, 1000) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub backend: Backend,
    pub seed: u64,
    /// Non-integer orders in `(0, 3)` for the Taylor and identity suites.
    pub orders: Vec<Rational>,
    /// Grid lengths for the Taylor suite.
    pub lengths: Vec<usize>,
    /// Seeded cases per randomised identity.
    pub identity_cases: usize,
    /// Seeded instances per inequality.
    pub inequality_cases: usize,
    /// Seeded operator cases in the backend agreement suite.
    pub agreement_cases: usize,
    pub tamper: Option<Tamper>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Exact,
            seed: 42,
            orders: [(1, 4), (1, 3), (1, 2), (3, 4), (5, 4), (3, 2), (7, 4), (5, 2)]
                .iter()
                .map(|&(p, q)| rat(p, q))
                .collect(),
            lengths: vec![8, 16, 32, 64],
            identity_cases: 100,
            inequality_cases: 500,
            agreement_cases: 100,
            tamper: None,
            jobs: None,
        }
    }
}

impl SuiteConfig {
    fn validate(&self) -> Result<Vec<FracOrder>> {
        if self.backend == Backend::F32 {
            return Err(Error::Config("suites run on the exact or f64 backend".into()));
        }
        if self.orders.is_empty() || self.lengths.is_empty() {
            return Err(Error::Config("orders and lengths must be nonempty".into()));
        }
        if let Some(&n) = self.lengths.iter().find(|&&n| n < 4 || n > 4096) {
            return Err(Error::Config(format!("grid length {n} outside 4..=4096")));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        self.orders
            .iter()
            .map(|mu| {
                let o = FracOrder::new(mu.clone())?;
                if o.m() > 3 {
                    return Err(Error::Config(format!("order {mu} outside (0, 3)")));
                }
                Ok(o)
            })
            .collect()
    }

    fn echo(&self, suite: Suite) -> ConfigEcho {
        ConfigEcho {
            suite: suite.name().into(),
            backend: self.backend,
            seed: self.seed,
            orders: self.orders.iter().map(|q| q.to_string()).collect(),
            families: ["polynomial4", "geometric1/2", "random_integer9", "admissible_tail(m)", "vanishing_diffs(1..m)"]
                .map(String::from)
                .to_vec(),
            lengths: self.lengths.clone(),
            identity_cases: self.identity_cases,
            inequality_cases: self.inequality_cases,
            agreement_cases: self.agreement_cases,
            tamper: self.tamper.as_ref().map(|t| format!("c_{} *= 1 + {}", t.index, t.rel)),
        }
    }
}

/// The configuration as recorded in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub suite: String,
    pub backend: Backend,
    pub seed: u64,
    pub orders: Vec<String>,
    pub families: Vec<String>,
    pub lengths: Vec<usize>,
    pub identity_cases: usize,
    pub inequality_cases: usize,
    pub agreement_cases: usize,
    pub tamper: Option<String>,
}

// ---------------------------------------------------------------------------
// Report

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Summary of a residual series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub points: usize,
    pub max_abs_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_abs_residual_exact: Option<String>,
    pub max_relative_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub worst_t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub worst_lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub worst_rhs: Option<String>,
}

impl ResidualSummary {
    fn of<S: Scalar>(series: &ResidualSeries<S>) -> Self {
        let max = series.max_abs_residual();
        let worst = series.worst();
        Self {
            points: series.len(),
            max_abs_residual: max.to_f64(),
            max_abs_residual_exact: max.to_exact().map(|q| q.to_string()),
            max_relative_residual: series.max_relative_residual(),
            worst_t: worst.map(|p| p.t.to_string()),
            worst_lhs: worst.map(|p| p.lhs.to_text()),
            worst_rhs: worst.map(|p| p.rhs.to_text()),
        }
    }

    fn scalar(lhs: f64, rhs: f64, exact: Option<(String, String, String)>) -> Self {
        let r = (lhs - rhs).abs();
        let (l, rr, d) = match exact {
            Some((l, r, d)) => (Some(l), Some(r), Some(d)),
            None => (Some(format_significant(lhs, 17)), Some(format_significant(rhs, 17)), None),
        };
        Self {
            points: 1,
            max_abs_residual: r,
            max_abs_residual_exact: d,
            max_relative_residual: r / 1f64.max(lhs.abs()).max(rhs.abs()),
            worst_t: None,
            worst_lhs: l,
            worst_rhs: rr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseOutcome {
    Residual(ResidualSummary),
    Certificate(BoundCertificate),
    /// The case could not be evaluated.
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    /// Stable sort key, unique within a report.
    pub key: String,
    pub suite: String,
    /// Which identity, inequality or comparison the case exercises.
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub pass: bool,
    #[serde(flatten)]
    pub outcome: CaseOutcome,
}

impl CaseRecord {
    pub fn max_abs_residual(&self) -> Option<f64> {
        match &self.outcome {
            CaseOutcome::Residual(r) => Some(r.max_abs_residual),
            _ => None,
        }
    }

    /// Certificate slack; the exact comparison when there is one.
    pub fn slack(&self) -> Option<f64> {
        match &self.outcome {
            CaseOutcome::Certificate(c) => Some(c.exact_form.as_ref().map_or(c.slack, |e| to_f64(&e.slack_value))),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub prng: String,
    pub verdict: Verdict,
    pub cases_total: usize,
    pub cases_failed: usize,
    /// Largest residual; on the exact backend, over exactly computed residuals.
    pub max_abs_residual: f64,
    /// Smallest certificate slack, using the exact comparison when there is one.
    pub min_slack: Option<f64>,
    pub cases: Vec<CaseRecord>,
}

/// One CSV row per case.
#[derive(Serialize)]
struct CsvRow<'a> {
    key: &'a str,
    suite: &'a str,
    check: &'a str,
    kind: &'static str,
    pass: bool,
    points: Option<usize>,
    max_abs_residual: Option<f64>,
    max_relative_residual: Option<f64>,
    lhs: Option<f64>,
    rhs: Option<f64>,
    slack: Option<f64>,
    exact: Option<bool>,
    message: Option<&'a str>,
}

impl VerificationReport {
    fn assemble(suite: Suite, config: &SuiteConfig, mut cases: Vec<CaseRecord>) -> Self {
        cases.sort_by(|x, y| x.key.cmp(&y.key));
        let failed = cases.iter().filter(|c| !c.pass).count();
        // on the exact backend only exact residuals count; the float cross-checks
        // it also runs are judged by their own tolerances
        let exact = config.backend == Backend::Exact;
        let max_abs_residual = cases
            .iter()
            .filter(|c| !exact || matches!(&c.outcome, CaseOutcome::Residual(r) if r.max_abs_residual_exact.is_some()))
            .filter_map(|c| c.max_abs_residual())
            .fold(0.0, f64::max);
        let min_slack = cases.iter().filter_map(|c| c.slack()).reduce(f64::min);
        Self {
            suite: suite.name().into(),
            config: config.echo(suite),
            prng: PRNG.into(),
            verdict: if failed == 0 { Verdict::Pass } else { Verdict::Fail },
            cases_total: cases.len(),
            cases_failed: failed,
            max_abs_residual,
            min_slack,
            cases,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Cases whose check name starts with `prefix`.
    pub fn cases_for<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CaseRecord> + 'a {
        self.cases.iter().filter(move |c| c.check.starts_with(prefix))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cases {
            let mut row = CsvRow {
                key: &c.key,
                suite: &c.suite,
                check: &c.check,
                kind: "residual",
                pass: c.pass,
                points: None,
                max_abs_residual: None,
                max_relative_residual: None,
                lhs: None,
                rhs: None,
                slack: None,
                exact: None,
                message: None,
            };
            match &c.outcome {
                CaseOutcome::Residual(r) => {
                    row.points = Some(r.points);
                    row.max_abs_residual = Some(r.max_abs_residual);
                    row.max_relative_residual = Some(r.max_relative_residual);
                }
                CaseOutcome::Certificate(cert) => {
                    row.kind = "certificate";
                    row.lhs = Some(cert.lhs);
                    row.rhs = Some(cert.rhs);
                    row.slack = Some(cert.slack);
                    row.exact = Some(cert.exact);
                }
                CaseOutcome::Error { message } => {
                    row.kind = "error";
                    row.message = Some(message);
                }
            }
            w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

// Same order as the fields of `CsvRow`; case JSON uses the same keys.
const CSV_COLUMNS: [&str; 13] = [
    "key", "suite", "check", "kind", "pass", "points", "max_abs_residual", "max_relative_residual", "lhs", "rhs",
    "slack", "exact", "message",
];

/// Report JSON as read back by the command-line `report` subcommand.
pub fn csv_from_report_json(json: &str) -> Result<String> {
    let v: serde_json::Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    let cases = v
        .get("cases")
        .and_then(|c| c.as_array())
        .ok_or_else(|| Error::Parse("report has no `cases` array".into()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).map_err(|e| Error::Io(e.to_string()))?;
    let text = |c: &serde_json::Value, k: &str| match c.get(k) {
        None | Some(serde_json::Value::Null) => String::new(),
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(x) => x.to_string(),
    };
    for c in cases {
        let row = CSV_COLUMNS.map(|k| text(c, k));
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

// ---------------------------------------------------------------------------
// Running suites

/// Runs `suite` under `config`.
pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<VerificationReport> {
    let orders = config.validate()?;
    let run = || match config.backend {
        Backend::Exact => collect::<Rational>(suite, config, &orders),
        _ => collect::<f64>(suite, config, &orders),
    };
    let cases = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(VerificationReport::assemble(suite, config, cases))
}

fn collect<S: Scalar>(suite: Suite, config: &SuiteConfig, orders: &[FracOrder]) -> Vec<CaseRecord> {
    let mut jobs: Vec<Job> = Vec::new();
    if matches!(suite, Suite::Taylor | Suite::All) {
        taylor_jobs(config, orders, &mut jobs);
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        identity_jobs(config, orders, &mut jobs);
    }
    if matches!(suite, Suite::Inequalities | Suite::All) {
        inequality_jobs(config, &mut jobs);
    }
    if matches!(suite, Suite::BackendAgreement | Suite::All) {
        agreement_jobs(config, &mut jobs);
    }
    let tamper = config.tamper.clone();
    jobs.into_par_iter()
        .enumerate()
        .flat_map_iter(|(i, job)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            run_job::<S>(job, &mut rng, tamper.as_ref())
        })
        .collect()
}

/// A unit of work; random parameters are drawn inside `run_job` from the
/// job's own stream.
#[derive(Clone, Debug)]
enum Job {
    Taylor { mu: FracOrder, family: FamilyKind, family_index: usize, len: usize },
    Composition(usize),
    Commute(usize),
    Exchange(usize),
    ExchangeUpperLimit,
    CaputoRl { mu: FracOrder, family: FamilyKind, family_index: usize },
    KernelSum(usize),
    SumFalling(usize),
    AveragedKernel(usize),
    WorkedValues,
    Inequality { which: Which, index: usize },
    Agreement(usize),
    Oracle(usize),
}

#[derive(Clone, Copy, Debug)]
enum Which {
    Remainder,
    RemainderP,
    Ostrowski,
    Poincare,
    Sobolev,
    AvgSobolev,
}

impl Which {
    const ALL: [Which; 6] =
        [Which::Remainder, Which::RemainderP, Which::Ostrowski, Which::Poincare, Which::Sobolev, Which::AvgSobolev];

    fn check(self) -> &'static str {
        match self {
            Which::Remainder => "remainder_bound",
            Which::RemainderP => "remainder_bound_p",
            Which::Ostrowski => "ostrowski",
            Which::Poincare => "poincare",
            Which::Sobolev => "sobolev",
            Which::AvgSobolev => "avg_sobolev",
        }
    }
}

/// The five Taylor-suite families for an order with ceiling `m`.
fn taylor_families(m: usize) -> Vec<FamilyKind> {
    vec![
        FamilyKind::Polynomial { degree: 4, coeff_range: 5 },
        FamilyKind::Geometric(rat(1, 2)),
        FamilyKind::RandomInteger(TAIL_RANGE),
        FamilyKind::AdmissibleTail { vanish_up_to: m },
        FamilyKind::VanishingDiffs { from: 1, to: m },
    ]
}

fn taylor_jobs(config: &SuiteConfig, orders: &[FracOrder], jobs: &mut Vec<Job>) {
    for mu in orders {
        for (family_index, family) in taylor_families(mu.m()).into_iter().enumerate() {
            for &len in &config.lengths {
                jobs.push(Job::Taylor { mu: mu.clone(), family: family.clone(), family_index, len });
            }
        }
    }
}

fn identity_jobs(config: &SuiteConfig, orders: &[FracOrder], jobs: &mut Vec<Job>) {
    for i in 0..config.identity_cases {
        jobs.extend([
            Job::Composition(i),
            Job::Commute(i),
            Job::Exchange(i),
            Job::KernelSum(i),
            Job::SumFalling(i),
            Job::AveragedKernel(i),
        ]);
    }
    jobs.push(Job::ExchangeUpperLimit);
    jobs.push(Job::WorkedValues);
    for mu in orders {
        for (family_index, family) in taylor_families(mu.m()).into_iter().enumerate() {
            jobs.push(Job::CaputoRl { mu: mu.clone(), family, family_index });
        }
    }
}

fn inequality_jobs(config: &SuiteConfig, jobs: &mut Vec<Job>) {
    for which in Which::ALL {
        jobs.extend((0..config.inequality_cases).map(|index| Job::Inequality { which, index }));
    }
}

fn agreement_jobs(config: &SuiteConfig, jobs: &mut Vec<Job>) {
    for i in 0..config.agreement_cases {
        jobs.push(Job::Agreement(i));
        jobs.push(Job::Oracle(i));
    }
}

/// A random non-integer order `p/q` in `(0, max)` with `q ≤ 12`.
fn random_order(rng: &mut ChaCha8Rng, max: i64) -> FracOrder {
    loop {
        let q = rng.gen_range(2..=12);
        let p = rng.gen_range(1..max * q);
        if p % q != 0 {
            return FracOrder::new(rat(p, q)).expect("non-integer positive order");
        }
    }
}

/// A random positive rational `p/q` in `(0, max)` with `q ≤ 12`, integers allowed.
fn random_positive(rng: &mut ChaCha8Rng, max: i64) -> Rational {
    let q = rng.gen_range(1..=12);
    rat(rng.gen_range(1..max * q), q)
}

fn family(kind: FamilyKind, rng: &mut ChaCha8Rng, a: Rational, length: usize) -> FunctionFamily {
    FunctionFamily { kind, seed: rng.gen(), a, length }
}

fn random_grid<S: Scalar>(rng: &mut ChaCha8Rng, a: Rational, length: usize) -> Result<GridFn<S>> {
    let kind = match rng.gen_range(0..3) {
        0 => FamilyKind::RandomInteger(TAIL_RANGE),
        1 => FamilyKind::Polynomial { degree: rng.gen_range(0..5), coeff_range: 4 },
        _ => FamilyKind::AdmissibleTail { vanish_up_to: rng.gen_range(1..4) },
    };
    generate(&family(kind, rng, a, length))
}

/// A random grid base `p/q ≥ 0` with `q ≤ 4`.
fn random_base(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(0..12), rng.gen_range(1..=4))
}

fn residual_case<S: Scalar>(
    key: String,
    suite: &str,
    check: &str,
    params: BTreeMap<String, String>,
    series: Result<ResidualSeries<S>>,
) -> CaseRecord {
    match series {
        Ok(s) => CaseRecord {
            key,
            suite: suite.into(),
            check: check.into(),
            params,
            pass: !s.is_empty() && s.within(FLOAT_REL_TOL),
            outcome: CaseOutcome::Residual(ResidualSummary::of(&s)),
        },
        Err(e) => error_case(key, suite, check, params, e),
    }
}

fn error_case(key: String, suite: &str, check: &str, params: BTreeMap<String, String>, e: Error) -> CaseRecord {
    CaseRecord {
        key,
        suite: suite.into(),
        check: check.into(),
        params,
        pass: false,
        outcome: CaseOutcome::Error { message: e.to_string() },
    }
}

fn kv(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn run_job<S: Scalar>(job: Job, rng: &mut ChaCha8Rng, tamper: Option<&Tamper>) -> Vec<CaseRecord> {
    match job {
        Job::Taylor { mu, family: kind, family_index, len } => taylor_cases::<S>(&mu, kind, family_index, len, rng, tamper),
        Job::CaputoRl { mu, family: kind, family_index } => {
            let a = int(rng.gen_range(0..3));
            let fam = family(kind, rng, a, 24);
            let key = format!("identities/caputo_rl/mu={}/family={family_index}", mu.mu());
            let params = kv(&[("mu", mu.to_string()), ("family", fam.kind.name()), ("a", fam.a.to_string())]);
            let series = generate::<S>(&fam).and_then(|f| caputo_rl_residual(&f, &mu));
            vec![residual_case(key, "identities", "caputo_rl", params, series)]
        }
        Job::Composition(i) => {
            let (mu, nu) = (random_positive(rng, 3), random_positive(rng, 3));
            let a = random_base(rng);
            let len = rng.gen_range(4..=20);
            let params = kv(&[("mu", mu.to_string()), ("nu", nu.to_string()), ("a", a.to_string())]);
            let series = random_grid::<S>(rng, a, len).and_then(|f| composition_residual(&f, &mu, &nu));
            vec![residual_case(format!("identities/composition/{i:04}"), "identities", "composition", params, series)]
        }
        Job::Commute(i) => {
            let p = rng.gen_range(1..=2usize);
            let nu = int(p as i64) + random_positive(rng, 2);
            let a = random_base(rng);
            let len = rng.gen_range(p + 2..=20);
            let params = kv(&[("nu", nu.to_string()), ("p", p.to_string()), ("a", a.to_string())]);
            let series = random_grid::<S>(rng, a, len).and_then(|f| commute_diff_sum_residual(&f, &nu, p));
            vec![residual_case(format!("identities/commute/{i:04}"), "identities", "commute", params, series)]
        }
        Job::Exchange(i) => {
            let p = rng.gen_range(1..=3usize);
            let nu = random_positive(rng, 3);
            let a = random_base(rng);
            let len = rng.gen_range(p + 2..=20);
            let params = kv(&[("nu", nu.to_string()), ("p", p.to_string()), ("a", a.to_string())]);
            let series = random_grid::<S>(rng, a, len).and_then(|f| exchange_residual(&f, &nu, p));
            vec![residual_case(format!("identities/exchange/{i:04}"), "identities", "exchange", params, series)]
        }
        Job::ExchangeUpperLimit => exchange_upper_limit::<S>(rng),
        Job::KernelSum(i) => {
            let mu = random_positive(rng, 4);
            let a = random_base(rng);
            let m = crate::numerics::ceil(&mu);
            let t = &a + Rational::from_integer(m) + int(rng.gen_range(0..16));
            let params = kv(&[("mu", mu.to_string()), ("a", a.to_string()), ("t", t.to_string())]);
            let key = format!("identities/kernel_sum/{i:04}");
            closed_form_case::<S>(
                key,
                "kernel_sum",
                params,
                || Ok((closed_kernel_sum(&a, &mu, &t)?, direct_kernel_sum(&a, &mu, &t)?)),
                || Ok((closed_kernel_sum_f64(&a, &mu, &t)?, direct_kernel_sum_f64(&a, &mu, &t)?)),
            )
        }
        Job::SumFalling(i) => {
            let q = rng.gen_range(1..=12);
            let nu = rat(rng.gen_range(1 - q..3 * q), q);
            let a = &nu + rat(rng.gen_range(0..24), rng.gen_range(1..=2));
            let b = &a + int(rng.gen_range(0..16));
            let params = kv(&[("a", a.to_string()), ("b", b.to_string()), ("nu", nu.to_string())]);
            let key = format!("identities/sum_falling/{i:04}");
            closed_form_case::<S>(
                key,
                "sum_falling",
                params,
                || Ok((sum_falling(&a, &b, &nu)?, sum_falling_direct(&a, &b, &nu)?)),
                || {
                    let direct = sum_falling_direct(&a, &b, &nu)?.to_f64();
                    Ok((sum_falling_f64(&a, &b, &nu)?, direct))
                },
            )
        }
        Job::AveragedKernel(i) => {
            let mu = random_order(rng, 3);
            let p = rng.gen_range(0..mu.m());
            let a = random_base(rng);
            let first = &a + int((mu.m() - p) as i64 + 1);
            let b = &first + int(rng.gen_range(0..16));
            let params = kv(&[("mu", mu.to_string()), ("p", p.to_string()), ("a", a.to_string()), ("b", b.to_string())]);
            let key = format!("identities/averaged_kernel/{i:04}");
            let check = "averaged_kernel";
            match averaged_kernel_residual(&a, &mu, p, &b) {
                Ok(r) => {
                    let v = r.to_f64();
                    let pass = if S::BACKEND == Backend::Exact { r.is_zero() } else { v.abs() <= FLOAT_REL_TOL };
                    vec![CaseRecord {
                        key,
                        suite: "identities".into(),
                        check: check.into(),
                        params,
                        pass,
                        outcome: CaseOutcome::Residual(ResidualSummary::scalar(v, 0.0, Some((r.to_string(), "0".into(), r.to_string())))),
                    }]
                }
                Err(e) => vec![error_case(key, "identities", check, params, e)],
            }
        }
        Job::WorkedValues => worked_values(),
        Job::Inequality { which, index } => vec![inequality_case::<S>(which, index, rng)],
        Job::Agreement(i) => agreement_case::<S>(i, rng),
        Job::Oracle(i) => oracle_case::<S>(i, rng),
    }
}

fn taylor_cases<S: Scalar>(
    mu: &FracOrder,
    kind: FamilyKind,
    family_index: usize,
    len: usize,
    rng: &mut ChaCha8Rng,
    tamper: Option<&Tamper>,
) -> Vec<CaseRecord> {
    let a = int(rng.gen_range(0..3));
    let fam = family(kind, rng, a, len);
    let base_key = format!("taylor/mu={}/family={family_index}/len={len:03}", mu.mu());
    let params = |p: usize| {
        kv(&[
            ("mu", mu.to_string()),
            ("p", p.to_string()),
            ("family", fam.kind.name()),
            ("a", fam.a.to_string()),
            ("len", len.to_string()),
            ("seed", fam.seed.to_string()),
        ])
    };
    let f = match generate::<S>(&fam) {
        Ok(f) => f,
        Err(e) => return vec![error_case(base_key, "taylor", "taylor", params(0), e)],
    };
    let kernel: Box<dyn Kernel<S>> = match tamper {
        Some(t) => Box::new(PerturbedKernel { inner: RisingKernel, index: t.index, rel: t.rel.clone() }),
        None => Box::new(RisingKernel),
    };
    let mut out = Vec::new();
    for p in (0..=2).filter(|&p| int(p as i64) < *mu.mu()) {
        let check = if p == 0 { "taylor" } else { "taylor_extended" };
        let series = CaputoTaylor::with_kernel(&f, mu, p, kernel.as_ref()).and_then(|ct| ct.residuals(&f));
        out.push(residual_case(format!("{base_key}/p={p}"), "taylor", check, params(p), series));
    }
    // the p = 0 extended formula must reproduce the plain formula bit for bit
    let identical = (|| {
        let mut s = ResidualSeries::default();
        let first = f.base() + int(mu.m() as i64);
        let last = len - mu.m() - 1;
        for j in [0, last / 2, last] {
            let t = &first + int(j as i64);
            let plain = taylor_caputo_rhs(&f, mu, &t)?;
            let ext = taylor_extended_rhs(&f, mu, 0, &t)?;
            if plain.to_text() != ext.to_text() {
                return Err(Error::Exactness(format!("p = 0 path differs at t = {t}")));
            }
            s.push(t, plain, ext);
        }
        Ok(s)
    })();
    out.push(residual_case(format!("{base_key}/p0_identical"), "taylor", "taylor_p0_identical", params(0), identical));
    out.push(residual_case(
        format!("{base_key}/remainder_routes"),
        "taylor",
        "taylor_remainder_routes",
        params(0),
        remainder_routes_residual(&f, mu),
    ));
    out
}

/// The correction sum stops at `k = p−1`: that choice vanishes, while running
/// to `k = p` leaves a nonzero residual on some case.
fn exchange_upper_limit<S: Scalar>(rng: &mut ChaCha8Rng) -> Vec<CaseRecord> {
    let mut with_p = ResidualSeries::<S>::default();
    let mut with_p_plus_1 = ResidualSeries::<S>::default();
    let mut err = None;
    for _ in 0..12 {
        let p = rng.gen_range(1..=3usize);
        let nu = random_positive(rng, 3);
        let f = match random_grid::<S>(rng, int(0), 12) {
            Ok(f) => f,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        match (exchange_residual_terms(&f, &nu, p, p), exchange_residual_terms(&f, &nu, p, p + 1)) {
            (Ok(x), Ok(y)) => {
                with_p.extend(x);
                with_p_plus_1.extend(y);
            }
            (Err(e), _) | (_, Err(e)) => {
                err = Some(e);
                break;
            }
        }
    }
    if let Some(e) = err {
        return vec![error_case("identities/exchange_upper_limit".into(), "identities", "exchange_upper_limit", BTreeMap::new(), e)];
    }
    let separated = !with_p_plus_1.within(FLOAT_REL_TOL);
    let summary = ResidualSummary::of(&with_p);
    let extra = ResidualSummary::of(&with_p_plus_1);
    vec![CaseRecord {
        key: "identities/exchange_upper_limit".into(),
        suite: "identities".into(),
        check: "exchange_upper_limit".into(),
        params: kv(&[
            ("limit_p_minus_1_max_abs", format_significant(summary.max_abs_residual, 17)),
            ("limit_p_max_abs", format_significant(extra.max_abs_residual, 17)),
        ]),
        pass: with_p.within(FLOAT_REL_TOL) && separated,
        outcome: CaseOutcome::Residual(summary),
    }]
}

fn closed_form_case<S: Scalar>(
    key: String,
    check: &str,
    params: BTreeMap<String, String>,
    exact: impl FnOnce() -> Result<(crate::GammaMonomial, crate::GammaMonomial)>,
    float: impl FnOnce() -> Result<(f64, f64)>,
) -> Vec<CaseRecord> {
    let outcome = if S::BACKEND == Backend::Exact {
        exact().map(|(c, d)| {
            let diff = c.checked_sub(&d);
            let pass = diff.as_ref().map_or(false, |x| x.is_zero());
            let text = diff.map_or_else(|| "units differ".to_string(), |x| x.to_string());
            (pass, ResidualSummary::scalar(c.to_f64(), d.to_f64(), Some((c.to_string(), d.to_string(), text))))
        })
    } else {
        float().map(|(c, d)| {
            let s = ResidualSummary::scalar(c, d, None);
            (s.max_relative_residual <= FLOAT_REL_TOL, s)
        })
    };
    match outcome {
        Ok((pass, summary)) => vec![CaseRecord {
            key,
            suite: "identities".into(),
            check: check.into(),
            params,
            pass,
            outcome: CaseOutcome::Residual(summary),
        }],
        Err(e) => vec![error_case(key, "identities", check, params, e)],
    }
}

/// `√π` and `27√π/16` from the float closed forms, to `1e−12`.
fn worked_values() -> Vec<CaseRecord> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let cases: [(&str, Result<f64>, f64); 2] = [
        ("kernel_sum_sqrt_pi", closed_kernel_sum_f64(&int(0), &rat(1, 2), &int(1)), sqrt_pi),
        ("sum_falling_27_sqrt_pi_16", sum_falling_f64(&rat(3, 2), &rat(5, 2), &rat(1, 2)), 27.0 * sqrt_pi / 16.0),
    ];
    cases
        .into_iter()
        .map(|(name, got, want)| {
            let key = format!("identities/worked/{name}");
            match got {
                Ok(v) => CaseRecord {
                    key,
                    suite: "identities".into(),
                    check: "worked_value".into(),
                    params: kv(&[("name", name.into())]),
                    pass: (v - want).abs() <= 1e-12,
                    outcome: CaseOutcome::Residual(ResidualSummary::scalar(v, want, None)),
                },
                Err(e) => error_case(key, "identities", "worked_value", BTreeMap::new(), e),
            }
        })
        .collect()
}

const HOLDER_GAMMAS: [(i64, i64); 6] = [(2, 1), (2, 1), (3, 1), (3, 2), (4, 1), (5, 4)];
const SOBOLEV_RS: [(i64, i64); 6] = [(1, 1), (2, 1), (3, 1), (4, 1), (5, 2), (6, 1)];

fn inequality_case<S: Scalar>(which: Which, index: usize, rng: &mut ChaCha8Rng) -> CaseRecord {
    let key = format!("inequalities/{}/{index:04}", which.check());
    let check = which.check();
    let mu = random_order(rng, 3);
    let m = mu.m();
    let a = int(rng.gen_range(0..3));
    let len = rng.gen_range(m + 4..=20);
    let pick_p = |rng: &mut ChaCha8Rng| rng.gen_range(0..m);
    let holder = |rng: &mut ChaCha8Rng| {
        let &(p, q) = HOLDER_GAMMAS.choose(rng).expect("nonempty");
        HolderPair::conjugate(rat(p, q)).expect("valid exponent")
    };
    let mut base = kv(&[("mu", mu.to_string()), ("a", a.to_string()), ("len", len.to_string())]);

    let result: Result<BoundCertificate> = (|| match which {
        Which::Remainder | Which::RemainderP => {
            let p = if matches!(which, Which::Remainder) { 0 } else { pick_p(rng) };
            let f = random_grid::<S>(rng, a.clone(), len)?;
            let t = &a + int((m - p) as i64 + rng.gen_range(0..(len - m) as i64));
            base.insert("t".into(), t.to_string());
            if matches!(which, Which::Remainder) {
                remainder_bound(&f, &mu, &t)
            } else {
                remainder_bound_p(&f, &mu, p, &t)
            }
        }
        Which::Ostrowski => {
            let p = pick_p(rng);
            let f = generate::<S>(&family(FamilyKind::VanishingDiffs { from: p + 1, to: m }, rng, a.clone(), len))?;
            let lo = (m - p) as i64 + 1;
            let b = &a + int(rng.gen_range(lo..=len as i64 - 1 - p as i64));
            ostrowski(&f, &mu, p, &b)
        }
        Which::Poincare | Which::Sobolev => {
            let p = pick_p(rng);
            let f = generate::<S>(&family(FamilyKind::VanishingDiffs { from: p, to: m }, rng, a.clone(), len))?;
            let lo = (m - p) as i64;
            let b = &a + int(rng.gen_range(lo..=len as i64 - 1 - p as i64));
            let hp = holder(rng);
            if matches!(which, Which::Poincare) {
                poincare(&f, &mu, p, &hp, &b)
            } else {
                let &(rp, rq) = SOBOLEV_RS.choose(rng).expect("nonempty");
                sobolev(&f, &mu, p, &hp, &rat(rp, rq), &b)
            }
        }
        Which::AvgSobolev => {
            let k = rng.gen_range(1..=3usize);
            let mut orders: Vec<FracOrder> = Vec::new();
            while orders.len() < k {
                let o = random_order(rng, 3);
                if !orders.contains(&o) {
                    orders.push(o);
                }
            }
            orders.sort_by(|x, y| x.mu().cmp(y.mu()));
            let top = orders.last().expect("k ≥ 1").m();
            let weights = (0..k)
                .map(|_| match rng.gen_range(0..3) {
                    0 => WeightFn::Constant(rat(rng.gen_range(1..=6), rng.gen_range(1..=3))),
                    1 => WeightFn::Affine { intercept: int(1), slope: rat(rng.gen_range(0..=3), rng.gen_range(1..=2)) },
                    _ => WeightFn::Table((0..len).map(|_| rat(rng.gen_range(1..=8), rng.gen_range(1..=4))).collect()),
                })
                .collect();
            let &(rp, rq) = SOBOLEV_RS.choose(rng).expect("nonempty");
            let spec = AvgSobolevSpec::new(orders, weights, rat(rp, rq))?;
            let len = len.max(top + 1);
            let f = generate::<S>(&family(FamilyKind::AdmissibleTail { vanish_up_to: top }, rng, a.clone(), len))?;
            let b = &a + int(rng.gen_range(top as i64..=len as i64 - 1));
            avg_sobolev(&f, &spec, &b)
        }
    })();
    match result {
        Ok(cert) => CaseRecord {
            key,
            suite: "inequalities".into(),
            check: check.into(),
            params: cert.params.clone(),
            pass: cert.pass,
            outcome: CaseOutcome::Certificate(cert),
        },
        Err(e) => error_case(key, "inequalities", check, base, e),
    }
}

/// Exact against `S` for the fractional sum and both fractional differences.
fn agreement_case<S: Scalar>(i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRecord> {
    let mu = random_order(rng, 3);
    let nu = random_positive(rng, 3);
    let a = random_base(rng);
    let len = rng.gen_range(mu.m() + 2..=32);
    let exact = match random_grid::<Rational>(rng, a.clone(), len) {
        Ok(f) => f,
        Err(e) => return vec![error_case(format!("backend_agreement/{i:04}"), "backend_agreement", "agreement", BTreeMap::new(), e)],
    };
    let other: GridFn<S> = exact.map(|x| S::from_rational(x));
    let params = kv(&[("mu", mu.to_string()), ("nu", nu.to_string()), ("a", a.to_string()), ("len", len.to_string())]);
    let ops: [(&str, Box<dyn Fn() -> Result<(GridFn<Rational>, GridFn<S>)>>); 3] = [
        ("fracsum", Box::new(|| Ok((fractional_sum(&exact, &nu)?, fractional_sum(&other, &nu)?)))),
        ("caputo", Box::new(|| Ok((caputo_difference(&exact, &mu)?, caputo_difference(&other, &mu)?)))),
        ("rl", Box::new(|| Ok((rl_difference(&exact, &mu)?, rl_difference(&other, &mu)?)))),
    ];
    ops.iter()
        .map(|(name, op)| {
            let series = op().map(|(x, y)| {
                let mut s = ResidualSeries::<f64>::default();
                for (j, (u, v)) in x.values().iter().zip(y.values()).enumerate() {
                    s.push(x.point(j), to_f64(u), v.to_f64());
                }
                s
            });
            residual_case(format!("backend_agreement/{name}/{i:04}"), "backend_agreement", &format!("agreement_{name}"), params.clone(), series)
        })
        .collect()
}

/// The operator fractional sum against [`oracle_fracsum`] at every output point.
fn oracle_case<S: Scalar>(i: usize, rng: &mut ChaCha8Rng) -> Vec<CaseRecord> {
    let nu = random_positive(rng, 3);
    let a = random_base(rng);
    let len = rng.gen_range(2..=32);
    let key = format!("backend_agreement/oracle/{i:04}");
    let params = kv(&[("nu", nu.to_string()), ("a", a.to_string()), ("len", len.to_string())]);
    let series = (|| {
        let f = random_grid::<S>(rng, a, len)?;
        let g = fractional_sum(&f, &nu)?;
        let mut s = ResidualSeries::<f64>::default();
        for (j, v) in g.values().iter().enumerate() {
            let t = g.point(j);
            let o = oracle_fracsum(&f, &nu, &t)?;
            s.push(t, v.to_f64(), o);
        }
        Ok(s)
    })();
    vec![match series {
        Ok(s) => CaseRecord {
            key,
            suite: "backend_agreement".into(),
            check: "oracle".into(),
            params,
            pass: s.max_relative_residual() <= ORACLE_REL_TOL,
            outcome: CaseOutcome::Residual(ResidualSummary::of(&s)),
        },
        Err(e) => error_case(key, "backend_agreement", "oracle", params, e),
    }]
}

mod rational_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::numerics::parse_rational;
    use crate::Rational;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
