//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fdcalc_core::harness::{run_suite, CaseOutcome, Suite, SuiteConfig, Tamper, VerificationReport};
use fdcalc_core::inequalities::ostrowski;
use fdcalc_core::numerics::{int, rat};
use fdcalc_core::{Backend, ExactGrid, FracOrder};

fn all_pass(r: &VerificationReport, check: &str) -> (usize, bool) {
    let cases: Vec<_> = r.cases.iter().filter(|c| c.check == check).collect();
    (cases.len(), !cases.is_empty() && cases.iter().all(|c| c.pass))
}

fn exact_zero(r: &VerificationReport, check: &str) -> bool {
    r.cases.iter().filter(|c| c.check == check).all(|c| match &c.outcome {
        CaseOutcome::Residual(s) => s.max_abs_residual_exact.as_deref() == Some("0"),
        _ => false,
    })
}

fn timed(suite: Suite, cfg: &SuiteConfig) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let r = run_suite(suite, cfg).expect("valid configuration");
    (r, start.elapsed())
}

fn main() -> ExitCode {
    let exact = SuiteConfig::default();
    let float = SuiteConfig { backend: Backend::F64, ..SuiteConfig::default() };
    let mut lines: Vec<(bool, String)> = Vec::new();

    let (taylor_x, taylor_time) = timed(Suite::Taylor, &exact);
    let (taylor_f, _) = timed(Suite::Taylor, &float);
    let (n1, x1) = all_pass(&taylor_x, "taylor");
    let (_, f1) = all_pass(&taylor_f, "taylor");
    let ok = x1 && f1 && exact_zero(&taylor_x, "taylor") && taylor_time < Duration::from_secs(10);
    lines.push((
        ok,
        format!(
            "1 Taylor exactness: {n1} cases over {} orders, 5 families, lengths {:?}; exact residuals 0, float within 1e-9; exact suite {:.2?}",
            exact.orders.len(),
            exact.lengths,
            taylor_time
        ),
    ));

    let (n2, x2) = all_pass(&taylor_x, "taylor_extended");
    let (_, f2) = all_pass(&taylor_f, "taylor_extended");
    let (_, same_x) = all_pass(&taylor_x, "taylor_p0_identical");
    let (_, same_f) = all_pass(&taylor_f, "taylor_p0_identical");
    lines.push((
        x2 && f2 && same_x && same_f && exact_zero(&taylor_x, "taylor_extended"),
        format!("2 Extended Taylor p in {{1,2}}: {n2} cases with zero residual; p = 0 bit-identical to the plain formula"),
    ));

    let (ident, _) = timed(Suite::Identities, &exact);
    let (nc, c) = all_pass(&ident, "composition");
    let (nm, m) = all_pass(&ident, "commute");
    lines.push((
        c && m && nc >= 100 && nm >= 100 && exact_zero(&ident, "composition") && exact_zero(&ident, "commute"),
        format!("3 Composition and commute rule: {nc} and {nm} seeded cases, exact zero residuals"),
    ));

    let (nr, rl) = all_pass(&ident, "caputo_rl");
    let (ne, ex) = all_pass(&ident, "exchange");
    let (_, limit) = all_pass(&ident, "exchange_upper_limit");
    lines.push((
        rl && ex && limit,
        format!("4 Caputo/RL relation ({nr} cases) and exchange formula ({ne} cases) exact; limit k <= p-1 vanishes, k <= p does not"),
    ));

    let (nk, k) = all_pass(&ident, "kernel_sum");
    let (ns, s) = all_pass(&ident, "sum_falling");
    let (_, w) = all_pass(&ident, "worked_value");
    lines.push((
        k && s && w && nk >= 100 && ns >= 100,
        format!("5 Closed forms: kernel sum {nk} and falling sum {ns} instances match exactly; sqrt(pi) and 27 sqrt(pi)/16 within 1e-12"),
    ));

    let (ineq_x, _) = timed(Suite::Inequalities, &exact);
    let (ineq_f, _) = timed(Suite::Inequalities, &float);
    let checks = ["remainder_bound", "remainder_bound_p", "ostrowski", "poincare", "sobolev", "avg_sobolev"];
    let counts: Vec<usize> = checks.iter().map(|c| all_pass(&ineq_x, c).0).collect();
    let ineq_ok = checks.iter().all(|c| all_pass(&ineq_x, c).1 && all_pass(&ineq_f, c).1)
        && counts.iter().all(|&n| n >= 500);
    let f = ExactGrid::tabulate(int(0), 4, |t| t.clone()).unwrap();
    let cert = ostrowski(&f, &FracOrder::new(rat(1, 2)).unwrap(), 0, &int(3)).unwrap();
    let form = cert.exact_form.as_ref().unwrap();
    let worked = form.lhs == "5/2" && form.rhs == "405/128";
    lines.push((
        ineq_ok && worked,
        format!(
            "6 Inequality certificates: {} instances per inequality, all slacks >= 0 on both backends (min slack {:?}, float floor -1e-9); Ostrowski f(t)=t gives {} <= {}",
            counts.iter().min().unwrap(),
            ineq_x.min_slack,
            form.lhs,
            form.rhs
        ),
    ));

    let (agree_f, _) = timed(Suite::BackendAgreement, &float);
    let (agree_x, _) = timed(Suite::BackendAgreement, &exact);
    let (no, o) = all_pass(&agree_f, "oracle");
    let (_, ox) = all_pass(&agree_x, "oracle");
    lines.push((o && ox && no >= 100, format!("7 Oracle agreement: {no} random cases within 1e-10 relative")));

    let tampered = SuiteConfig { tamper: Some(Tamper::default()), ..SuiteConfig::default() };
    let (neg, _) = timed(Suite::Taylor, &tampered);
    let first = neg.failures().next().map(|c| c.key.clone()).unwrap_or_default();
    lines.push((
        !neg.passed(),
        format!("8 Negative control: kernel coefficient c_1 scaled by 1.001 fails {} taylor cases, first {first}", neg.cases_failed),
    ));

    let mut failed = 0;
    for (ok, text) in &lines {
        println!("{} criterion {text}", if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
