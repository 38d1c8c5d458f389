//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL` line followed by any failing cases.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use plurigreen_core::verify::{ext_real, run_suite, Suite, SuiteReport, DEFAULT_SEED};

/// Criteria run one at a time so wall-clock budgets are not shared.
static SERIAL: Mutex<()> = Mutex::new(());

fn suites(list: &[Suite]) -> Vec<SuiteReport> {
    list.iter()
        .map(|&s| run_suite(s, DEFAULT_SEED).unwrap_or_else(|e| panic!("suite {s} errored: {e}")))
        .collect()
}

fn report(n: u32, reports: &[SuiteReport], extra: &[(String, bool)]) {
    let pass = reports.iter().all(SuiteReport::passed) && extra.iter().all(|e| e.1);
    println!("criterion {n}: {}", if pass { "PASS" } else { "FAIL" });
    for r in reports {
        let total = r.cases.len();
        let failed: Vec<_> = r.failures().collect();
        println!("  suite {} seed {}: {}/{} cases pass", r.suite, r.seed, total - failed.len(), total);
        for c in failed {
            println!(
                "    FAIL {} {:?} expected {} observed {} tolerance {}",
                c.case,
                c.check,
                ext_real::to_string(c.expected),
                ext_real::to_string(c.observed),
                c.tolerance
            );
        }
    }
    for (what, ok) in extra {
        println!("  {what}: {}", if *ok { "ok" } else { "FAIL" });
    }
    assert!(pass, "criterion {n} failed");
}

fn criterion(n: u32, list: &[Suite]) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    report(n, &suites(list), &[]);
}

#[test]
fn criterion_01_ball_hyperplane() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let reports = suites(&[Suite::BallHyperplane]);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(300);
    report(
        1,
        &reports,
        &[(format!("runtime {:.1}s within {}s", elapsed.as_secs_f64(), budget.as_secs()), elapsed <= budget)],
    );
}

#[test]
fn criterion_02_ball_point_pole() {
    criterion(2, &[Suite::BallPoint]);
}

#[test]
fn criterion_03_polydisc_hyperplane() {
    criterion(3, &[Suite::Polydisc]);
}

#[test]
fn criterion_04_product_property() {
    criterion(4, &[Suite::Product, Suite::CounterexampleWeights]);
}

#[test]
fn criterion_05_riesz_below_lelong() {
    criterion(5, &[Suite::RieszVsLelong]);
}

#[test]
fn criterion_06_lelong_numbers() {
    criterion(6, &[Suite::LelongNumbers]);
}

#[test]
fn criterion_07_quadric_curve() {
    criterion(7, &[Suite::GeodesicCurve]);
}

#[test]
fn criterion_08_poisson_dirichlet() {
    criterion(8, &[Suite::Dirichlet]);
}

#[test]
fn criterion_09_boundary_limits() {
    criterion(9, &[Suite::Boundary]);
}

#[test]
fn criterion_10_divisor_quotient() {
    criterion(10, &[Suite::Quotient]);
}

#[test]
fn criterion_11_determinism_and_monotonicity() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let reports = suites(&[Suite::Determinism, Suite::Monotonicity]);
    // a second full run must reproduce the report exactly
    let again = run_suite(Suite::Monotonicity, DEFAULT_SEED).expect("suite runs");
    let same = again == reports[1];
    report(11, &reports, &[("repeated monotonicity report identical".into(), same)]);
}
