//! The ten acceptance criteria at full scale, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use realword_core::selftest::{run_suite, Scale, SUITES};

const SEED: u64 = 7;

/// Wall-clock limits, where one applies.
fn limit(id: usize) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(10)),
        3 => Some(Duration::from_secs(60)),
        6 => Some(Duration::from_secs(30)),
        8 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=SUITES.len() {
        let start = Instant::now();
        let report = run_suite(id, SEED, Scale::Full);
        let took = start.elapsed();
        let in_time = limit(id).is_none_or(|l| took < l);
        let ok = report.passed() && in_time;
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {id:>2} {:<26} {} cases, {} failures, {:.2}s: {}",
            report.name,
            report.cases,
            report.failures,
            took.as_secs_f64(),
            report.detail
        );
        if let Some(w) = &report.witness {
            println!("    first failure: {w}");
        }
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("test result: ok. {} criteria passed", SUITES.len());
        ExitCode::SUCCESS
    } else {
        println!("test result: FAILED. criteria {failed:?}");
        ExitCode::FAILURE
    }
}
