//! The acceptance battery in fast mode.

use hamiltonia::suite::{run_suite, SuiteConfig, SuiteMode};

fn main() {
    let report = run_suite(&SuiteConfig::new(SuiteMode::Fast, 1));
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    println!("{} passed, {} failed", report.passed, report.failed);
}
