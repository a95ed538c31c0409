//! Runs the identity suite and prints its table.

use poisson_diffusion::validate::{run_suite, Level};

fn main() {
    let report = run_suite(Level::Fast, 0);
    print!("{}", report.table());
    println!(
        "{}",
        if report.passed() {
            "all checks passed"
        } else {
            "some checks failed"
        }
    );
}
