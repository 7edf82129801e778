//! Seeded sweep of the central claim: the log of the conformal factor is
//! convex along condition geodesics. Runs a batch of random endpoint pairs
//! and counts verdicts.
//!
//! ```text
//! cargo run --release --example log_convexity_sweep
//! ```

use condgeo::cli::{run_theorem1_suite, ReportConfig};
use condgeo::matcore::Field;

fn main() -> condgeo::Result<()> {
    for (n, m, field) in [
        (2usize, 2usize, Field::Real),
        (2, 3, Field::Complex),
        (3, 3, Field::Real),
    ] {
        let cfg = ReportConfig {
            seed: 0,
            trials: 10,
            n,
            m,
            field,
            nodes: 48,
            tol: 1e-7,
            convexity_tol: 1e-4,
        };
        let report = run_theorem1_suite(&cfg)?;
        println!(
            "{}x{} {:?}: {}/{} converged, {}/{} convex -> {}",
            n,
            m,
            field,
            report.converged,
            report.trials,
            report.convex,
            report.converged,
            if report.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
