//! Compute a condition geodesic between two random matrices and inspect the
//! log-convexity of the conformal factor along it.
//!
//! ```text
//! cargo run --release --example condition_geodesic
//! ```

use condgeo::convexity::verify_selfconvexity;
use condgeo::geodesic::{condition_length, minimize_path, DiscretePath, MinimizeOpts};
use condgeo::{random, Field};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> condgeo::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let a = random::gaussian(Field::Real, 2, 3, &mut rng);
    let b = random::gaussian(Field::Real, 2, 3, &mut rng);

    let straight = DiscretePath::new(
        (0..=64)
            .map(|i| a.axpy(i as f64 / 64.0, &(&b - &a)))
            .collect(),
    )?;
    println!(
        "straight segment: condition length {:.6}",
        condition_length(&straight)?
    );

    let result = minimize_path(&a, &b, 64, &MinimizeOpts::default())?;
    println!(
        "geodesic:         condition length {:.6}  ({} iterations, residual {:.2e})",
        result.length_kappa, result.iterations, result.grad_norm
    );

    let speeds = &result.condition_speed;
    let (lo, hi) = speeds.iter().fold((f64::MAX, f64::MIN), |acc, &s| {
        (acc.0.min(s), acc.1.max(s))
    });
    println!("condition speed range after reparametrization: [{lo:.6}, {hi:.6}]");

    let report = verify_selfconvexity(&result, 1e-4)?;
    println!(
        "log alpha trace: min second difference {:.3e} -> {:?}",
        report.min_second_difference, report.verdict
    );
    Ok(())
}
