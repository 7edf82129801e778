//! Geodesics on the solution variety `{(A, x) : Ax = 0}`: kernel recovery,
//! tangent projection, and log-convexity of the conformal factor along a
//! variety geodesic.
//!
//! ```text
//! cargo run --release --example solution_variety
//! ```

use condgeo::convexity::check_discrete_convexity;
use condgeo::geodesic::MinimizeOpts;
use condgeo::variety::{
    kernel_point, log_alpha_trace, minimize_variety_path, tangent_project_w,
    variety_condition_length,
};
use condgeo::{random, Field};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> condgeo::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let a = random::gaussian(Field::Real, 2, 3, &mut rng);
    let b = random::gaussian(Field::Real, 2, 3, &mut rng);
    let p = kernel_point(&a)?;
    let q = kernel_point(&b)?;
    println!(
        "kernel residuals: |A x| = {:.2e}, |B y| = {:.2e}",
        (p.a().data() * p.x()).norm(),
        (q.a().data() * q.x()).norm()
    );

    // tangent projection enforces the linearized membership constraint
    let da = random::gaussian(Field::Real, 2, 3, &mut rng);
    let dx = random::gaussian_unit_vector(Field::Real, 3, &mut rng);
    let (ta, tx) = tangent_project_w(&p, &da, &dx)?;
    println!(
        "projected tangent constraint residual: {:.2e}",
        (ta.data() * p.x() + p.a().data() * &tx).norm()
    );

    let result = minimize_variety_path(&p, &q, 48, &MinimizeOpts::default())?;
    println!(
        "variety geodesic: length {:.6}, {} iterations, residual {:.2e}",
        result.length_kappa, result.iterations, result.grad_norm
    );
    println!(
        "worst kernel residual along the path: {:.2e}",
        result.max_kernel_residual
    );
    println!(
        "length recomputed from the path: {:.6}",
        variety_condition_length(&result.path)?
    );

    let trace = log_alpha_trace(&result.path)?;
    let report = check_discrete_convexity(&trace, 1e-4)?;
    println!(
        "log alpha along the variety geodesic: min second difference {:.3e} -> {:?}",
        report.min_second_difference, report.verdict
    );
    Ok(())
}
