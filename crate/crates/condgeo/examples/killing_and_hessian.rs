//! Symmetry toolbox tour: Killing fields of the unitary action, the trace
//! inequality for the smallest cluster, and the finite-difference check of
//! the Hessian-with-symmetries identity.
//!
//! ```text
//! cargo run --release --example killing_and_hessian
//! ```

use condgeo::matcore::{grad_alpha, DEFAULT_CLUSTER_TOL};
use condgeo::strata::{DiagonalPoint, MultiplicitySignature};
use condgeo::symmetry::{
    cor38_condition3, hessian_identity_terms, killing_field, lemma46_j, lemma46_scale,
    AlphaFunction, SkewPair,
};
use condgeo::{random, Field, MatrixRC};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> condgeo::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(5);

    // Killing fields are tangent to the level sets of alpha
    let a = random::gaussian(Field::Complex, 3, 4, &mut rng);
    let pair = SkewPair::new(
        &random::skew(Field::Complex, 3, &mut rng),
        &random::skew(Field::Complex, 4, &mut rng),
    )?;
    let k = killing_field(&pair, &a)?;
    let g = grad_alpha(&a, DEFAULT_CLUSTER_TOL)?.matrix;
    let ip: f64 = (0..3)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| {
            let x = k.entry(i, j);
            let y = g.entry(i, j);
            x.re * y.re + x.im * y.im
        })
        .sum();
    println!("<K, grad alpha> at a random point: {ip:.2e} (zero by invariance)");

    // trace inequality sampling
    let sig = MultiplicitySignature::new(vec![2, 1])?;
    let mut min_j = f64::INFINITY;
    for _ in 0..2000 {
        let vals = random::decreasing_positive(2, 0.3, &mut rng);
        let d = DiagonalPoint::new(vals, sig.clone(), 4)?;
        let b = random::skew(Field::Complex, 3, &mut rng);
        let c = random::skew(Field::Complex, 4, &mut rng);
        let j = lemma46_j(&d, &b, &c)?;
        min_j = min_j.min(j / lemma46_scale(&d, &b, &c));
    }
    println!("2000 draws of the trace inequality: min relative J = {min_j:.3e} (>= 0)");

    // the corollary's third condition at a simple-sigma_min point
    let p = MatrixRC::diagonal(Field::Real, 2, 2, &[2.0, 1.0])?;
    let pr = SkewPair::new(
        &random::skew(Field::Real, 2, &mut rng),
        &random::skew(Field::Real, 2, &mut rng),
    )?;
    println!(
        "corollary condition 3 at diag(2, 1): {:.6} (>= 0)",
        cor38_condition3(&p, &pr)?
    );

    // Hessian-with-symmetries identity, all terms by finite differences
    let point = MatrixRC::diagonal(Field::Real, 2, 2, &[3.0, 1.0])?;
    let b = MatrixRC::diagonal(Field::Real, 2, 2, &[0.4, -0.2])?;
    let terms = hessian_identity_terms(&AlphaFunction::default(), &point, &b, &pr, 1e-4)?;
    println!(
        "identity terms: Hess(w,w) = {:.6}, Hess(b,b) = {:.6}, killing = {:.6}, flow = {:.6}",
        terms.hess_ww, terms.hess_bb, terms.killing_term, terms.flow_term
    );
    println!(
        "identity residual: {:.2e} (scale {:.2})",
        terms.residual, terms.scale
    );
    Ok(())
}
