//! Shoot geodesics from an initial point and direction, check the conserved
//! condition speed, and cross-validate against the variational solver.
//!
//! ```text
//! cargo run --release --example geodesic_shooting
//! ```

use condgeo::geodesic::{condition_speeds, minimize_path, shoot_geodesic, MinimizeOpts};
use condgeo::{random, Field, MatrixRC};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> condgeo::Result<()> {
    // 1x1 closed form: shooting from 1 with unit speed gives a(t) = e^t
    let one = MatrixRC::new_real(1, 1, &[1.0])?;
    let dir = MatrixRC::new_real(1, 1, &[1.0])?;
    let path = shoot_geodesic(&one, &dir, 1.0, 200)?;
    let end = path.nodes().last().unwrap().entry(0, 0).re;
    println!(
        "scalar shot: a(1) = {end:.10}  (closed form e = {:.10})",
        std::f64::consts::E
    );

    // random 2x2: unit condition speed is conserved along the flight
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let a = random::gaussian(Field::Real, 2, 2, &mut rng).scale(2.0);
    let v = random::gaussian(Field::Real, 2, 2, &mut rng);
    let horizon = 0.5;
    let shot = shoot_geodesic(&a, &v, horizon, 400)?;
    let speeds = condition_speeds(&shot)?;
    let worst = speeds
        .iter()
        .map(|s| (s / horizon - 1.0).abs())
        .fold(0.0f64, f64::max);
    println!("unit-speed defect along the flight: {worst:.2e}");

    // shooting endpoint re-targeted by the variational solver
    let endpoint = shot.nodes().last().unwrap().clone();
    let back = minimize_path(&a, &endpoint, 64, &MinimizeOpts::default())?;
    println!(
        "shot length {horizon:.4} vs variational length {:.6}",
        back.length_kappa
    );
    Ok(())
}
