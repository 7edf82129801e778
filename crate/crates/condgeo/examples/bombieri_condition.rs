//! Degree-weighted condition number of polynomial systems vanishing at the
//! origin: only the weighted linear part matters.
//!
//! ```text
//! cargo run --release --example bombieri_condition
//! ```

use condgeo::matcore::sigma_min;
use condgeo::symmetry::{bombieri_inner, bombieri_mu, monomials, PolySystemAtZero};
use condgeo::{random, Field};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> condgeo::Result<()> {
    let mut rng = ChaCha12Rng::seed_from_u64(4);

    // a linear system: mu reduces to 1 / sigma_min of the coefficient matrix
    let a = random::gaussian(Field::Complex, 3, 3, &mut rng);
    let rows: Vec<Vec<Complex64>> = (0..3)
        .map(|i| (0..3).map(|j| a.entry(i, j)).collect())
        .collect();
    let linear = PolySystemAtZero::new(vec![1, 1, 1], Field::Complex, rows)?;
    println!(
        "linear system: mu = {:.6}, 1/sigma_min = {:.6}",
        bombieri_mu(&linear)?,
        1.0 / sigma_min(&a)
    );

    // a cubic system: higher-order coefficients leave mu unchanged
    let mons = monomials(2, 1, 3);
    println!(
        "graded-lex monomials in 2 variables up to degree 3: {:?}",
        mons
    );
    let build = |cubic: f64| -> condgeo::Result<PolySystemAtZero> {
        let rows: Vec<Vec<Complex64>> = (0..2)
            .map(|i| {
                mons.iter()
                    .enumerate()
                    .map(|(k, e)| {
                        if k < 2 {
                            // linear part diag(2, 1/2)
                            if k == i {
                                Complex64::new(if i == 0 { 2.0 } else { 0.5 }, 0.0)
                            } else {
                                Complex64::ZERO
                            }
                        } else if e.iter().sum::<u32>() == 3 {
                            Complex64::new(cubic, 0.0)
                        } else {
                            Complex64::ZERO
                        }
                    })
                    .collect()
            })
            .collect();
        PolySystemAtZero::new(vec![3, 3], Field::Complex, rows)
    };
    let flat = build(0.0)?;
    let bumpy = build(7.5)?;
    println!(
        "cubic system: mu without cubics = {:.6}, with cubics = {:.6}",
        bombieri_mu(&flat)?,
        bombieri_mu(&bumpy)?
    );
    println!(
        "weighted norms differ, though: {:.4} vs {:.4}",
        bombieri_inner(&flat, &flat)?.re.sqrt(),
        bombieri_inner(&bumpy, &bumpy)?.re.sqrt()
    );
    Ok(())
}
