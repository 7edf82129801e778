//! Classify matrices into singular-value multiplicity strata and tabulate
//! the real codimensions of every stratum for small sizes.
//!
//! ```text
//! cargo run --release --example classify_strata
//! ```

use condgeo::strata::{classify, codimension, signatures_of, tangent_basis_pk, DiagonalPoint};
use condgeo::{Field, MatrixRC};

fn main() -> condgeo::Result<()> {
    let samples = [
        ("diag(3, 2, 1)", vec![3.0, 2.0, 1.0]),
        ("diag(2, 2, 1)", vec![2.0, 2.0, 1.0]),
        ("diag(1, 1 + 1e-12, 3)", vec![1.0, 1.0 + 1e-12, 3.0]),
    ];
    println!("classification at cluster tolerance 1e-8:");
    for (label, diag) in &samples {
        let a = MatrixRC::diagonal(Field::Complex, 3, 3, diag)?;
        let sig = classify(&a, 1e-8)?;
        println!(
            "  {label:24} -> signature {:?}, codim_C {}",
            sig.parts(),
            codimension(&sig, Field::Complex, 3)?
        );
    }

    println!("\ncodimension table (n = 4, both fields):");
    println!("  {:12} {:>8} {:>8} {:>14}", "signature", "codim_R", "codim_C", "basis check");
    for sig in signatures_of(4) {
        let cr = codimension(&sig, Field::Real, 4)?;
        let cc = codimension(&sig, Field::Complex, 4)?;
        // tangent basis cardinality must complement the codimension exactly
        let vals: Vec<f64> = (0..sig.distinct()).map(|i| 4.0 - i as f64).collect();
        let d = DiagonalPoint::new(vals, sig.clone(), 4)?;
        let count = tangent_basis_pk(&d, Field::Complex).len();
        let ok = count + cc == 2 * 4 * 4;
        println!(
            "  {:12} {:>8} {:>8} {:>14}",
            format!("{:?}", sig.parts()),
            cr,
            cc,
            if ok { "dim + codim ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
