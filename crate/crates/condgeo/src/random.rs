//! Seeded random generators for matrices, unitaries and skew pairs.
//!
//! All experiment drivers draw through these helpers with an explicit
//! `ChaCha12` generator, so a fixed seed reproduces every run byte for byte.
//! Entries are i.i.d. standard normal; complex entries are
//! `(x + i y) / sqrt(2)` with `x, y` standard normal, so both fields have
//! unit-variance entries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matcore::{Field, MatrixRC};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn normal_scalar<R: Rng>(field: Field, rng: &mut R) -> Complex64 {
    match field {
        Field::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * INV_SQRT2, im * INV_SQRT2)
        }
    }
}

/// `n x m` matrix with i.i.d. standard normal entries.
pub fn gaussian<R: Rng>(field: Field, n: usize, m: usize, rng: &mut R) -> MatrixRC {
    let data = DMatrix::from_fn(n, m, |_, _| normal_scalar(field, rng));
    MatrixRC::from_data(field, data).expect("gaussian entries are finite")
}

/// Unit vector with i.i.d. normal entries before normalization.
pub fn gaussian_unit_vector<R: Rng>(field: Field, n: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| normal_scalar(field, rng));
    let nrm = v.norm();
    v / Complex64::new(nrm, 0.0)
}

/// Haar-like unitary (orthogonal when `field` is real): QR of a Gaussian
/// matrix with the R-diagonal phases absorbed into Q.
pub fn unitary<R: Rng>(field: Field, n: usize, rng: &mut R) -> MatrixRC {
    let g = gaussian(field, n, n, rng);
    let qr = g.data().clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase.conj();
        q.set_column(j, &col);
    }
    MatrixRC::from_data(field, q).expect("qr factor is well formed")
}

/// Square skew-hermitian (skew-symmetric when real) matrix, exactly
/// antisymmetrized: `S = (G - G^*) / 2`.
pub fn skew<R: Rng>(field: Field, n: usize, rng: &mut R) -> MatrixRC {
    let g = gaussian(field, n, n, rng);
    let s = (g.data() - g.data().adjoint()) * Complex64::new(0.5, 0.0);
    MatrixRC::from_data(field, s).expect("skew part is well formed")
}

/// Strictly decreasing positive values for diagonal-point constructions:
/// sorted `|N(0,1)| + gap`-separated entries.
pub fn decreasing_positive<R: Rng>(count: usize, gap: f64, rng: &mut R) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..count)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x.abs() + gap
        })
        .collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    // enforce pairwise separation by at least `gap`
    for i in 1..vals.len() {
        if vals[i - 1] - vals[i] < gap {
            vals[i] = vals[i - 1] - gap;
        }
    }
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for field in [Field::Real, Field::Complex] {
            let u = unitary(field, 4, &mut rng);
            let d = u.data().adjoint() * u.data() - DMatrix::<Complex64>::identity(4, 4);
            assert!(d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 1e-13);
        }
    }

    #[test]
    fn skew_is_exactly_skew() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for field in [Field::Real, Field::Complex] {
            let s = skew(field, 4, &mut rng);
            let d = s.data().adjoint() + s.data();
            assert!(d.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = gaussian(Field::Complex, 3, 4, &mut ChaCha12Rng::seed_from_u64(9));
        let b = gaussian(Field::Complex, 3, 4, &mut ChaCha12Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn decreasing_positive_is_separated() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let v = decreasing_positive(4, 0.3, &mut rng);
        for i in 1..v.len() {
            assert!(v[i - 1] - v[i] >= 0.3 - 1e-12);
            assert!(v[i] > 0.0);
        }
    }
}
