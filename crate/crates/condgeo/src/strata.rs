//! Singular-value multiplicity strata.
//!
//! A full-rank matrix with distinct singular values
//! `s_1 > ... > s_u > 0` of multiplicities `k_1, ..., k_u` lies in the
//! stratum `P_(k)`. This module classifies matrices into strata, evaluates
//! the closed-form real codimensions, and exposes the tangent structure of
//! `P_(k)` and of its diagonal slice `D_(k)` at diagonal representatives.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{singular_values, Field, MatrixRC, SINGULAR_REL_TOL};

/// Multiplicity pattern `(k_1, ..., k_u)` of the singular values, ordered by
/// descending singular value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicitySignature {
    parts: Vec<usize>,
}

impl MultiplicitySignature {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|&k| k == 0) {
            return Err(Error::InvalidInput(
                "signature parts must be positive".into(),
            ));
        }
        Ok(MultiplicitySignature { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of distinct singular values `u`.
    pub fn distinct(&self) -> usize {
        self.parts.len()
    }

    /// Total row count `n = sum k_i`.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Row offset of each cluster block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.parts.len());
        let mut acc = 0;
        for &k in &self.parts {
            off.push(acc);
            acc += k;
        }
        off
    }
}

/// All multiplicity signatures with `sum k_i = n` (ordered compositions).
pub fn signatures_of(n: usize) -> Vec<MultiplicitySignature> {
    fn rec(n: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiplicitySignature>) {
        if n == 0 {
            out.push(MultiplicitySignature {
                parts: prefix.clone(),
            });
            return;
        }
        for k in 1..=n {
            prefix.push(k);
            rec(n - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

/// Stratum summary: signature, field, real codimension in `K^{n x m}` and the
/// dimension `u` of the diagonal slice `D_(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumInfo {
    pub signature: MultiplicitySignature,
    pub field: Field,
    pub codim: usize,
    pub dim_dk: usize,
}

impl StratumInfo {
    pub fn new(signature: MultiplicitySignature, field: Field, n: usize) -> Result<Self> {
        let codim = codimension(&signature, field, n)?;
        let dim_dk = signature.distinct();
        Ok(StratumInfo {
            signature,
            field,
            codim,
            dim_dk,
        })
    }
}

/// Diagonal representative `diag(s_1 I_{k_1}, ..., s_u I_{k_u})` of a
/// stratum, padded with `cols - n` zero columns.
#[derive(Clone, Debug)]
pub struct DiagonalPoint {
    sigma_distinct: Vec<f64>,
    signature: MultiplicitySignature,
    cols: usize,
}

impl DiagonalPoint {
    pub fn new(
        sigma_distinct: Vec<f64>,
        signature: MultiplicitySignature,
        cols: usize,
    ) -> Result<Self> {
        if sigma_distinct.len() != signature.distinct() {
            return Err(Error::ShapeMismatch(
                "one singular value per cluster required".into(),
            ));
        }
        let strictly_decreasing = sigma_distinct.windows(2).all(|w| w[0] > w[1]);
        if !strictly_decreasing || *sigma_distinct.last().unwrap() <= 0.0 {
            return Err(Error::InvalidInput(
                "need strictly decreasing positive singular values".into(),
            ));
        }
        if signature.n() > cols {
            return Err(Error::ShapeMismatch("rows exceed cols".into()));
        }
        Ok(DiagonalPoint {
            sigma_distinct,
            signature,
            cols,
        })
    }

    pub fn sigma_distinct(&self) -> &[f64] {
        &self.sigma_distinct
    }

    pub fn signature(&self) -> &MultiplicitySignature {
        &self.signature
    }

    pub fn rows(&self) -> usize {
        self.signature.n()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The representative as an `n x m` matrix.
    pub fn as_matrix(&self, field: Field) -> MatrixRC {
        let n = self.rows();
        let mut diag = vec![0.0; n];
        for (i, (&off, &k)) in self
            .signature
            .offsets()
            .iter()
            .zip(self.signature.parts())
            .enumerate()
        {
            for p in 0..k {
                diag[off + p] = self.sigma_distinct[i];
            }
        }
        MatrixRC::diagonal(field, n, self.cols, &diag).expect("validated shape")
    }
}

/// Groups sorted singular values into maximal clusters whose consecutive
/// gaps are `<= cluster_tol * sigma_1` (single linkage) and returns the
/// multiplicities in descending-value order.
pub fn classify(a: &MatrixRC, cluster_tol: f64) -> Result<MultiplicitySignature> {
    let sv = singular_values(a);
    if *sv.last().unwrap() <= SINGULAR_REL_TOL * a.norm() {
        return Err(Error::SingularInput);
    }
    let gap = cluster_tol * sv[0];
    let mut parts = vec![1usize];
    for w in sv.windows(2) {
        if w[0] - w[1] <= gap {
            *parts.last_mut().unwrap() += 1;
        } else {
            parts.push(1);
        }
    }
    MultiplicitySignature::new(parts)
}

/// Real codimension of `P_(k)` in `K^{n x m}`:
/// `k_1^2 + ... + k_u^2 - u` over C, `(n + k_1^2 + ... + k_u^2)/2 - u` over R.
pub fn codimension(sig: &MultiplicitySignature, field: Field, n: usize) -> Result<usize> {
    if sig.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "signature sums to {}, expected {n}",
            sig.n()
        )));
    }
    let sq: usize = sig.parts().iter().map(|&k| k * k).sum();
    let u = sig.distinct();
    Ok(match field {
        Field::Complex => sq - u,
        // n + sum k_i^2 = sum k_i (k_i + 1) is always even
        Field::Real => (n + sq) / 2 - u,
    })
}

fn basis_elem(
    field: Field,
    n: usize,
    m: usize,
    entries: &[(usize, usize, Complex64)],
) -> MatrixRC {
    let mut data = DMatrix::<Complex64>::zeros(n, m);
    for &(i, j, z) in entries {
        data[(i, j)] = z;
    }
    MatrixRC::from_data(field, data).expect("basis element is well formed")
}

/// Real-orthonormal basis (for `Re <.,.>_F`) of the tangent space to
/// `P_(k)` at a diagonal representative.
///
/// Diagonal cluster blocks contribute `I_{k_i}/sqrt(k_i)` plus a
/// skew-hermitian (skew-symmetric over R) basis; all off-diagonal blocks and
/// the last `m - n` columns are free.
pub fn tangent_basis_pk(d: &DiagonalPoint, field: Field) -> Vec<MatrixRC> {
    let n = d.rows();
    let m = d.cols();
    let sig = d.signature();
    let offsets = sig.offsets();
    let one = Complex64::new(1.0, 0.0);
    let i_unit = Complex64::new(0.0, 1.0);
    let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut basis = Vec::new();

    for (ci, (&off, &k)) in offsets.iter().zip(sig.parts()).enumerate() {
        // scaled identity direction of the cluster
        let lam = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
        let entries: Vec<_> = (0..k).map(|p| (off + p, off + p, lam)).collect();
        basis.push(basis_elem(field, n, m, &entries));
        // skew block
        for p in 0..k {
            if field == Field::Complex {
                basis.push(basis_elem(field, n, m, &[(off + p, off + p, i_unit)]));
            }
            for q in (p + 1)..k {
                basis.push(basis_elem(
                    field,
                    n,
                    m,
                    &[
                        (off + p, off + q, inv_sqrt2),
                        (off + q, off + p, -inv_sqrt2),
                    ],
                ));
                if field == Field::Complex {
                    basis.push(basis_elem(
                        field,
                        n,
                        m,
                        &[
                            (off + p, off + q, i_unit * inv_sqrt2),
                            (off + q, off + p, i_unit * inv_sqrt2),
                        ],
                    ));
                }
            }
        }
        // free blocks against the other clusters
        for (cj, (&off_j, &kj)) in offsets.iter().zip(sig.parts()).enumerate() {
            if ci == cj {
                continue;
            }
            for p in 0..k {
                for q in 0..kj {
                    basis.push(basis_elem(field, n, m, &[(off + p, off_j + q, one)]));
                    if field == Field::Complex {
                        basis.push(basis_elem(field, n, m, &[(off + p, off_j + q, i_unit)]));
                    }
                }
            }
        }
    }
    // free trailing columns
    for i in 0..n {
        for j in n..m {
            basis.push(basis_elem(field, n, m, &[(i, j, one)]));
            if field == Field::Complex {
                basis.push(basis_elem(field, n, m, &[(i, j, i_unit)]));
            }
        }
    }
    basis
}

/// Orthogonal projection of `M` onto the tangent space of the diagonal slice
/// `D_(k)`: each cluster block becomes `(Re trace / k_i) I_{k_i}`, all other
/// entries vanish.
pub fn tangent_projection_dk(d: &DiagonalPoint, m: &MatrixRC) -> Result<MatrixRC> {
    let n = d.rows();
    if m.rows() != n || m.cols() != d.cols() {
        return Err(Error::ShapeMismatch(format!(
            "expected {}x{}, got {}x{}",
            n,
            d.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let mut data = DMatrix::<Complex64>::zeros(n, d.cols());
    for (&off, &k) in d.signature().offsets().iter().zip(d.signature().parts()) {
        let avg: f64 = (0..k).map(|p| m.entry(off + p, off + p).re).sum::<f64>() / k as f64;
        for p in 0..k {
            data[(off + p, off + p)] = Complex64::new(avg, 0.0);
        }
    }
    MatrixRC::from_data(m.field(), data)
}
