//! Dense matrix arithmetic over R and C, SVD, and the conformal factor
//! `alpha(A) = sigma_min(A)^-2` with its gradient at simple-sigma_min points.
//!
//! Points of the ambient space are `n x m` matrices with `n <= m`, full rank,
//! over either field. Both fields share one storage type (complex entries
//! plus a tag); real-tagged matrices have exactly zero imaginary parts, and
//! every operation routes real inputs through real arithmetic so that outputs
//! stay exactly real.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Relative threshold below which `sigma_min` counts as zero.
pub const SINGULAR_REL_TOL: f64 = 1e-14;

/// Default relative gap separating "simple sigma_min" from a genuine
/// multiplicity. Chosen to sit above double-precision SVD noise.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// SVD quality targets (relative): unitarity defect and reconstruction
/// residual.
pub const SVD_TOL: f64 = 1e-10;

/// Dense `n x m` matrix with `n <= m` over R or C.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRC {
    field: Field,
    data: DMatrix<Complex64>,
}

impl MatrixRC {
    /// Real matrix from row-major entries.
    pub fn new_real(n: usize, m: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                n * m,
                entries.len()
            )));
        }
        let data = DMatrix::from_fn(n, m, |i, j| Complex64::new(entries[i * m + j], 0.0));
        Self::from_data(Field::Real, data)
    }

    /// Complex matrix from row-major real and imaginary parts.
    pub fn new_complex(n: usize, m: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != n * m || im.len() != n * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}/{}",
                n * m,
                re.len(),
                im.len()
            )));
        }
        let data = DMatrix::from_fn(n, m, |i, j| Complex64::new(re[i * m + j], im[i * m + j]));
        Self::from_data(Field::Complex, data)
    }

    /// Wraps raw complex storage under a field tag, validating the
    /// `rows <= cols`, finiteness and (for `Real`) zero-imaginary invariants.
    pub fn from_data(field: Field, data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() == 0 || data.nrows() > data.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "need 1 <= rows <= cols, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "real-tagged matrix with nonzero imaginary part".into(),
            ));
        }
        Ok(MatrixRC { field, data })
    }

    /// Real matrix from nalgebra storage.
    pub fn from_real(data: DMatrix<f64>) -> Result<Self> {
        Self::from_data(Field::Real, data.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        MatrixRC {
            field,
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(field: Field, n: usize, m: usize) -> Self {
        assert!(n >= 1 && n <= m, "need 1 <= rows <= cols");
        MatrixRC {
            field,
            data: DMatrix::zeros(n, m),
        }
    }

    /// `n x m` matrix with the given values on the main diagonal.
    pub fn diagonal(field: Field, n: usize, m: usize, diag: &[f64]) -> Result<Self> {
        if diag.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "diagonal length {} does not match rows {n}",
                diag.len()
            )));
        }
        let mut a = Self::zeros(field, n, m);
        for (i, &d) in diag.iter().enumerate() {
            a.data[(i, i)] = Complex64::new(d, 0.0);
        }
        Ok(a)
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real part of the Frobenius inner product; no shape checks.
    pub(crate) fn inner_re(&self, other: &MatrixRC) -> f64 {
        debug_assert_eq!(self.data.shape(), other.data.shape());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub(crate) fn same_shape(&self, other: &MatrixRC) -> bool {
        self.data.shape() == other.data.shape()
    }

    /// `self + t * other`, preserving the field tag.
    pub fn axpy(&self, t: f64, other: &MatrixRC) -> MatrixRC {
        assert!(self.same_shape(other) && self.field == other.field);
        MatrixRC {
            field: self.field,
            data: &self.data + &other.data * Complex64::new(t, 0.0),
        }
    }

    pub fn scale(&self, t: f64) -> MatrixRC {
        MatrixRC {
            field: self.field,
            data: &self.data * Complex64::new(t, 0.0),
        }
    }

    /// `U self V^*` for square unitary factors of matching sizes.
    pub fn unitary_conjugate(&self, u: &MatrixRC, v: &MatrixRC) -> Result<MatrixRC> {
        if u.rows() != self.rows() || u.cols() != self.rows() {
            return Err(Error::ShapeMismatch("left factor must be n x n".into()));
        }
        if v.rows() != self.cols() || v.cols() != self.cols() {
            return Err(Error::ShapeMismatch("right factor must be m x m".into()));
        }
        let field = if self.field == Field::Real
            && u.field == Field::Real
            && v.field == Field::Real
        {
            Field::Real
        } else {
            Field::Complex
        };
        MatrixRC::from_data(field, &u.data * &self.data * v.data.adjoint())
    }
}

impl std::ops::Add for &MatrixRC {
    type Output = MatrixRC;
    fn add(self, rhs: &MatrixRC) -> MatrixRC {
        self.axpy(1.0, rhs)
    }
}

impl std::ops::Sub for &MatrixRC {
    type Output = MatrixRC;
    fn sub(self, rhs: &MatrixRC) -> MatrixRC {
        self.axpy(-1.0, rhs)
    }
}

/// Matrix exponential of a square matrix by scaling and squaring with a
/// Taylor kernel. Exact realness is preserved for real-tagged input.
pub fn expm(a: &MatrixRC) -> Result<MatrixRC> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch("exponential needs a square matrix".into()));
    }
    let n = a.rows();
    let norm = a.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.data() * Complex64::new(0.5f64.powi(squarings), 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=16 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    MatrixRC::from_data(a.field(), result)
}

/// Frobenius inner product `<M, N> = trace(N^* M) = sum m_ij conj(n_ij)`.
pub fn frobenius_inner(m: &MatrixRC, n: &MatrixRC) -> Result<Complex64> {
    if !m.same_shape(n) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            m.rows(),
            m.cols(),
            n.rows(),
            n.cols()
        )));
    }
    if m.field() != n.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(m.data
        .iter()
        .zip(n.data.iter())
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Full singular value decomposition `A = U diag(sigma) V^*` with square
/// unitary `U` (n x n) and `V` (m x m), singular values sorted descending.
#[derive(Clone, Debug)]
pub struct SVDFactorization {
    pub u: MatrixRC,
    pub sigma: Vec<f64>,
    pub v: MatrixRC,
}

impl SVDFactorization {
    pub fn sigma_min(&self) -> f64 {
        *self.sigma.last().expect("sigma nonempty")
    }

    /// Left singular vector for `sigma[k]`.
    pub fn u_col(&self, k: usize) -> DVector<Complex64> {
        self.u.data.column(k).into_owned()
    }

    /// Right singular vector for `sigma[k]`.
    pub fn v_col(&self, k: usize) -> DVector<Complex64> {
        self.v.data.column(k).into_owned()
    }

    /// `U diag(sigma) V^*`, for residual checks.
    pub fn reconstruct(&self) -> MatrixRC {
        let n = self.u.rows();
        let m = self.v.rows();
        let mut s = DMatrix::<Complex64>::zeros(n, m);
        for (i, &sv) in self.sigma.iter().enumerate() {
            s[(i, i)] = Complex64::new(sv, 0.0);
        }
        let data = self.u.data() * s * self.v.data().adjoint();
        MatrixRC::from_data(self.u.field(), data).expect("reconstruction shape")
    }
}

/// Completes `k` orthonormal columns to a full orthonormal basis of `K^m`.
///
/// Greedy pick of the coordinate vector with the largest residual after
/// orthogonalization, re-orthogonalized once for stability.
fn complete_unitary(cols: &mut Vec<DVector<Complex64>>, m: usize) {
    while cols.len() < m {
        let mut best: Option<(f64, DVector<Complex64>)> = None;
        for j in 0..m {
            let mut w = DVector::<Complex64>::zeros(m);
            w[j] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in cols.iter() {
                    let t = c.dotc(&w);
                    w -= c * t;
                }
            }
            let nrm = w.norm();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, w));
            }
        }
        let (nrm, w) = best.expect("m > 0");
        cols.push(w / Complex64::new(nrm, 0.0));
    }
}

fn svd_complex(a: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    finish_svd(u, sigma, v_t, a.ncols())
}

fn svd_real(a: &DMatrix<f64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested").map(|x| Complex64::new(x, 0.0));
    let v_t = svd
        .v_t
        .expect("v_t requested")
        .map(|x| Complex64::new(x, 0.0));
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    finish_svd(u, sigma, v_t, a.ncols())
}

fn finish_svd(
    u: DMatrix<Complex64>,
    sigma: Vec<f64>,
    v_t: DMatrix<Complex64>,
    m: usize,
) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let n = sigma.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let mut u_sorted = DMatrix::<Complex64>::zeros(u.nrows(), n);
    let mut v_cols: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    for (k, &i) in order.iter().enumerate() {
        u_sorted.set_column(k, &u.column(i));
        v_cols.push(v_t.row(i).adjoint());
    }
    complete_unitary(&mut v_cols, m);
    let v = DMatrix::from_columns(&v_cols);
    (u_sorted, sorted, v)
}

/// Singular value decomposition with invariants
/// `||U^*U - I||_F, ||V^*V - I||_F <= 1e-10` and relative reconstruction
/// residual `<= 1e-10`.
pub fn svd(a: &MatrixRC) -> Result<SVDFactorization> {
    let (u, sigma, v) = match a.field() {
        Field::Real => svd_real(&a.data().map(|z| z.re)),
        Field::Complex => svd_complex(a.data()),
    };
    Ok(SVDFactorization {
        u: MatrixRC::from_data(a.field(), u)?,
        sigma,
        v: MatrixRC::from_data(a.field(), v)?,
    })
}

/// Singular values only (descending), cheaper than a full [`svd`].
pub fn singular_values(a: &MatrixRC) -> Vec<f64> {
    let mut sv: Vec<f64> = match a.field() {
        Field::Real => a
            .data()
            .map(|z| z.re)
            .singular_values()
            .iter()
            .copied()
            .collect(),
        Field::Complex => a.data().clone().singular_values().iter().copied().collect(),
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Smallest singular value: the Frobenius distance from `A` to the
/// rank-deficient set.
pub fn sigma_min(a: &MatrixRC) -> f64 {
    *singular_values(a).last().expect("at least one row")
}

fn check_nonsingular(smin: f64, norm: f64) -> Result<()> {
    if smin <= SINGULAR_REL_TOL * norm || smin == 0.0 {
        return Err(Error::SingularInput);
    }
    Ok(())
}

/// The conformal factor `alpha(A) = sigma_min(A)^-2`.
pub fn alpha(a: &MatrixRC) -> Result<f64> {
    let smin = sigma_min(a);
    check_nonsingular(smin, a.norm())?;
    Ok(smin.powi(-2))
}

/// Gradient of `alpha` at a point where `sigma_min` is simple.
#[derive(Clone, Debug)]
pub struct GradientSelection {
    /// `-2 sigma_min^-3 u_n v_n^*`, an `n x m` matrix of the input's field.
    pub matrix: MatrixRC,
    /// Whether the producing SVD passed the simplicity gap test.
    pub simple: bool,
}

/// Gap test: `sigma_{n-1} - sigma_n > cluster_tol * sigma_1`. A 1-row matrix
/// always passes.
pub(crate) fn sigma_min_is_simple(sigma: &[f64], cluster_tol: f64) -> bool {
    let n = sigma.len();
    n == 1 || sigma[n - 2] - sigma[n - 1] > cluster_tol * sigma[0]
}

/// Gradient of `alpha` from a precomputed factorization.
///
/// The sign and phase ambiguity of the singular pair `(u_n, v_n)` cancels in
/// the product `u_n v_n^*`: replacing `(u, v)` by `(e^{i t} u, e^{i t} v)`
/// leaves `u v^*` unchanged, so no sign convention is needed.
pub fn grad_alpha_from_svd(f: &SVDFactorization, cluster_tol: f64) -> Result<GradientSelection> {
    let n = f.sigma.len();
    let smin = f.sigma_min();
    check_nonsingular(smin, f.sigma.iter().map(|s| s * s).sum::<f64>().sqrt())?;
    if !sigma_min_is_simple(&f.sigma, cluster_tol) {
        return Err(Error::MultipleSigma);
    }
    let u_n = f.u_col(n - 1);
    let v_n = f.v_col(n - 1);
    let scale = Complex64::new(-2.0 * smin.powi(-3), 0.0);
    let data = (&u_n * v_n.adjoint()) * scale;
    Ok(GradientSelection {
        matrix: MatrixRC::from_data(f.u.field(), data)?,
        simple: true,
    })
}

/// Gradient of `alpha(A) = sigma_min(A)^-2` where `sigma_min` is simple.
///
/// Errors with `MultipleSigma` when the relative gap
/// `sigma_{n-1} - sigma_n <= cluster_tol * sigma_1`, signalling proximity to
/// a deeper multiplicity stratum.
pub fn grad_alpha(a: &MatrixRC, cluster_tol: f64) -> Result<GradientSelection> {
    grad_alpha_from_svd(&svd(a)?, cluster_tol)
}
