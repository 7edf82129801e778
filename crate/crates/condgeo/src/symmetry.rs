//! Symmetries of the conformal factor under the unitary action.
//!
//! The group `U_n x U_m` acts on matrices by `A -> U A V^*` and leaves every
//! singular value invariant. A skew pair `(B1, B2)` generates the Killing
//! field `K(A) = B1 A + A B2^*`. This module evaluates those fields, the
//! trace inequality controlling `J >= 0`, the third condition of the
//! symmetry corollary, a finite-difference verifier for the
//! Hessian-with-symmetries identity
//!
//! ```text
//! Hess f(w, w) = Hess f(b, b) + 1/2 <grad ||K||^2, grad f> + d/dt <B, K>(flow_t)
//! ```
//!
//! with `w = b + k`, and the degree-weighted condition number of polynomial
//! systems vanishing at the origin.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{
    self, grad_alpha, sigma_min, Field, MatrixRC, DEFAULT_CLUSTER_TOL, SINGULAR_REL_TOL,
};
use crate::strata::DiagonalPoint;

/// Generator of the unitary action: `B1` is `n x n` skew-hermitian, `B2` is
/// `m x m` skew-hermitian (skew-symmetric over R). Inputs are exactly
/// antisymmetrized on construction.
#[derive(Clone, Debug)]
pub struct SkewPair {
    b1: MatrixRC,
    b2: MatrixRC,
}

impl SkewPair {
    pub fn new(b1: &MatrixRC, b2: &MatrixRC) -> Result<Self> {
        if b1.rows() != b1.cols() || b2.rows() != b2.cols() {
            return Err(Error::ShapeMismatch("skew pair must be square".into()));
        }
        if b1.field() != b2.field() {
            return Err(Error::FieldMismatch);
        }
        let anti = |x: &MatrixRC| {
            let s = (x.data() - x.data().adjoint()) * Complex64::new(0.5, 0.0);
            MatrixRC::from_data(x.field(), s)
        };
        Ok(SkewPair {
            b1: anti(b1)?,
            b2: anti(b2)?,
        })
    }

    pub fn zero(field: Field, n: usize, m: usize) -> Self {
        SkewPair {
            b1: MatrixRC::zeros(field, n, n),
            b2: MatrixRC::zeros(field, m, m),
        }
    }

    pub fn b1(&self) -> &MatrixRC {
        &self.b1
    }

    pub fn b2(&self) -> &MatrixRC {
        &self.b2
    }
}

/// Killing field of the pair at `A`: `K(A) = B1 A + A B2^*`.
pub fn killing_field(pair: &SkewPair, a: &MatrixRC) -> Result<MatrixRC> {
    if pair.b1.rows() != a.rows() || pair.b2.rows() != a.cols() {
        return Err(Error::ShapeMismatch(format!(
            "pair sized {}x{} against a {}x{} point",
            pair.b1.rows(),
            pair.b2.rows(),
            a.rows(),
            a.cols()
        )));
    }
    let data = pair.b1.data() * a.data() + a.data() * pair.b2.data().adjoint();
    let field = if a.field() == Field::Real && pair.b1.field() == Field::Real {
        Field::Real
    } else {
        Field::Complex
    };
    MatrixRC::from_data(field, data)
}

/// Gradient of `||K||^2` at `A`, where `K` is the Killing field of `pair`:
/// `grad ||K||^2 = 2 (B1 B1^* A + A B2 B2^* - 2 B1 A B2^*)`.
pub fn grad_killing_norm_sq(pair: &SkewPair, a: &MatrixRC) -> Result<MatrixRC> {
    let b1 = pair.b1.data();
    let b2 = pair.b2.data();
    let data = (b1 * b1.adjoint() * a.data() + a.data() * b2 * b2.adjoint()
        - b1 * a.data() * b2.adjoint() * Complex64::new(2.0, 0.0))
        * Complex64::new(2.0, 0.0);
    let field = if a.field() == Field::Real && pair.b1.field() == Field::Real {
        Field::Real
    } else {
        Field::Complex
    };
    MatrixRC::from_data(field, data)
}

fn require_skew(x: &MatrixRC) -> Result<()> {
    if x.rows() != x.cols() {
        return Err(Error::ShapeMismatch("skew matrix must be square".into()));
    }
    let defect = (x.data() + x.data().adjoint()).norm();
    if defect > 1e-12 * x.norm().max(1.0) {
        return Err(Error::NotSkew);
    }
    Ok(())
}

/// The trace expression of the smallest-cluster inequality: with
/// `S = diag(s_1 I_{k_1}, ..., s_u I_{k_u})` (as `n x m`) and `S'` its
/// transpose with the last cluster zeroed,
///
/// `J = Re( tr(B B^* S S') + tr(S' S C C^*) - 2 tr(B S C^* S') )`.
///
/// `J >= 0` for all skew `B` (n x n) and `C` (m x m).
pub fn lemma46_j(sigma: &DiagonalPoint, b: &MatrixRC, c: &MatrixRC) -> Result<f64> {
    require_skew(b)?;
    require_skew(c)?;
    let n = sigma.rows();
    let m = sigma.cols();
    if b.rows() != n || c.rows() != m {
        return Err(Error::ShapeMismatch("skew sizes must be n and m".into()));
    }
    let s = sigma.as_matrix(Field::Complex);
    // transpose with the smallest cluster zeroed
    let mut sp = DMatrix::<Complex64>::zeros(m, n);
    let parts = sigma.signature().parts();
    let offsets = sigma.signature().offsets();
    for i in 0..sigma.signature().distinct() - 1 {
        for p in 0..parts[i] {
            let idx = offsets[i] + p;
            sp[(idx, idx)] = Complex64::new(sigma.sigma_distinct()[i], 0.0);
        }
    }
    let bd = b.data();
    let cd = c.data();
    let t1 = (bd * bd.adjoint() * s.data() * &sp).trace();
    let t2 = (&sp * s.data() * cd * cd.adjoint()).trace();
    let t3 = (bd * s.data() * cd.adjoint() * &sp).trace();
    Ok((t1 + t2 - t3 * Complex64::new(2.0, 0.0)).re)
}

/// Scale reference for [`lemma46_j`] verdicts: quadratic in the skew pair and
/// in the singular values.
pub fn lemma46_scale(sigma: &DiagonalPoint, b: &MatrixRC, c: &MatrixRC) -> f64 {
    let s1 = sigma.sigma_distinct()[0];
    (b.norm().powi(2) + c.norm().powi(2)) * s1 * s1
}

/// The third condition of the symmetry corollary at a simple-`sigma_min`
/// point:
///
/// `alpha(A) D(||K||^2)(A)(grad alpha(A)) + ||K(A)||^2 ||grad alpha(A)||^2`,
///
/// which must be nonnegative up to round-off.
pub fn cor38_condition3(a: &MatrixRC, pair: &SkewPair) -> Result<f64> {
    cor38_condition3_with(a, pair, DEFAULT_CLUSTER_TOL)
}

pub fn cor38_condition3_with(a: &MatrixRC, pair: &SkewPair, cluster_tol: f64) -> Result<f64> {
    let al = matcore::alpha(a)?;
    let g = grad_alpha(a, cluster_tol)?.matrix;
    let k = killing_field(pair, a)?;
    let gk2 = grad_killing_norm_sq(pair, a)?;
    Ok(al * gk2.inner_re(&g) + k.norm().powi(2) * g.norm().powi(2))
}

/// Scale reference for [`cor38_condition3`]: the sum of the magnitudes of its
/// two terms.
pub fn cor38_scale(a: &MatrixRC, pair: &SkewPair) -> Result<f64> {
    let al = matcore::alpha(a)?;
    let g = grad_alpha(a, DEFAULT_CLUSTER_TOL)?.matrix;
    let k = killing_field(pair, a)?;
    let gk2 = grad_killing_norm_sq(pair, a)?;
    Ok(al * gk2.norm() * g.norm() + k.norm().powi(2) * g.norm().powi(2))
}

/// A scalar function on matrices, invariant under the unitary action, with an
/// analytic gradient. The Hessian identity verifier drives its gradient flow.
pub trait InvariantScalar {
    fn value(&self, a: &MatrixRC) -> Result<f64>;
    fn grad(&self, a: &MatrixRC) -> Result<MatrixRC>;
}

/// The conformal factor as an invariant test function.
pub struct AlphaFunction {
    pub cluster_tol: f64,
}

impl Default for AlphaFunction {
    fn default() -> Self {
        AlphaFunction {
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

impl InvariantScalar for AlphaFunction {
    fn value(&self, a: &MatrixRC) -> Result<f64> {
        matcore::alpha(a)
    }

    fn grad(&self, a: &MatrixRC) -> Result<MatrixRC> {
        Ok(grad_alpha(a, self.cluster_tol)?.matrix)
    }
}

/// All terms of the Hessian-with-symmetries identity at `p`, evaluated by
/// finite differences in the flat ambient metric.
#[derive(Clone, Debug)]
pub struct HessianIdentityTerms {
    pub hess_ww: f64,
    pub hess_bb: f64,
    /// `1/2 <grad ||K||^2(p), grad f(p)>`.
    pub killing_term: f64,
    /// `d/dt|_0 <B, K>(flow_t(p))` by symmetric differences of the flow.
    pub flow_term: f64,
    pub residual: f64,
    /// `1 + sum of term magnitudes`; residual contracts are relative to this.
    pub scale: f64,
}

fn flow<F: InvariantScalar>(f: &F, from: &MatrixRC, t: f64, substeps: usize) -> Result<MatrixRC> {
    let mut a = from.clone();
    let h = t / substeps as f64;
    let grad = |x: &MatrixRC| -> Result<MatrixRC> {
        f.grad(x).map_err(|e| match e {
            Error::MultipleSigma => Error::FlowEscape,
            other => other,
        })
    };
    for _ in 0..substeps {
        let k1 = grad(&a)?;
        let k2 = grad(&a.axpy(0.5 * h, &k1))?;
        let k3 = grad(&a.axpy(0.5 * h, &k2))?;
        let k4 = grad(&a.axpy(h, &k3))?;
        a = a
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
    }
    Ok(a)
}

/// Central-difference Hessian quadratic form `Hess f(p)(v, v)` from the
/// analytic gradient.
fn hessian_quadratic<F: InvariantScalar>(
    f: &F,
    p: &MatrixRC,
    v: &MatrixRC,
    fd_step: f64,
) -> Result<f64> {
    let norm = v.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let unit = v.scale(1.0 / norm);
    let gp = f.grad(&p.axpy(fd_step, &unit))?;
    let gm = f.grad(&p.axpy(-fd_step, &unit))?;
    let deriv = (&gp - &gm).scale(0.5 / fd_step);
    Ok(norm * norm * deriv.inner_re(&unit))
}

/// Evaluates every term of the identity; see [`hessian_symmetry_residual`].
pub fn hessian_identity_terms<F: InvariantScalar>(
    f: &F,
    p: &MatrixRC,
    b: &MatrixRC,
    pair: &SkewPair,
    fd_step: f64,
) -> Result<HessianIdentityTerms> {
    if !b.same_shape(p) {
        return Err(Error::ShapeMismatch("direction shape disagrees".into()));
    }
    let k = killing_field(pair, p)?;
    let w = b + &k;
    let hess_ww = hessian_quadratic(f, p, &w, fd_step)?;
    let hess_bb = hessian_quadratic(f, p, b, fd_step)?;
    let killing_term = 0.5 * grad_killing_norm_sq(pair, p)?.inner_re(&f.grad(p)?);

    let flow_term = if b.norm() == 0.0 || k.norm() == 0.0 {
        0.0
    } else {
        let tau = fd_step;
        let eps = fd_step;
        let g_at = |t: f64| -> Result<f64> {
            let center = flow(f, p, t, 8)?;
            let plus = flow(f, &p.axpy(eps, b), t, 8)?;
            let minus = flow(f, &p.axpy(-eps, b), t, 8)?;
            let b_field = (&plus - &minus).scale(0.5 / eps);
            let k_field = killing_field(pair, &center)?;
            Ok(b_field.inner_re(&k_field))
        };
        (g_at(tau)? - g_at(-tau)?) / (2.0 * tau)
    };

    let residual = (hess_ww - hess_bb - killing_term - flow_term).abs();
    let scale = 1.0 + hess_ww.abs() + hess_bb.abs() + killing_term.abs() + flow_term.abs();
    Ok(HessianIdentityTerms {
        hess_ww,
        hess_bb,
        killing_term,
        flow_term,
        residual,
        scale,
    })
}

/// Residual of the Hessian-with-symmetries identity
/// `|Hess(w,w) - Hess(b,b) - 1/2 <grad ||K||^2, grad f> - d/dt <B,K>|`
/// with `w = b + K(p)`, all derivatives by central finite differences of the
/// analytic gradient and flows of `grad f`.
pub fn hessian_symmetry_residual<F: InvariantScalar>(
    f: &F,
    p: &MatrixRC,
    b: &MatrixRC,
    pair: &SkewPair,
    fd_step: f64,
) -> Result<f64> {
    Ok(hessian_identity_terms(f, p, b, pair, fd_step)?.residual)
}

/// Monomial exponent vectors of total degree `deg_min..=deg_max` in `n_vars`
/// variables, graded lexicographic (degree ascending, then lexicographic
/// with `x_1 > x_2 > ... > x_n`).
pub fn monomials(n_vars: usize, deg_min: u32, deg_max: u32) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, vars_left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(remaining - e, vars_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in deg_min..=deg_max {
        rec(d, n_vars, &mut Vec::new(), &mut out);
    }
    out
}

/// Multinomial weight `binom(d; a) = d! / (a_1! ... a_n! (d - |a|)!)`.
pub fn multinomial_weight(d: u32, exps: &[u32]) -> f64 {
    let mut remaining = d;
    let mut acc = 1.0f64;
    let choose = |n: u32, k: u32| -> f64 {
        let mut c = 1.0f64;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c
    };
    for &e in exps {
        acc *= choose(remaining, e);
        remaining -= e;
    }
    acc
}

/// System `(f_1, ..., f_n)` of polynomials in `n` variables with
/// `f_i(0) = 0`, stored densely over the graded-lexicographic monomial basis
/// of degrees `1..=d_i`.
#[derive(Clone, Debug)]
pub struct PolySystemAtZero {
    degrees: Vec<u32>,
    field: Field,
    /// One coefficient row per equation, indexed by
    /// `monomials(n, 1, degrees[i])`.
    coeffs: Vec<Vec<Complex64>>,
}

impl PolySystemAtZero {
    pub fn new(degrees: Vec<u32>, field: Field, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = degrees.len();
        if n == 0 || coeffs.len() != n {
            return Err(Error::ShapeMismatch(
                "one coefficient row per equation".into(),
            ));
        }
        if degrees.iter().any(|&d| d == 0) {
            return Err(Error::InvalidInput("degrees must be positive".into()));
        }
        for (i, row) in coeffs.iter().enumerate() {
            let want = monomials(n, 1, degrees[i]).len();
            if row.len() != want {
                return Err(Error::ShapeMismatch(format!(
                    "equation {i} expects {want} coefficients, got {}",
                    row.len()
                )));
            }
            if field == Field::Real && row.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidInput("real-tagged complex coefficients".into()));
            }
        }
        Ok(PolySystemAtZero {
            degrees,
            field,
            coeffs,
        })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// The linear coefficient matrix `Df(0)`: degree-one monomials come first
    /// in the graded order, as `x_1 > x_2 > ... > x_n`.
    pub fn linear_part(&self) -> MatrixRC {
        let n = self.n();
        let data = DMatrix::from_fn(n, n, |i, j| self.coeffs[i][j]);
        MatrixRC::from_data(self.field, data).expect("square linear part")
    }
}

/// Degree-weighted (Bombieri) inner product of two systems with identical
/// degree vectors: `sum_i sum_a f_ia conj(g_ia) / binom(d_i; a)`.
pub fn bombieri_inner(f: &PolySystemAtZero, g: &PolySystemAtZero) -> Result<Complex64> {
    if f.degrees != g.degrees {
        return Err(Error::ShapeMismatch("degree vectors disagree".into()));
    }
    let n = f.n();
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        let mons = monomials(n, 1, f.degrees[i]);
        for (k, exps) in mons.iter().enumerate() {
            let w = multinomial_weight(f.degrees[i], exps);
            acc += f.coeffs[i][k] * g.coeffs[i][k].conj() / Complex64::new(w, 0.0);
        }
    }
    Ok(acc)
}

/// The unscaled normalized condition number at the origin:
/// `mu(f, 0) = sigma_min(diag(d_i^-1/2) Df(0))^-1`. Only the linear part of
/// the system enters.
pub fn bombieri_mu(sys: &PolySystemAtZero) -> Result<f64> {
    let lin = sys.linear_part();
    let weights: Vec<Complex64> = sys
        .degrees()
        .iter()
        .map(|&d| Complex64::new(1.0 / (d as f64).sqrt(), 0.0))
        .collect();
    let mut data = lin.data().clone();
    for (i, w) in weights.iter().enumerate() {
        for j in 0..data.ncols() {
            data[(i, j)] *= w;
        }
    }
    let weighted = MatrixRC::from_data(sys.field(), data)?;
    let smin = sigma_min(&weighted);
    if smin <= SINGULAR_REL_TOL * weighted.norm() {
        return Err(Error::DegenerateLinearPart);
    }
    Ok(1.0 / smin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::singular_values;
    use crate::random;
    use crate::strata::MultiplicitySignature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sig(parts: &[usize]) -> MultiplicitySignature {
        MultiplicitySignature::new(parts.to_vec()).unwrap()
    }

    fn pair(field: Field, n: usize, m: usize, rng: &mut ChaCha12Rng) -> SkewPair {
        SkewPair::new(&random::skew(field, n, rng), &random::skew(field, m, rng)).unwrap()
    }

    #[test]
    fn killing_field_basics() {
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        let a = random::gaussian(Field::Complex, 3, 4, &mut rng);
        let zero = SkewPair::zero(Field::Complex, 3, 4);
        assert_eq!(killing_field(&zero, &a).unwrap().norm(), 0.0);

        let b1 = random::skew(Field::Complex, 3, &mut rng);
        let p = SkewPair::new(&b1, &MatrixRC::zeros(Field::Complex, 3, 3)).unwrap();
        let id = MatrixRC::identity(Field::Complex, 3);
        assert!((&killing_field(&p, &id).unwrap() - &b1).norm() <= 1e-15);
    }

    #[test]
    fn killing_field_is_bilinear() {
        let mut rng = ChaCha12Rng::seed_from_u64(52);
        let a = random::gaussian(Field::Complex, 2, 3, &mut rng);
        let b = random::gaussian(Field::Complex, 2, 3, &mut rng);
        let p = pair(Field::Complex, 2, 3, &mut rng);
        let lhs = killing_field(&p, &a.axpy(2.0, &b)).unwrap();
        let rhs = killing_field(&p, &a)
            .unwrap()
            .axpy(2.0, &killing_field(&p, &b).unwrap());
        assert!((&lhs - &rhs).norm() <= 1e-12);
    }

    #[test]
    fn killing_field_is_tangent_to_alpha_level_sets() {
        // alpha is invariant under the action, so K is orthogonal to grad alpha
        let mut rng = ChaCha12Rng::seed_from_u64(53);
        for field in [Field::Real, Field::Complex] {
            for _ in 0..20 {
                let a = random::gaussian(field, 3, 4, &mut rng);
                let sv = singular_values(&a);
                if !matcore::sigma_min_is_simple(&sv, 1e-3) || sv[2] < 0.1 {
                    continue;
                }
                let p = pair(field, 3, 4, &mut rng);
                let k = killing_field(&p, &a).unwrap();
                let g = grad_alpha(&a, DEFAULT_CLUSTER_TOL).unwrap().matrix;
                let ip = k.inner_re(&g);
                assert!(
                    ip.abs() <= 1e-8 * (1.0 + k.norm() * g.norm()),
                    "<K, grad alpha> = {ip}"
                );
            }
        }
    }

    #[test]
    fn killing_norm_is_equivariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(54);
        let a = random::gaussian(Field::Complex, 2, 3, &mut rng);
        let p = pair(Field::Complex, 2, 3, &mut rng);
        let u = random::unitary(Field::Complex, 2, &mut rng);
        let v = random::unitary(Field::Complex, 3, &mut rng);
        let moved = a.unitary_conjugate(&u, &v).unwrap();
        let conj_pair = SkewPair::new(
            &MatrixRC::from_data(Field::Complex, u.data() * p.b1().data() * u.data().adjoint())
                .unwrap(),
            &MatrixRC::from_data(Field::Complex, v.data() * p.b2().data() * v.data().adjoint())
                .unwrap(),
        )
        .unwrap();
        let k0 = killing_field(&p, &a).unwrap().norm();
        let k1 = killing_field(&conj_pair, &moved).unwrap().norm();
        assert!((k0 - k1).abs() <= 1e-12 * k0.max(1.0));
    }

    #[test]
    fn lemma46_zero_and_frozen_example() {
        let d = DiagonalPoint::new(vec![2.0, 1.0], sig(&[1, 1]), 2).unwrap();
        let z = MatrixRC::zeros(Field::Real, 2, 2);
        assert_eq!(lemma46_j(&d, &z, &z).unwrap(), 0.0);

        let b = MatrixRC::new_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let j = lemma46_j(&d, &b, &b).unwrap();
        // direct expansion oracle: J = ||B S - S C||^2 - s_u <BB*S + S CC* - 2 B S C*, E>
        assert!((j - 4.0).abs() <= 1e-14, "J = {j}");
        assert!(j >= 0.0);
    }

    #[test]
    fn lemma46_matches_pre_expansion_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        for field in [Field::Real, Field::Complex] {
            for _ in 0..50 {
                let vals = random::decreasing_positive(2, 0.4, &mut rng);
                let d = DiagonalPoint::new(vals.clone(), sig(&[1, 2]), 4).unwrap();
                let b = random::skew(field, 3, &mut rng);
                let c = random::skew(field, 4, &mut rng);
                let j = lemma46_j(&d, &b, &c).unwrap();

                // oracle: the un-expanded form of the same quantity
                let s = d.as_matrix(Field::Complex);
                let su = *vals.last().unwrap();
                let mut e = DMatrix::<Complex64>::zeros(3, 4);
                e[(1, 1)] = Complex64::new(1.0, 0.0);
                e[(2, 2)] = Complex64::new(1.0, 0.0);
                let bs_sc = b.data() * s.data() - s.data() * c.data();
                let m_k = b.data() * b.data().adjoint() * s.data()
                    + s.data() * c.data() * c.data().adjoint()
                    - b.data() * s.data() * c.data().adjoint() * Complex64::new(2.0, 0.0);
                let ip: f64 = m_k
                    .iter()
                    .zip(e.iter())
                    .map(|(x, y)| (x * y.conj()).re)
                    .sum();
                let oracle = bs_sc.norm_squared() - su * ip;
                assert!(
                    (j - oracle).abs() <= 1e-10 * (1.0 + j.abs()),
                    "{j} vs {oracle}"
                );
                assert!(j >= -1e-10 * lemma46_scale(&d, &b, &c));
            }
        }
    }

    #[test]
    fn lemma46_randomized_nonnegative() {
        let mut rng = ChaCha12Rng::seed_from_u64(56);
        for field in [Field::Real, Field::Complex] {
            for trial in 0..500 {
                let n = 2 + (trial % 3);
                let m = n + (trial % 2);
                let sigs = crate::strata::signatures_of(n);
                let s = &sigs[trial % sigs.len()];
                let vals = random::decreasing_positive(s.distinct(), 0.3, &mut rng);
                let d = DiagonalPoint::new(vals, s.clone(), m).unwrap();
                let b = random::skew(field, n, &mut rng);
                let c = random::skew(field, m, &mut rng);
                let j = lemma46_j(&d, &b, &c).unwrap();
                assert!(
                    j >= -1e-10 * lemma46_scale(&d, &b, &c),
                    "J = {j} for sig {:?}",
                    s
                );
            }
        }
    }

    #[test]
    fn lemma46_is_quadratic_in_sigma() {
        let mut rng = ChaCha12Rng::seed_from_u64(57);
        let d1 = DiagonalPoint::new(vec![2.0, 1.0], sig(&[1, 1]), 3).unwrap();
        let c_scale = 1.7;
        let d2 = DiagonalPoint::new(vec![2.0 * c_scale, c_scale], sig(&[1, 1]), 3).unwrap();
        let b = random::skew(Field::Complex, 2, &mut rng);
        let c = random::skew(Field::Complex, 3, &mut rng);
        let j1 = lemma46_j(&d1, &b, &c).unwrap();
        let j2 = lemma46_j(&d2, &b, &c).unwrap();
        assert!((j2 - c_scale * c_scale * j1).abs() <= 1e-12 * j1.abs().max(1.0));
    }

    #[test]
    fn lemma46_rejects_non_skew() {
        let d = DiagonalPoint::new(vec![2.0, 1.0], sig(&[1, 1]), 2).unwrap();
        let not_skew = MatrixRC::identity(Field::Real, 2);
        let z = MatrixRC::zeros(Field::Real, 2, 2);
        assert!(matches!(
            lemma46_j(&d, &not_skew, &z),
            Err(Error::NotSkew)
        ));
    }

    #[test]
    fn cor38_zero_pair_vanishes() {
        let a = MatrixRC::diagonal(Field::Real, 2, 2, &[2.0, 1.0]).unwrap();
        let v = cor38_condition3(&a, &SkewPair::zero(Field::Real, 2, 2)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn cor38_matches_lemma46_at_diagonal() {
        // at a diagonal point with simple sigma_min the corollary expression
        // collapses to (4 / (k_u s_u^6)) J
        let mut rng = ChaCha12Rng::seed_from_u64(58);
        let d = DiagonalPoint::new(vec![2.0, 1.0], sig(&[1, 1]), 2).unwrap();
        let a = d.as_matrix(Field::Complex);
        for _ in 0..25 {
            let p = pair(Field::Complex, 2, 2, &mut rng);
            let lhs = cor38_condition3(&a, &p).unwrap();
            let su: f64 = 1.0;
            let rhs = 4.0 / su.powi(6) * lemma46_j(&d, p.b1(), p.b2()).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn cor38_randomized_nonnegative() {
        let mut rng = ChaCha12Rng::seed_from_u64(59);
        for field in [Field::Real, Field::Complex] {
            let mut done = 0;
            while done < 100 {
                let a = random::gaussian(field, 3, 3, &mut rng);
                let sv = singular_values(&a);
                if !matcore::sigma_min_is_simple(&sv, 1e-6) || sv[2] < 0.05 {
                    continue;
                }
                let p = pair(field, 3, 3, &mut rng);
                let v = cor38_condition3(&a, &p).unwrap();
                let scale = cor38_scale(&a, &p).unwrap();
                assert!(v >= -1e-8 * scale, "value {v} scale {scale}");
                done += 1;
            }
        }
    }

    #[test]
    fn hessian_identity_degenerate_cases() {
        let p = MatrixRC::diagonal(Field::Real, 2, 2, &[3.0, 1.0]).unwrap();
        let f = AlphaFunction::default();
        let mut rng = ChaCha12Rng::seed_from_u64(60);

        // k = 0: the identity collapses to Hess(b,b) = Hess(b,b)
        let b = MatrixRC::diagonal(Field::Real, 2, 2, &[0.4, -0.2]).unwrap();
        let zero_pair = SkewPair::zero(Field::Real, 2, 2);
        let terms = hessian_identity_terms(&f, &p, &b, &zero_pair, 1e-4).unwrap();
        assert!(terms.residual <= 1e-12 * terms.scale);

        // b = 0: checks Hess(k,k) = 1/2 <grad ||K||^2, grad alpha>
        let zero_b = MatrixRC::zeros(Field::Real, 2, 2);
        let pr = pair(Field::Real, 2, 2, &mut rng);
        let terms = hessian_identity_terms(&f, &p, &zero_b, &pr, 1e-4).unwrap();
        assert!(
            terms.residual <= 1e-5 * terms.scale,
            "residual {} scale {}",
            terms.residual,
            terms.scale
        );
    }

    #[test]
    fn hessian_identity_full() {
        let p = MatrixRC::diagonal(Field::Real, 2, 2, &[3.0, 1.0]).unwrap();
        let f = AlphaFunction::default();
        let mut rng = ChaCha12Rng::seed_from_u64(61);
        for _ in 0..10 {
            // b orthogonal to the orbit tangent at a diagonal point: real diagonal
            let b = MatrixRC::diagonal(
                Field::Real,
                2,
                2,
                &[
                    rand::Rng::random_range(&mut rng, -1.0..1.0),
                    rand::Rng::random_range(&mut rng, -1.0..1.0),
                ],
            )
            .unwrap();
            let pr = pair(Field::Real, 2, 2, &mut rng);
            let terms = hessian_identity_terms(&f, &p, &b, &pr, 1e-4).unwrap();
            assert!(
                terms.residual <= 1e-4 * terms.scale,
                "residual {} scale {}",
                terms.residual,
                terms.scale
            );
        }
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let mons = monomials(2, 1, 2);
        assert_eq!(
            mons,
            vec![
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn bombieri_inner_weights() {
        // <x1^2, x1^2> has weight 1; <x1 x2, x1 x2> has weight 1/2
        let one = Complex64::new(1.0, 0.0);
        let mk = |coeff_idx: usize| {
            let mut row = vec![Complex64::ZERO; monomials(2, 1, 2).len()];
            row[coeff_idx] = one;
            PolySystemAtZero::new(
                vec![2, 1],
                Field::Complex,
                vec![row, vec![one, Complex64::ZERO]],
            )
            .unwrap()
        };
        let sq = mk(2); // x1^2
        let cross = mk(3); // x1 x2
        let base = 1.0; // contribution of the shared linear second equation
        assert!((bombieri_inner(&sq, &sq).unwrap().re - (1.0 + base)).abs() <= 1e-14);
        assert!((bombieri_inner(&cross, &cross).unwrap().re - (0.5 + base)).abs() <= 1e-14);
    }

    #[test]
    fn mu_on_linear_systems_is_inverse_sigma_min() {
        let mut rng = ChaCha12Rng::seed_from_u64(62);
        let a = random::gaussian(Field::Complex, 3, 3, &mut rng);
        let coeffs: Vec<Vec<Complex64>> = (0..3)
            .map(|i| (0..3).map(|j| a.entry(i, j)).collect())
            .collect();
        let sys = PolySystemAtZero::new(vec![1, 1, 1], Field::Complex, coeffs).unwrap();
        let mu = bombieri_mu(&sys).unwrap();
        let want = 1.0 / sigma_min(&a);
        assert!((mu - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn mu_of_scaled_univariate() {
        // f_1 = 2 x_1 with d = 4: mu = sigma_min(2 / sqrt 4)^-1 = 1
        let mons = monomials(1, 1, 4);
        let mut row = vec![Complex64::ZERO; mons.len()];
        row[0] = Complex64::new(2.0, 0.0);
        let sys = PolySystemAtZero::new(vec![4], Field::Real, vec![row]).unwrap();
        assert!((bombieri_mu(&sys).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn mu_ignores_higher_order_terms() {
        let mut rng = ChaCha12Rng::seed_from_u64(63);
        let lin = random::gaussian(Field::Real, 2, 2, &mut rng);
        let mons = monomials(2, 1, 3);
        let build = |cubic: f64| {
            let rows: Vec<Vec<Complex64>> = (0..2)
                .map(|i| {
                    mons.iter()
                        .enumerate()
                        .map(|(k, e)| {
                            if k < 2 {
                                lin.entry(i, k)
                            } else if e.iter().sum::<u32>() == 3 {
                                Complex64::new(cubic, 0.0)
                            } else {
                                Complex64::ZERO
                            }
                        })
                        .collect()
                })
                .collect();
            PolySystemAtZero::new(vec![3, 3], Field::Real, rows).unwrap()
        };
        let mu0 = bombieri_mu(&build(0.0)).unwrap();
        let mu1 = bombieri_mu(&build(5.0)).unwrap();
        assert_eq!(mu0, mu1);
    }

    #[test]
    fn mu_rejects_degenerate_linear_part() {
        let mons = monomials(2, 1, 2);
        let mut row = vec![Complex64::ZERO; mons.len()];
        row[2] = Complex64::new(1.0, 0.0); // x1^2 only, no linear part
        let sys =
            PolySystemAtZero::new(vec![2, 2], Field::Complex, vec![row.clone(), row]).unwrap();
        assert!(matches!(
            bombieri_mu(&sys),
            Err(Error::DegenerateLinearPart)
        ));
    }
}
