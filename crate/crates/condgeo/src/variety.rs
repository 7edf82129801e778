//! The solution variety `W = {(A, x) : A x = 0}` of `n x (n+1)` full-rank
//! matrices paired with a projective kernel point.
//!
//! Points carry a unit-sphere representative of `x`; all metric quantities
//! phase-align representatives before differencing, so they only depend on
//! the projective class. The conformal factor is `alpha(A) = sigma_min(A)^-2`
//! exactly as in the matrix space, weighting both factors of the product
//! metric.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geodesic::{minimize_path, DiscretePath};
use crate::matcore::{self, sigma_min, Field, MatrixRC, SINGULAR_REL_TOL};

/// Residual bound `||A x|| <= KERNEL_TOL * ||A||_F` for valid points.
pub const KERNEL_TOL: f64 = 1e-10;

/// A point `(A, x)` of the solution variety with `A` of size `n x (n+1)`.
#[derive(Clone, Debug)]
pub struct VarietyPoint {
    a: MatrixRC,
    x: DVector<Complex64>,
}

/// Unit phase (or sign) `c` maximizing `Re <c * x, reference>`.
fn align_phase(reference: &DVector<Complex64>, x: &DVector<Complex64>) -> Complex64 {
    let c = reference.dotc(x); // sum conj(ref_i) x_i
    if c.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        c.conj() / Complex64::new(c.norm(), 0.0)
    }
}

/// Canonical phase: largest-modulus entry real positive.
fn canonical_phase(x: &DVector<Complex64>) -> Complex64 {
    let mut best = 0usize;
    for i in 1..x.len() {
        if x[i].norm() > x[best].norm() {
            best = i;
        }
    }
    let z = x[best];
    if z.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.conj() / Complex64::new(z.norm(), 0.0)
    }
}

impl VarietyPoint {
    /// Validates and stores a point, normalizing `x` to the canonical
    /// representative (unit norm, largest-modulus entry real positive).
    pub fn new(a: MatrixRC, x: DVector<Complex64>) -> Result<Self> {
        let mut p = Self::with_representative(a, x)?;
        let phase = canonical_phase(&p.x);
        p.x *= phase;
        if p.a.field() == Field::Real {
            // the canonical phase of a real vector is +-1; keep entries real
            p.x = p.x.map(|z| Complex64::new(z.re, 0.0));
        }
        Ok(p)
    }

    /// Validates a point but keeps the caller's phase choice for `x` (used
    /// by path solvers that maintain smoothly aligned representatives).
    pub fn with_representative(a: MatrixRC, x: DVector<Complex64>) -> Result<Self> {
        if a.cols() != a.rows() + 1 {
            return Err(Error::ShapeMismatch("variety points need m = n + 1".into()));
        }
        if x.len() != a.cols() {
            return Err(Error::ShapeMismatch("kernel vector length".into()));
        }
        if a.field() == Field::Real && x.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput("real point with complex x".into()));
        }
        let nrm = x.norm();
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("kernel representative not unit".into()));
        }
        let resid = (a.data() * &x).norm();
        if resid > KERNEL_TOL * a.norm() {
            return Err(Error::InvalidInput(format!(
                "kernel residual {resid:.3e} exceeds tolerance"
            )));
        }
        Ok(VarietyPoint { a, x })
    }

    pub fn a(&self) -> &MatrixRC {
        &self.a
    }

    pub fn x(&self) -> &DVector<Complex64> {
        &self.x
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }
}

/// Kernel representative of a full-rank `n x (n+1)` matrix: the right
/// singular vector beyond the square part, canonically phased.
pub fn kernel_point(a: &MatrixRC) -> Result<VarietyPoint> {
    if a.cols() != a.rows() + 1 {
        return Err(Error::ShapeMismatch("kernel_point needs m = n + 1".into()));
    }
    if sigma_min(a) <= SINGULAR_REL_TOL * a.norm() {
        return Err(Error::RankDeficient);
    }
    let f = matcore::svd(a)?;
    let x = f.v_col(a.cols() - 1);
    VarietyPoint::new(a.clone(), x)
}

fn real_dof(field: Field, n: usize) -> usize {
    let m = n + 1;
    match field {
        Field::Real => n * m + m,
        Field::Complex => 2 * (n * m + m),
    }
}

fn pack(field: Field, da: &MatrixRC, dx: &DVector<Complex64>, out: &mut [f64]) {
    let nm = da.rows() * da.cols();
    let m = dx.len();
    match field {
        Field::Real => {
            for (k, z) in da.data().iter().enumerate() {
                out[k] = z.re;
            }
            for i in 0..m {
                out[nm + i] = dx[i].re;
            }
        }
        Field::Complex => {
            for (k, z) in da.data().iter().enumerate() {
                out[k] = z.re;
                out[nm + k] = z.im;
            }
            for i in 0..m {
                out[2 * nm + i] = dx[i].re;
                out[2 * nm + m + i] = dx[i].im;
            }
        }
    }
}

fn unpack(field: Field, n: usize, x: &[f64]) -> (MatrixRC, DVector<Complex64>) {
    let m = n + 1;
    let nm = n * m;
    let (re_a, rest) = match field {
        Field::Real => (&x[..nm], &x[nm..]),
        Field::Complex => (&x[..nm], &x[nm..]),
    };
    let data = DMatrix::from_fn(n, m, |i, j| {
        let k = j * n + i;
        match field {
            Field::Real => Complex64::new(re_a[k], 0.0),
            Field::Complex => Complex64::new(re_a[k], rest[k]),
        }
    });
    let a = MatrixRC::from_data(field, data).expect("finite coordinates");
    let dx = match field {
        Field::Real => DVector::from_fn(m, |i, _| Complex64::new(x[nm + i], 0.0)),
        Field::Complex => DVector::from_fn(m, |i, _| {
            Complex64::new(x[2 * nm + i], x[2 * nm + m + i])
        }),
    };
    (a, dx)
}

/// Real-linear constraint map of the tangent space at `p`:
/// `(dA, dx) -> (A dx + dA x, Re<dx, x>)` flattened over R.
fn constraint_apply(p: &VarietyPoint, da: &MatrixRC, dx: &DVector<Complex64>) -> Vec<f64> {
    let r1 = da.data() * p.x() + p.a().data() * dx;
    let r2: f64 = p
        .x()
        .iter()
        .zip(dx.iter())
        .map(|(xi, di)| (di * xi.conj()).re)
        .sum();
    let mut out = Vec::with_capacity(2 * r1.len() + 1);
    for z in r1.iter() {
        out.push(z.re);
        if p.field() == Field::Complex {
            out.push(z.im);
        }
    }
    out.push(r2);
    out
}

/// Orthogonal projection of `(dA, dx)` onto the tangent space
/// `{(Adot, xdot) : Adot x + A xdot = 0, Re<xdot, x> = 0}` at `p`, by the
/// normal equations of the constraint map.
pub fn tangent_project_w(
    p: &VarietyPoint,
    da: &MatrixRC,
    dx: &DVector<Complex64>,
) -> Result<(MatrixRC, DVector<Complex64>)> {
    let n = p.a().rows();
    if da.rows() != n || da.cols() != n + 1 || dx.len() != n + 1 {
        return Err(Error::ShapeMismatch("tangent data shape".into()));
    }
    let field = p.field();
    let dof = real_dof(field, n);
    let n_con = constraint_apply(p, da, dx).len();

    // constraint matrix columns: image of the canonical basis
    let mut jmat = DMatrix::<f64>::zeros(n_con, dof);
    let mut basis = vec![0.0; dof];
    for j in 0..dof {
        basis[j] = 1.0;
        let (ea, ex) = unpack(field, n, &basis);
        let col = constraint_apply(p, &ea, &ex);
        for (i, v) in col.iter().enumerate() {
            jmat[(i, j)] = *v;
        }
        basis[j] = 0.0;
    }

    let mut v = vec![0.0; dof];
    pack(field, da, dx, &mut v);
    let vvec = DVector::from_vec(v);
    let rhs = &jmat * &vvec;
    let gram = &jmat * jmat.transpose();
    let lambda = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("degenerate constraint system".into()))?;
    let proj = &vvec - jmat.transpose() * lambda;
    let (pa, px) = unpack(field, n, proj.as_slice());
    Ok((pa, px))
}

/// Path on the variety with fixed endpoints.
#[derive(Clone, Debug)]
pub struct VarietyPath {
    nodes: Vec<VarietyPoint>,
}

impl VarietyPath {
    pub fn new(nodes: Vec<VarietyPoint>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("path needs at least two nodes".into()));
        }
        let n = nodes[0].a().rows();
        let field = nodes[0].field();
        if nodes
            .iter()
            .any(|p| p.a().rows() != n || p.field() != field)
        {
            return Err(Error::ShapeMismatch("variety path nodes disagree".into()));
        }
        Ok(VarietyPath { nodes })
    }

    pub fn nodes(&self) -> &[VarietyPoint] {
        &self.nodes
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Condition length on the variety: per segment,
/// `sqrt(||dA||_F^2 + ||dx||^2)` with phase-aligned `x` differences, weighted
/// by the trapezoid average of `sigma_min(A)^-1`.
pub fn variety_condition_length(path: &VarietyPath) -> Result<f64> {
    let mut total = 0.0;
    for (i, w) in path.nodes.windows(2).enumerate() {
        let (p, q) = (&w[0], &w[1]);
        let sp = sigma_min(p.a());
        let sq = sigma_min(q.a());
        if sp <= SINGULAR_REL_TOL * p.a().norm() {
            return Err(Error::SingularNode { index: i });
        }
        if sq <= SINGULAR_REL_TOL * q.a().norm() {
            return Err(Error::SingularNode { index: i + 1 });
        }
        let da = (q.a() - p.a()).norm();
        let phase = align_phase(p.x(), q.x());
        let dx = (q.x() * phase - p.x()).norm();
        total += (da * da + dx * dx).sqrt() * 0.5 * (1.0 / sp + 1.0 / sq);
    }
    Ok(total)
}

/// Geodesic solve outcome on the variety.
#[derive(Clone, Debug)]
pub struct VarietyGeodesicResult {
    pub path: VarietyPath,
    pub length_kappa: f64,
    /// Projected (Riemannian) gradient norm at the last iterate.
    pub grad_norm: f64,
    pub iterations: usize,
    pub condition_speed: Vec<f64>,
    pub converged: bool,
    pub tol: f64,
    /// Worst kernel residual `||A_i x_i|| / ||A_i||` over the nodes.
    pub max_kernel_residual: f64,
}

pub use crate::geodesic::MinimizeOpts;

/// Retraction onto the variety: keep `A`, replace `x` by the kernel
/// representative aligned with the previous one.
fn retract_node(a: &MatrixRC, x_prev: &DVector<Complex64>) -> Result<VarietyPoint> {
    if sigma_min(a) <= SINGULAR_REL_TOL * a.norm() {
        return Err(Error::SingularInput);
    }
    let f = matcore::svd(a)?;
    let mut x = f.v_col(a.cols() - 1);
    let phase = align_phase(x_prev, &x);
    x *= phase;
    if a.field() == Field::Real {
        x = x.map(|z| Complex64::new(z.re, 0.0));
    }
    VarietyPoint::with_representative(a.clone(), x)
}

fn seed_chain(p: &VarietyPoint, q: &VarietyPoint, n_segments: usize) -> Result<Vec<VarietyPoint>> {
    let delta = q.a() - p.a();
    let mut nodes = vec![p.clone()];
    for i in 1..n_segments {
        let ai = p.a().axpy(i as f64 / n_segments as f64, &delta);
        if sigma_min(&ai) <= SINGULAR_REL_TOL * ai.norm() {
            return Err(Error::SeedSingular);
        }
        let prev = nodes.last().unwrap().x().clone();
        nodes.push(retract_node(&ai, &prev).map_err(|e| match e {
            Error::SingularInput => Error::SeedSingular,
            other => other,
        })?);
    }
    // the final representative of q is aligned with the chain so that the
    // last segment carries no spurious phase cost; same projective endpoint
    let phase = align_phase(nodes.last().unwrap().x(), q.x());
    let mut qx = q.x() * phase;
    if p.field() == Field::Real {
        qx = qx.map(|z| Complex64::new(z.re, 0.0));
    }
    nodes.push(VarietyPoint::with_representative(q.a().clone(), qx)?);
    Ok(nodes)
}

/// Discrete condition energy on the variety chain.
fn variety_energy(nodes: &[VarietyPoint]) -> f64 {
    let n_seg = nodes.len() - 1;
    let mut e = 0.0;
    for i in 0..n_seg {
        let da = nodes[i + 1].a() - nodes[i].a();
        let dx = nodes[i + 1].x() - nodes[i].x();
        let mid = nodes[i].a().axpy(0.5, &da);
        let smin = sigma_min(&mid);
        if smin <= SINGULAR_REL_TOL * mid.norm() {
            return f64::INFINITY;
        }
        e += n_seg as f64 * (da.inner_re(&da) + dx.norm_squared()) * smin.powi(-2);
    }
    e
}

struct VarietyGrad {
    /// Riemannian (tangent-projected) gradients per interior node.
    grads: Vec<(MatrixRC, DVector<Complex64>)>,
    norm: f64,
}

fn variety_energy_grad(nodes: &[VarietyPoint], cluster_tol: f64) -> Result<VarietyGrad> {
    let n_seg = nodes.len() - 1;
    let nf = n_seg as f64;
    let field = nodes[0].field();
    let n = nodes[0].a().rows();
    let mut raw: Vec<(MatrixRC, DVector<Complex64>)> = (0..nodes.len())
        .map(|_| {
            (
                MatrixRC::zeros(field, n, n + 1),
                DVector::<Complex64>::zeros(n + 1),
            )
        })
        .collect();
    for i in 0..n_seg {
        let da = nodes[i + 1].a() - nodes[i].a();
        let dx = nodes[i + 1].x() - nodes[i].x();
        let mid = nodes[i].a().axpy(0.5, &da);
        let f = matcore::svd(&mid)?;
        let smin = f.sigma_min();
        if smin <= SINGULAR_REL_TOL * mid.norm() {
            return Err(Error::SingularInput);
        }
        let al = smin.powi(-2);
        let g = matcore::grad_alpha_from_svd(&f, cluster_tol)
            .map(|g| g.matrix)
            .unwrap_or_else(|_| {
                // multiplicity at the midpoint: any singular pair gives a
                // valid generalized-gradient selection
                let u_n = f.u_col(f.sigma.len() - 1);
                let v_n = f.v_col(mid.cols() - 1 - (mid.cols() - mid.rows()));
                let scale = Complex64::new(-2.0 * smin.powi(-3), 0.0);
                MatrixRC::from_data(field, (&u_n * v_n.adjoint()) * scale).unwrap()
            });
        let d2 = da.inner_re(&da) + dx.norm_squared();
        let half = g.scale(0.5 * nf * d2);
        raw[i].0 = raw[i].0.axpy(-2.0 * nf * al, &da).axpy(1.0, &half);
        raw[i + 1].0 = raw[i + 1].0.axpy(2.0 * nf * al, &da).axpy(1.0, &half);
        let sdx = dx * Complex64::new(2.0 * nf * al, 0.0);
        raw[i].1 -= &sdx;
        raw[i + 1].1 += &sdx;
    }
    let mut grads = Vec::with_capacity(nodes.len().saturating_sub(2));
    let mut norm_sq = 0.0;
    for (k, node) in nodes.iter().enumerate().take(n_seg).skip(1) {
        let (ga, gx) = tangent_project_w(node, &raw[k].0, &raw[k].1)?;
        norm_sq += ga.norm().powi(2) + gx.norm_squared();
        grads.push((ga, gx));
    }
    Ok(VarietyGrad {
        grads,
        norm: norm_sq.sqrt(),
    })
}

/// Uniform-speed resampling of the chain (piecewise-linear in the product
/// coordinates, re-retracted onto the variety).
fn uniformize(nodes: &[VarietyPoint]) -> Result<Vec<VarietyPoint>> {
    let n_seg = nodes.len() - 1;
    let mut current: Vec<VarietyPoint> = nodes.to_vec();
    for _ in 0..3 {
        let mut lens = Vec::with_capacity(n_seg);
        for w in current.windows(2) {
            let da = (w[1].a() - w[0].a()).norm();
            let phase = align_phase(w[0].x(), w[1].x());
            let dx = (w[1].x() * phase - w[0].x()).norm();
            let s0 = sigma_min(w[0].a());
            let s1 = sigma_min(w[1].a());
            lens.push((da * da + dx * dx).sqrt() * 0.5 * (1.0 / s0 + 1.0 / s1));
        }
        let total: f64 = lens.iter().sum();
        if total == 0.0 {
            return Ok(current);
        }
        let mut cum = vec![0.0];
        for l in &lens {
            cum.push(cum.last().unwrap() + l);
        }
        let mut next = vec![current[0].clone()];
        for j in 1..n_seg {
            let target = total * j as f64 / n_seg as f64;
            let seg = cum.partition_point(|&s| s < target).clamp(1, n_seg) - 1;
            let local = if lens[seg] > 0.0 {
                (target - cum[seg]) / lens[seg]
            } else {
                0.0
            };
            let a = current[seg]
                .a()
                .axpy(local, &(current[seg + 1].a() - current[seg].a()));
            let prev = next.last().unwrap().x().clone();
            next.push(retract_node(&a, &prev)?);
        }
        next.push(current[n_seg].clone());
        current = next;
    }
    Ok(current)
}

/// Projected-descent local minimizer of the discrete condition energy on the
/// variety: limited-memory BFGS directions over tangent-projected gradients,
/// with a kernel-resolving retraction after every accepted step.
pub fn minimize_variety_path(
    p: &VarietyPoint,
    q: &VarietyPoint,
    n_segments: usize,
    opts: &MinimizeOpts,
) -> Result<VarietyGeodesicResult> {
    if p.a().rows() != q.a().rows() || p.field() != q.field() {
        return Err(Error::ShapeMismatch("endpoints disagree".into()));
    }
    if n_segments == 0 {
        return Err(Error::InvalidInput("need at least one segment".into()));
    }
    let mut nodes = seed_chain(p, q, n_segments)?;
    let field = p.field();
    let n = p.a().rows();
    let dof = real_dof(field, n);
    let interior = n_segments - 1;

    let mut iterations = 0;
    let mut grad_norm = 0.0;
    if interior > 0 && (q.a() - p.a()).norm() + (q.x() - p.x()).norm() > 0.0 {
        const MEMORY: usize = 16;
        const C1: f64 = 1e-4;
        let flatten = |g: &[(MatrixRC, DVector<Complex64>)]| -> Vec<f64> {
            let mut out = vec![0.0; interior * dof];
            for (i, (ga, gx)) in g.iter().enumerate() {
                pack(field, ga, gx, &mut out[i * dof..(i + 1) * dof]);
            }
            out
        };
        let node_coords = |nodes: &[VarietyPoint]| -> Vec<f64> {
            let mut out = vec![0.0; interior * dof];
            for i in 0..interior {
                pack(
                    field,
                    nodes[i + 1].a(),
                    nodes[i + 1].x(),
                    &mut out[i * dof..(i + 1) * dof],
                );
            }
            out
        };
        let retract_all = |base: &[VarietyPoint], step: &[f64], t: f64| -> Result<Vec<VarietyPoint>> {
            let mut out = vec![base[0].clone()];
            for i in 0..interior {
                let (da, dx) = unpack(field, n, &step[i * dof..(i + 1) * dof]);
                let a = base[i + 1].a().axpy(t, &da);
                let xt = base[i + 1].x() + dx * Complex64::new(t, 0.0);
                let prev = out.last().unwrap().x().clone();
                let mut node = retract_node(&a, &xt)?;
                // keep the chain smoothly aligned
                let phase = align_phase(&prev, node.x());
                let aligned = node.x() * phase;
                node = VarietyPoint::with_representative(node.a().clone(), aligned)?;
                out.push(node);
            }
            out.push(base[n_segments].clone());
            Ok(out)
        };

        let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
            std::collections::VecDeque::new();
        let g0 = variety_energy_grad(&nodes, opts.cluster_tol)?;
        let mut e = variety_energy(&nodes);
        let mut gflat = flatten(&g0.grads);
        grad_norm = g0.norm;

        let dotv = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

        let trace = std::env::var_os("CONDGEO_TRACE").is_some();
        while grad_norm > opts.tol && iterations < opts.max_iters {
            if trace && iterations % 200 == 0 {
                eprintln!("variety iter {iterations}: e = {e:.12e}, |g| = {grad_norm:.3e}, hist {}", hist.len());
            }
            iterations += 1;
            let mut d: Vec<f64> = gflat.iter().map(|v| -v).collect();
            let mut alphas = Vec::with_capacity(hist.len());
            for (s, y, rho) in hist.iter().rev() {
                let a = rho * dotv(s, &d);
                for (di, yi) in d.iter_mut().zip(y) {
                    *di -= a * yi;
                }
                alphas.push(a);
            }
            if let Some((s, y, _)) = hist.back() {
                let gamma = dotv(s, y) / dotv(y, y);
                for di in d.iter_mut() {
                    *di *= gamma;
                }
            }
            for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
                let b = rho * dotv(y, &d);
                for (di, si) in d.iter_mut().zip(s) {
                    *di += (a - b) * si;
                }
            }
            let mut slope = dotv(&gflat, &d);
            if slope >= 0.0 {
                hist.clear();
                d = gflat.iter().map(|v| -v).collect();
                slope = -grad_norm * grad_norm;
            }
            let coords_before = node_coords(&nodes);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                if let Ok(cand) = retract_all(&nodes, &d, t) {
                    let et = variety_energy(&cand);
                    let margin = C1 * t * slope;
                    let ok = if margin.abs() < 1e-14 * (1.0 + e.abs()) {
                        et <= e
                    } else {
                        et <= e + margin
                    };
                    if ok {
                        let gnew = variety_energy_grad(&cand, opts.cluster_tol)?;
                        let coords_after = node_coords(&cand);
                        let s: Vec<f64> = coords_after
                            .iter()
                            .zip(&coords_before)
                            .map(|(a, b)| a - b)
                            .collect();
                        let gflat_new = flatten(&gnew.grads);
                        let y: Vec<f64> =
                            gflat_new.iter().zip(&gflat).map(|(a, b)| a - b).collect();
                        let sy = dotv(&s, &y);
                        if sy > 1e-10 * dotv(&s, &s).sqrt() * dotv(&y, &y).sqrt() {
                            if hist.len() == MEMORY {
                                hist.pop_front();
                            }
                            hist.push_back((s, y, 1.0 / sy));
                        }
                        nodes = cand;
                        e = et;
                        gflat = gflat_new;
                        grad_norm = gnew.norm;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                if hist.is_empty() {
                    break;
                }
                hist.clear();
            }
        }
    }

    let nodes = uniformize(&nodes)?;
    let path = VarietyPath::new(nodes)?;
    let length_kappa = variety_condition_length(&path)?;
    let n_seg = path.segments() as f64;
    let mut condition_speed = Vec::with_capacity(path.segments());
    for w in path.nodes.windows(2) {
        let da = (w[1].a() - w[0].a()).norm();
        let phase = align_phase(w[0].x(), w[1].x());
        let dx = (w[1].x() * phase - w[0].x()).norm();
        let s0 = sigma_min(w[0].a());
        let s1 = sigma_min(w[1].a());
        condition_speed
            .push((da * da + dx * dx).sqrt() * 0.5 * (1.0 / s0 + 1.0 / s1) * n_seg);
    }
    let max_kernel_residual = path
        .nodes
        .iter()
        .map(|p| (p.a().data() * p.x()).norm() / p.a().norm().max(1e-300))
        .fold(0.0f64, f64::max);
    let converged = grad_norm <= opts.tol;
    let result = VarietyGeodesicResult {
        path,
        length_kappa,
        grad_norm,
        iterations,
        condition_speed,
        converged,
        tol: opts.tol,
        max_kernel_residual,
    };
    if !result.converged {
        return Err(Error::NoConvergence {
            residual: grad_norm,
            tol: opts.tol,
            best: Box::new(crate::geodesic::GeodesicResult {
                path: DiscretePath::new(
                    result.path.nodes().iter().map(|p| p.a().clone()).collect(),
                )?,
                length_kappa: result.length_kappa,
                grad_norm,
                iterations,
                condition_speed: result.condition_speed.clone(),
                converged: false,
                tol: opts.tol,
            }),
        });
    }
    Ok(result)
}

/// Trace of `log alpha(A(t))` along a variety path, for convexity checks.
pub fn log_alpha_trace(path: &VarietyPath) -> Result<crate::convexity::ScalarTrace> {
    let n = path.segments() as f64;
    let mut times = Vec::with_capacity(path.nodes.len());
    let mut values = Vec::with_capacity(path.nodes.len());
    for (i, p) in path.nodes.iter().enumerate() {
        times.push(i as f64 / n);
        values.push(matcore::alpha(p.a())?.ln());
    }
    crate::convexity::ScalarTrace::new(times, values, "log_alpha_variety")
}

/// GL geodesic between the matrix components, for cross-checks against the
/// variety solver when the kernel stays constant by symmetry.
pub fn matrix_component_geodesic(
    p: &VarietyPoint,
    q: &VarietyPoint,
    n_segments: usize,
    opts: &MinimizeOpts,
) -> Result<f64> {
    Ok(minimize_path(p.a(), q.a(), n_segments, opts)?.length_kappa)
}
