//! Condition lengths and condition geodesics with fixed endpoints.
//!
//! A path is charged `||A'(t)||_F / sigma_min(A(t))` per unit time; the
//! discrete stand-in is a piecewise-linear node list. Geodesics are computed
//! variationally: the discrete condition energy
//! `sum_i N ||A_{i+1} - A_i||_F^2 alpha(midpoint_i)` is minimized over the
//! interior nodes (energy minimizers are length minimizers with uniform
//! speed), then the result is reparametrized to uniform condition speed.
//!
//! `sigma_min` is nonsmooth where the smallest singular value is multiple;
//! there the optimizer substitutes one subgradient selection
//! `-2 sigma^-3 u v^*` for an arbitrary singular pair, a valid element of the
//! generalized gradient.

use crate::error::{Error, Result};
use crate::matcore::{self, sigma_min, Field, MatrixRC, DEFAULT_CLUSTER_TOL, SINGULAR_REL_TOL};

/// Piecewise-linear path of matrices on the uniform grid `t_i = i/N`.
/// Every node is nonsingular; endpoints are fixed by the operations below.
#[derive(Clone, Debug)]
pub struct DiscretePath {
    nodes: Vec<MatrixRC>,
}

impl DiscretePath {
    pub fn new(nodes: Vec<MatrixRC>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("path needs at least two nodes".into()));
        }
        let first = &nodes[0];
        for (i, node) in nodes.iter().enumerate() {
            if !node.same_shape(first) || node.field() != first.field() {
                return Err(Error::ShapeMismatch(format!("node {i} disagrees")));
            }
            if sigma_min(node) <= SINGULAR_REL_TOL * node.norm() {
                return Err(Error::SingularNode { index: i });
            }
        }
        Ok(DiscretePath { nodes })
    }

    pub fn nodes(&self) -> &[MatrixRC] {
        &self.nodes
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn field(&self) -> Field {
        self.nodes[0].field()
    }

    /// Piecewise-linear sample at `t` in `[0, 1]`.
    pub fn sample(&self, t: f64) -> MatrixRC {
        let n = self.segments() as f64;
        let s = (t.clamp(0.0, 1.0) * n).min(n - 1e-12).max(0.0);
        let i = s.floor() as usize;
        let tau = s - i as f64;
        self.nodes[i].axpy(tau, &(&self.nodes[i + 1] - &self.nodes[i]))
    }
}

/// Condition length by trapezoid quadrature at the nodes:
/// `sum ||A_{i+1} - A_i||_F (sigma_min(A_i)^-1 + sigma_min(A_{i+1})^-1) / 2`.
pub fn condition_length(path: &DiscretePath) -> Result<f64> {
    let mut inv = Vec::with_capacity(path.nodes.len());
    for (i, node) in path.nodes.iter().enumerate() {
        let s = sigma_min(node);
        if s <= SINGULAR_REL_TOL * node.norm() {
            return Err(Error::SingularNode { index: i });
        }
        inv.push(1.0 / s);
    }
    let mut total = 0.0;
    for i in 0..path.segments() {
        let step = (&path.nodes[i + 1] - &path.nodes[i]).norm();
        total += step * 0.5 * (inv[i] + inv[i + 1]);
    }
    Ok(total)
}

// Two-point Gauss-Legendre nodes on [0, 1].
const GAUSS2: [f64; 2] = [
    0.5 - 0.288_675_134_594_812_88,
    0.5 + 0.288_675_134_594_812_88,
];

/// Condition length of one linear segment by composite 2-point Gauss
/// quadrature with `subs` panels. The integrand along a chord is smooth, so
/// this converges at fourth order.
fn segment_length_fine(a: &MatrixRC, b: &MatrixRC, subs: usize) -> Result<f64> {
    let delta = b - a;
    let speed = delta.norm();
    if speed == 0.0 {
        return Ok(0.0);
    }
    let h = 1.0 / subs as f64;
    let mut acc = 0.0;
    for k in 0..subs {
        for g in GAUSS2 {
            let tau = (k as f64 + g) * h;
            let p = a.axpy(tau, &delta);
            let s = sigma_min(&p);
            if s <= SINGULAR_REL_TOL * p.norm() {
                return Err(Error::SingularNode { index: k });
            }
            acc += 0.5 * h / s;
        }
    }
    Ok(acc * speed)
}

/// Per-segment condition lengths measured along the path's own polyline with
/// high-order quadrature.
pub fn segment_condition_lengths(path: &DiscretePath) -> Result<Vec<f64>> {
    path.nodes
        .windows(2)
        .map(|w| segment_length_fine(&w[0], &w[1], 16))
        .collect()
}

/// Per-segment condition speeds `N * length_i` of the unit-time grid.
pub fn condition_speeds(path: &DiscretePath) -> Result<Vec<f64>> {
    let n = path.segments() as f64;
    Ok(segment_condition_lengths(path)?
        .into_iter()
        .map(|l| l * n)
        .collect())
}

/// Outcome of a variational geodesic solve.
#[derive(Clone, Debug)]
pub struct GeodesicResult {
    pub path: DiscretePath,
    /// Condition length of the converged path (trapezoid at the nodes).
    pub length_kappa: f64,
    /// Final first-order residual of the energy gradient.
    pub grad_norm: f64,
    pub iterations: usize,
    /// Per-segment condition speeds after reparametrization.
    pub condition_speed: Vec<f64>,
    pub converged: bool,
    /// First-order tolerance the solve was run with.
    pub tol: f64,
}

/// Options for [`minimize_path`].
#[derive(Clone, Debug)]
pub struct MinimizeOpts {
    /// First-order residual target.
    pub tol: f64,
    pub max_iters: usize,
    /// Relative gap below which `sigma_min` counts as multiple and a
    /// subgradient selection is used.
    pub cluster_tol: f64,
}

impl Default for MinimizeOpts {
    fn default() -> Self {
        MinimizeOpts {
            tol: 1e-7,
            max_iters: 20_000,
            cluster_tol: DEFAULT_CLUSTER_TOL,
        }
    }
}

/// Flat real coordinates for the interior nodes.
struct Packing {
    field: Field,
    n: usize,
    m: usize,
}

impl Packing {
    fn dof(&self) -> usize {
        match self.field {
            Field::Real => self.n * self.m,
            Field::Complex => 2 * self.n * self.m,
        }
    }

    fn write(&self, mat: &MatrixRC, out: &mut [f64]) {
        let nm = self.n * self.m;
        for (k, z) in mat.data().iter().enumerate() {
            out[k] = z.re;
            if self.field == Field::Complex {
                out[nm + k] = z.im;
            }
        }
    }

    fn read(&self, x: &[f64]) -> MatrixRC {
        let nm = self.n * self.m;
        let data = nalgebra::DMatrix::from_fn(self.n, self.m, |i, j| {
            let k = j * self.n + i; // column-major to match DMatrix iteration
            num_complex::Complex64::new(
                x[k],
                if self.field == Field::Complex {
                    x[nm + k]
                } else {
                    0.0
                },
            )
        });
        MatrixRC::from_data(self.field, data).expect("packed coordinates are finite")
    }
}

/// `alpha` at a point plus one element of its generalized gradient. Where the
/// gap test passes this is the gradient; otherwise the selection for one
/// singular pair of `sigma_min`.
fn alpha_and_subgrad(a: &MatrixRC, cluster_tol: f64) -> Result<(f64, MatrixRC)> {
    let f = matcore::svd(a)?;
    let smin = f.sigma_min();
    if smin <= SINGULAR_REL_TOL * a.norm() {
        return Err(Error::SingularInput);
    }
    let n = f.sigma.len();
    let _simple = matcore::sigma_min_is_simple(&f.sigma, cluster_tol);
    let u_n = f.u_col(n - 1);
    let v_n = f.v_col(n - 1);
    let scale = num_complex::Complex64::new(-2.0 * smin.powi(-3), 0.0);
    let g = MatrixRC::from_data(a.field(), (&u_n * v_n.adjoint()) * scale)?;
    Ok((smin.powi(-2), g))
}

/// Discrete condition energy of a node chain; `+inf` when a midpoint is
/// singular (so line searches reject the step).
fn chain_energy(nodes: &[MatrixRC]) -> f64 {
    let n_seg = nodes.len() - 1;
    let mut e = 0.0;
    for i in 0..n_seg {
        let delta = &nodes[i + 1] - &nodes[i];
        let mid = nodes[i].axpy(0.5, &delta);
        let smin = sigma_min(&mid);
        if smin <= SINGULAR_REL_TOL * mid.norm() {
            return f64::INFINITY;
        }
        e += n_seg as f64 * delta.inner_re(&delta) * smin.powi(-2);
    }
    e
}

/// Energy and its gradient with respect to the interior nodes.
fn chain_energy_grad(nodes: &[MatrixRC], cluster_tol: f64) -> Result<(f64, Vec<MatrixRC>)> {
    let n_seg = nodes.len() - 1;
    let nf = n_seg as f64;
    let shape = &nodes[0];
    let mut e = 0.0;
    let mut grads: Vec<MatrixRC> =
        vec![MatrixRC::zeros(shape.field(), shape.rows(), shape.cols()); nodes.len()];
    for i in 0..n_seg {
        let delta = &nodes[i + 1] - &nodes[i];
        let mid = nodes[i].axpy(0.5, &delta);
        let (al, gal) = alpha_and_subgrad(&mid, cluster_tol)?;
        let d2 = delta.inner_re(&delta);
        e += nf * d2 * al;
        // d/dA_i ||delta||^2 = -2 delta ; d/dA_{i+1} = +2 delta ; midpoint
        // passes half of grad alpha to each endpoint.
        let half = gal.scale(0.5 * nf * d2);
        grads[i] = grads[i].axpy(-2.0 * nf * al, &delta).axpy(1.0, &half);
        grads[i + 1] = grads[i + 1].axpy(2.0 * nf * al, &delta).axpy(1.0, &half);
    }
    Ok((e, grads))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Limited-memory BFGS with Armijo backtracking over the flattened interior
/// nodes.
struct LbfgsOutcome {
    x: Vec<f64>,
    grad_norm: f64,
    iterations: usize,
}

/// Sufficient-decrease test with an exact-monotonicity fallback: when the
/// Armijo margin shrinks below the floating-point resolution of the energy,
/// plain non-increase is the only decrease that can still be measured.
fn armijo_accept(e: f64, et: f64, t: f64, slope: f64) -> bool {
    const C1: f64 = 1e-4;
    let margin = C1 * t * slope;
    if margin.abs() < 1e-14 * (1.0 + e.abs()) {
        et <= e
    } else {
        et <= e + margin
    }
}

fn lbfgs<E, G>(mut x: Vec<f64>, tol: f64, max_iters: usize, energy: E, grad: G) -> LbfgsOutcome
where
    E: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    const MEMORY: usize = 16;
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        std::collections::VecDeque::new();
    let mut e = energy(&x);
    let mut g = grad(&x);
    let mut gn = norm(&g);
    let mut iters = 0;
    while gn > tol && iters < max_iters {
        iters += 1;
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            for di in d.iter_mut() {
                *di *= gamma;
            }
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hist.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
        }
        // backtracking line search
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            let et = energy(&xt);
            if armijo_accept(e, et, t, slope) {
                assert!(et <= e, "energy must not increase on accepted steps");
                let g_new = grad(&xt);
                let s: Vec<f64> = d.iter().map(|di| t * di).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-10 * norm(&s) * norm(&y) {
                    if hist.len() == MEMORY {
                        hist.pop_front();
                    }
                    let rho = 1.0 / sy;
                    hist.push_back((s, y, rho));
                }
                x = xt;
                e = et;
                g = g_new;
                gn = norm(&g);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if hist.is_empty() {
                break; // no measurable descent direction remains
            }
            hist.clear();
        }
    }
    LbfgsOutcome {
        x,
        grad_norm: gn,
        iterations: iters,
    }
}

fn straight_seed(a: &MatrixRC, b: &MatrixRC, n_segments: usize) -> Result<Vec<MatrixRC>> {
    let delta = b - a;
    let nodes: Vec<MatrixRC> = (0..=n_segments)
        .map(|i| a.axpy(i as f64 / n_segments as f64, &delta))
        .collect();
    for node in &nodes {
        if sigma_min(node) <= SINGULAR_REL_TOL * node.norm() {
            return Err(Error::SeedSingular);
        }
    }
    Ok(nodes)
}

fn assemble_result(
    nodes: Vec<MatrixRC>,
    grad_norm: f64,
    iterations: usize,
    tol: f64,
) -> Result<GeodesicResult> {
    let raw = DiscretePath::new(nodes)?;
    let path = if condition_length(&raw)? > 0.0 {
        reparametrize_arclength(&raw)?
    } else {
        raw
    };
    let length_kappa = condition_length(&path)?;
    let condition_speed = condition_speeds(&path)?;
    Ok(GeodesicResult {
        path,
        length_kappa,
        grad_norm,
        iterations,
        condition_speed,
        converged: grad_norm <= tol,
        tol,
    })
}

/// Local minimizer of the discrete condition energy between fixed endpoints,
/// seeded with the straight segment and returned at uniform condition speed.
pub fn minimize_path(
    a: &MatrixRC,
    b: &MatrixRC,
    n_segments: usize,
    opts: &MinimizeOpts,
) -> Result<GeodesicResult> {
    if !a.same_shape(b) || a.field() != b.field() {
        return Err(Error::ShapeMismatch("endpoints disagree".into()));
    }
    if n_segments == 0 {
        return Err(Error::InvalidInput("need at least one segment".into()));
    }
    let nodes = straight_seed(a, b, n_segments)?;
    if (b - a).norm() == 0.0 || n_segments == 1 {
        return assemble_result(nodes, 0.0, 0, opts.tol);
    }

    let packing = Packing {
        field: a.field(),
        n: a.rows(),
        m: a.cols(),
    };
    let dof = packing.dof();
    let interior = n_segments - 1;
    let mut x0 = vec![0.0; interior * dof];
    for i in 0..interior {
        packing.write(&nodes[i + 1], &mut x0[i * dof..(i + 1) * dof]);
    }

    let unpack = |x: &[f64]| -> Vec<MatrixRC> {
        let mut all = Vec::with_capacity(n_segments + 1);
        all.push(a.clone());
        for i in 0..interior {
            all.push(packing.read(&x[i * dof..(i + 1) * dof]));
        }
        all.push(b.clone());
        all
    };

    let energy = |x: &[f64]| chain_energy(&unpack(x));
    let grad = |x: &[f64]| {
        let all = unpack(x);
        let (_, grads) = chain_energy_grad(&all, opts.cluster_tol)
            .expect("gradient evaluated at a feasible iterate");
        let mut flat = vec![0.0; interior * dof];
        for i in 0..interior {
            packing.write(&grads[i + 1], &mut flat[i * dof..(i + 1) * dof]);
        }
        flat
    };

    let out = lbfgs(x0, opts.tol, opts.max_iters, energy, grad);
    let result = assemble_result(unpack(&out.x), out.grad_norm, out.iterations, opts.tol)?;
    if !result.converged {
        return Err(Error::NoConvergence {
            residual: out.grad_norm,
            tol: opts.tol,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Integrates the smooth-region geodesic equation
/// `d/dt (alpha(A) A') = 1/2 ||A'||_F^2 grad alpha(A)` from `a0` with initial
/// direction `v0`, normalized so the condition speed `alpha ||A'||^2` is one.
///
/// Classical RK4 on the state `(A, P)` with momentum `P = alpha(A) A'`; the
/// momentum is rescaled onto the unit-speed shell after each step. Stops with
/// a stratum report if `sigma_min` loses simplicity mid-flight.
pub fn shoot_geodesic(
    a0: &MatrixRC,
    v0: &MatrixRC,
    t_end: f64,
    steps: usize,
) -> Result<DiscretePath> {
    shoot_geodesic_with(a0, v0, t_end, steps, DEFAULT_CLUSTER_TOL)
}

pub fn shoot_geodesic_with(
    a0: &MatrixRC,
    v0: &MatrixRC,
    t_end: f64,
    steps: usize,
    cluster_tol: f64,
) -> Result<DiscretePath> {
    if !a0.same_shape(v0) || a0.field() != v0.field() {
        return Err(Error::ShapeMismatch("direction shape disagrees".into()));
    }
    if v0.norm() == 0.0 {
        return Err(Error::InvalidInput("zero initial direction".into()));
    }
    if steps == 0 || t_end <= 0.0 {
        return Err(Error::InvalidInput("need positive horizon and steps".into()));
    }
    let al0 = matcore::alpha(a0)?;
    // unit condition speed: alpha ||A'||^2 = 1
    let v = v0.scale(1.0 / (al0.sqrt() * v0.norm()));
    let mut a = a0.clone();
    let mut p = v.scale(al0);
    let mut nodes = vec![a.clone()];
    let h = t_end / steps as f64;

    // (A, P) -> (A', P') on the smooth region
    let rhs = |a: &MatrixRC, p: &MatrixRC| -> Result<(MatrixRC, MatrixRC)> {
        let f = matcore::svd(a)?;
        if !matcore::sigma_min_is_simple(&f.sigma, cluster_tol) {
            return Err(Error::MultipleSigma);
        }
        let g = matcore::grad_alpha_from_svd(&f, cluster_tol)?;
        let al = f.sigma_min().powi(-2);
        let adot = p.scale(1.0 / al);
        let pdot = g.matrix.scale(0.5 * adot.inner_re(&adot));
        Ok((adot, pdot))
    };

    for step in 0..steps {
        let t = step as f64 * h;
        let stage = |err: Error| -> Error {
            match err {
                Error::MultipleSigma => Error::StratumHit {
                    exit_time: t,
                    partial: Box::new(
                        DiscretePath::new(nodes.clone()).unwrap_or_else(|_| DiscretePath {
                            nodes: vec![a0.clone(), a0.clone()],
                        }),
                    ),
                },
                e => e,
            }
        };
        let (k1a, k1p) = rhs(&a, &p).map_err(stage)?;
        let (k2a, k2p) = rhs(&a.axpy(0.5 * h, &k1a), &p.axpy(0.5 * h, &k1p)).map_err(stage)?;
        let (k3a, k3p) = rhs(&a.axpy(0.5 * h, &k2a), &p.axpy(0.5 * h, &k2p)).map_err(stage)?;
        let (k4a, k4p) = rhs(&a.axpy(h, &k3a), &p.axpy(h, &k3p)).map_err(stage)?;
        a = a
            .axpy(h / 6.0, &k1a)
            .axpy(h / 3.0, &k2a)
            .axpy(h / 3.0, &k3a)
            .axpy(h / 6.0, &k4a);
        p = p
            .axpy(h / 6.0, &k1p)
            .axpy(h / 3.0, &k2p)
            .axpy(h / 3.0, &k3p)
            .axpy(h / 6.0, &k4p);
        // project the momentum back onto the unit-speed shell
        let al = matcore::alpha(&a).map_err(stage)?;
        p = p.scale(al.sqrt() / p.norm());
        nodes.push(a.clone());
    }
    DiscretePath::new(nodes)
}

/// Cumulative fine arc length along the polyline, sampled on `subs`
/// Gauss panels per segment. Returns per-panel boundaries `(tau, s)` flat
/// over all segments plus the total.
struct ArcTable {
    /// `(segment, local tau, cumulative length)` at panel boundaries.
    entries: Vec<(usize, f64, f64)>,
    total: f64,
}

fn arc_table(path: &DiscretePath, subs: usize) -> Result<ArcTable> {
    let mut entries = vec![(0usize, 0.0, 0.0)];
    let mut acc = 0.0;
    for i in 0..path.segments() {
        let a = &path.nodes()[i];
        let b = &path.nodes()[i + 1];
        let delta = b - a;
        let speed = delta.norm();
        let h = 1.0 / subs as f64;
        for k in 0..subs {
            if speed > 0.0 {
                let mut panel = 0.0;
                for g in GAUSS2 {
                    let tau = (k as f64 + g) * h;
                    let pnt = a.axpy(tau, &delta);
                    let s = sigma_min(&pnt);
                    if s <= SINGULAR_REL_TOL * pnt.norm() {
                        return Err(Error::SingularNode { index: i });
                    }
                    panel += 0.5 * h / s;
                }
                acc += panel * speed;
            }
            entries.push((i, (k + 1) as f64 * h, acc));
        }
    }
    Ok(ArcTable {
        entries,
        total: acc,
    })
}

/// Arc position of the point `(segment, tau)` measured with the same panel
/// quadrature as [`arc_table`], refined inside the panel.
fn arc_position(path: &DiscretePath, table: &ArcTable, seg: usize, tau: f64) -> f64 {
    // cumulative up to the panel start, then local Gauss on [start, tau]
    let subs = (table.entries.len() - 1) / path.segments();
    let h = 1.0 / subs as f64;
    let k = ((tau / h).floor() as usize).min(subs - 1);
    let base_idx = seg * subs + k;
    let (_, _, base) = table.entries[base_idx];
    let a = &path.nodes()[seg];
    let b = &path.nodes()[seg + 1];
    let delta = b - a;
    let speed = delta.norm();
    let start = k as f64 * h;
    let width = tau - start;
    if width <= 0.0 || speed == 0.0 {
        return base;
    }
    let mut panel = 0.0;
    for g in GAUSS2 {
        let t = start + g * width;
        let pnt = a.axpy(t, &delta);
        panel += 0.5 * width / sigma_min(&pnt);
    }
    base + panel * speed
}

/// Redistributes the nodes along the polyline so that consecutive nodes are
/// separated by equal condition arc length. The node count and the geometric
/// image of the path are unchanged; only the sampling moves.
pub fn reparametrize_arclength(path: &DiscretePath) -> Result<DiscretePath> {
    let n_seg = path.segments();
    let table = arc_table(path, 32)?;
    if table.total <= 0.0 {
        return Err(Error::InvalidInput(
            "constant path cannot be reparametrized".into(),
        ));
    }
    let mut new_nodes = Vec::with_capacity(n_seg + 1);
    new_nodes.push(path.nodes()[0].clone());
    for j in 1..n_seg {
        let target = table.total * j as f64 / n_seg as f64;
        // bracketing panel by binary search on the cumulative column
        let idx = table
            .entries
            .partition_point(|&(_, _, s)| s < target)
            .clamp(1, table.entries.len() - 1);
        let (seg_lo, tau_lo, _) = table.entries[idx - 1];
        let (seg_hi, tau_hi, _) = table.entries[idx];
        let seg = seg_lo;
        let (mut lo, mut hi) = if seg_lo == seg_hi {
            (tau_lo, tau_hi)
        } else {
            (tau_lo, 1.0)
        };
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if arc_position(path, &table, seg, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = 0.5 * (lo + hi);
        let a = &path.nodes()[seg];
        let delta = &path.nodes()[seg + 1] - a;
        new_nodes.push(a.axpy(tau, &delta));
    }
    new_nodes.push(path.nodes()[n_seg].clone());
    DiscretePath::new(new_nodes)
}
