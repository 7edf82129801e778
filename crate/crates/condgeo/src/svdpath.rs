//! Smooth SVD continuation along a path inside one multiplicity stratum.
//!
//! For a smooth path `gamma(t)` whose singular-value multiplicities stay
//! constant, the factors of `gamma = U Sigma V^*` evolve by a non-autonomous
//! ODE. With `M = U^* gamma' V`, the skew generators `A = U^* U'` and
//! `B = V^* V'` have off-diagonal cluster blocks
//!
//! ```text
//! A_ij = (s_j M_ij + s_i M_ji^*) / (s_j^2 - s_i^2)
//! B_ij = (s_i M_ij + s_j M_ji^*) / (s_j^2 - s_i^2)
//! ```
//!
//! while on the diagonal blocks `s_i' = Re trace(M_ii) / k_i` and
//! `A_ii = -B_ii = (M_ii - s_i' I) / (2 s_i)`. The derivative `s_i'` is the
//! real trace projection: it is the unique choice that leaves `A_ii`
//! skew-hermitian, so the defect of that property is tracked as a diagnostic.
//! Integration is classical RK4 with a polar retraction of `U, V` onto the
//! unitary group after every accepted step.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{self, Field, MatrixRC};
use crate::strata::MultiplicitySignature;

/// A path of matrices on `[t0, t1]`: either a callable sampled with
/// finite-difference derivatives, or a node list with cubic (Catmull-Rom)
/// interpolation and analytic derivatives.
pub struct PathSpec {
    t0: f64,
    t1: f64,
    kind: PathKind,
}

enum PathKind {
    Callable(Box<dyn Fn(f64) -> MatrixRC + Send + Sync>),
    Nodes { nodes: Vec<MatrixRC> },
}

impl PathSpec {
    /// Path from a closure; it must be evaluable on a small neighborhood of
    /// `[t0, t1]` since derivatives are central differences.
    pub fn from_fn<F>(t0: f64, t1: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> MatrixRC + Send + Sync + 'static,
    {
        if !(t1 > t0) {
            return Err(Error::InvalidInput("need t1 > t0".into()));
        }
        Ok(PathSpec {
            t0,
            t1,
            kind: PathKind::Callable(Box::new(f)),
        })
    }

    /// Path through nodes at uniform times, cubically interpolated.
    pub fn from_nodes(t0: f64, t1: f64, nodes: Vec<MatrixRC>) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::InvalidInput("need t1 > t0".into()));
        }
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("need at least two nodes".into()));
        }
        let first = &nodes[0];
        if nodes
            .iter()
            .any(|x| !x.same_shape(first) || x.field() != first.field())
        {
            return Err(Error::ShapeMismatch("path nodes disagree".into()));
        }
        Ok(PathSpec {
            t0,
            t1,
            kind: PathKind::Nodes { nodes },
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    /// Catmull-Rom slope at a node (one-sided at the ends), in node units.
    fn node_slope(nodes: &[MatrixRC], i: usize) -> MatrixRC {
        let last = nodes.len() - 1;
        if i == 0 {
            &nodes[1] - &nodes[0]
        } else if i == last {
            &nodes[last] - &nodes[last - 1]
        } else {
            (&nodes[i + 1] - &nodes[i - 1]).scale(0.5)
        }
    }

    fn locate(&self, t: f64, count: usize) -> (usize, f64, f64) {
        let span = self.t1 - self.t0;
        let h = span / (count - 1) as f64;
        let s = ((t - self.t0) / h).clamp(0.0, (count - 1) as f64 - 1e-12);
        let seg = s.floor() as usize;
        (seg, s - seg as f64, h)
    }

    pub fn sample(&self, t: f64) -> MatrixRC {
        match &self.kind {
            PathKind::Callable(f) => f(t),
            PathKind::Nodes { nodes } => {
                let (i, tau, _) = self.locate(t, nodes.len());
                let m0 = Self::node_slope(nodes, i);
                let m1 = Self::node_slope(nodes, i + 1);
                let t2 = tau * tau;
                let t3 = t2 * tau;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + tau;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                nodes[i]
                    .scale(h00)
                    .axpy(h10, &m0)
                    .axpy(h01, &nodes[i + 1])
                    .axpy(h11, &m1)
            }
        }
    }

    pub fn derivative(&self, t: f64) -> MatrixRC {
        match &self.kind {
            PathKind::Callable(f) => {
                let h = 1e-5 * (self.t1 - self.t0);
                (&f(t + h) - &f(t - h)).scale(0.5 / h)
            }
            PathKind::Nodes { nodes } => {
                let (i, tau, h) = self.locate(t, nodes.len());
                let m0 = Self::node_slope(nodes, i);
                let m1 = Self::node_slope(nodes, i + 1);
                let t2 = tau * tau;
                let d00 = 6.0 * t2 - 6.0 * tau;
                let d10 = 3.0 * t2 - 4.0 * tau + 1.0;
                let d01 = -6.0 * t2 + 6.0 * tau;
                let d11 = 3.0 * t2 - 2.0 * tau;
                nodes[i]
                    .scale(d00)
                    .axpy(d10, &m0)
                    .axpy(d01, &nodes[i + 1])
                    .axpy(d11, &m1)
                    .scale(1.0 / h)
            }
        }
    }
}

/// Step control for [`track_svd`].
#[derive(Clone, Debug)]
pub struct StepControl {
    /// Number of output grid intervals on `[t0, t1]`.
    pub steps: usize,
    /// Relative reconstruction residual target per accepted grid point.
    pub residual_tol: f64,
    /// Cluster separation floor: `|s_i^2 - s_j^2| >= gap_tol * s_1^2`.
    pub gap_tol: f64,
    /// Maximum number of step halvings before giving up.
    pub max_halvings: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            steps: 100,
            residual_tol: 1e-8,
            gap_tol: 1e-6,
            max_halvings: 12,
        }
    }
}

/// Tracked factorization snapshots on the output grid.
#[derive(Clone, Debug)]
pub struct SVDTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<MatrixRC>,
    pub v: Vec<MatrixRC>,
    /// Per-cluster singular values at each time.
    pub sigma_distinct: Vec<Vec<f64>>,
    /// Relative reconstruction residual at each time.
    pub residuals: Vec<f64>,
    /// Unitarity defect `max(||U^*U - I||, ||V^*V - I||)` after retraction.
    pub unitary_drifts: Vec<f64>,
    /// Worst skew-hermitian defect of the diagonal generator blocks seen
    /// during integration (should be at round-off level for paths genuinely
    /// inside the stratum).
    pub skew_defect_max: f64,
    signature: MultiplicitySignature,
}

impl SVDTrajectory {
    pub fn signature(&self) -> &MultiplicitySignature {
        &self.signature
    }

    /// Final state `(U, V, sigma_distinct)`.
    pub fn end_state(&self) -> (MatrixRC, MatrixRC, Vec<f64>) {
        (
            self.u.last().unwrap().clone(),
            self.v.last().unwrap().clone(),
            self.sigma_distinct.last().unwrap().clone(),
        )
    }
}

/// Nearest unitary matrix in Frobenius norm: the polar factor `U V^*` of the
/// input's SVD. The input must have all singular values within `0.5` of one.
pub fn retract_unitary(u: &MatrixRC) -> Result<MatrixRC> {
    if u.rows() != u.cols() {
        return Err(Error::ShapeMismatch("retraction needs a square matrix".into()));
    }
    let f = matcore::svd(u)?;
    if f.sigma.iter().any(|&s| (s - 1.0).abs() > 0.5) {
        return Err(Error::NotNearUnitary);
    }
    let polar = f.u.data() * f.v.data().adjoint();
    MatrixRC::from_data(u.field(), polar)
}

fn build_sigma(field: Field, sig: &MultiplicitySignature, m: usize, s: &[f64]) -> MatrixRC {
    let n = sig.n();
    let mut diag = vec![0.0; n];
    for ((&off, &k), &val) in sig.offsets().iter().zip(sig.parts()).zip(s) {
        for p in 0..k {
            diag[off + p] = val;
        }
    }
    MatrixRC::diagonal(field, n, m, &diag).expect("diagonal shape")
}

struct TrackState {
    u: DMatrix<Complex64>,
    v: DMatrix<Complex64>,
    s: Vec<f64>,
}

struct Derivative {
    du: DMatrix<Complex64>,
    dv: DMatrix<Complex64>,
    ds: Vec<f64>,
    skew_defect: f64,
}

fn cluster_gap_ok(s: &[f64], gap_tol: f64) -> bool {
    let s1 = s[0];
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            if (s[i] * s[i] - s[j] * s[j]).abs() < gap_tol * s1 * s1 {
                return false;
            }
        }
    }
    true
}

fn tracking_rhs(
    path: &PathSpec,
    sig: &MultiplicitySignature,
    state: &TrackState,
    t: f64,
    gap_tol: f64,
) -> Result<Derivative> {
    if !cluster_gap_ok(&state.s, gap_tol) {
        return Err(Error::ClusterCollision { t });
    }
    let n = sig.n();
    let m = state.v.nrows();
    let u = sig.distinct();
    let offsets = sig.offsets();
    let parts = sig.parts();
    let gdot = path.derivative(t);
    let mm = state.u.adjoint() * gdot.data() * &state.v;

    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut b = DMatrix::<Complex64>::zeros(m, m);
    let mut ds = vec![0.0; u];
    let mut skew_defect = 0.0f64;

    for i in 0..u {
        let (oi, ki, si) = (offsets[i], parts[i], state.s[i]);
        // diagonal block: trace projection gives s_i'
        let mii = mm.view((oi, oi), (ki, ki));
        let tr_re: f64 = (0..ki).map(|p| mii[(p, p)].re).sum();
        ds[i] = tr_re / ki as f64;
        let mut aii = mii.into_owned();
        for p in 0..ki {
            aii[(p, p)] -= Complex64::new(ds[i], 0.0);
        }
        aii /= Complex64::new(2.0 * si, 0.0);
        let defect = (&aii + aii.adjoint()).norm();
        skew_defect = skew_defect.max(defect);
        a.view_mut((oi, oi), (ki, ki)).copy_from(&aii);
        b.view_mut((oi, oi), (ki, ki)).copy_from(&(-&aii));

        // off-diagonal cluster blocks
        for j in (i + 1)..u {
            let (oj, kj, sj) = (offsets[j], parts[j], state.s[j]);
            let mij = mm.view((oi, oj), (ki, kj)).into_owned();
            let mji_star = mm.view((oj, oi), (kj, ki)).adjoint();
            let denom = Complex64::new(sj * sj - si * si, 0.0);
            let aij = (&mij * Complex64::new(sj, 0.0) + &mji_star * Complex64::new(si, 0.0))
                / denom;
            let bij = (&mij * Complex64::new(si, 0.0) + &mji_star * Complex64::new(sj, 0.0))
                / denom;
            a.view_mut((oi, oj), (ki, kj)).copy_from(&aij);
            a.view_mut((oj, oi), (kj, ki)).copy_from(&(-aij.adjoint()));
            b.view_mut((oi, oj), (ki, kj)).copy_from(&bij);
            b.view_mut((oj, oi), (kj, ki)).copy_from(&(-bij.adjoint()));
        }

        // trailing columns of V beyond the square part
        if m > n {
            let mit = mm.view((oi, n), (ki, m - n)).into_owned();
            let bit = &mit / Complex64::new(-si, 0.0);
            b.view_mut((oi, n), (ki, m - n)).copy_from(&bit);
            b.view_mut((n, oi), (m - n, ki)).copy_from(&(-bit.adjoint()));
        }
    }

    Ok(Derivative {
        du: &state.u * a,
        dv: &state.v * b,
        ds,
        skew_defect,
    })
}

fn rk4_step(
    path: &PathSpec,
    sig: &MultiplicitySignature,
    state: &TrackState,
    t: f64,
    h: f64,
    gap_tol: f64,
) -> Result<(TrackState, f64)> {
    let advance = |k: &Derivative, w: f64| TrackState {
        u: &state.u + &k.du * Complex64::new(w * h, 0.0),
        v: &state.v + &k.dv * Complex64::new(w * h, 0.0),
        s: state
            .s
            .iter()
            .zip(&k.ds)
            .map(|(si, di)| si + w * h * di)
            .collect(),
    };
    let k1 = tracking_rhs(path, sig, state, t, gap_tol)?;
    let k2 = tracking_rhs(path, sig, &advance(&k1, 0.5), t + 0.5 * h, gap_tol)?;
    let k3 = tracking_rhs(path, sig, &advance(&k2, 0.5), t + 0.5 * h, gap_tol)?;
    let k4 = tracking_rhs(path, sig, &advance(&k3, 1.0), t + h, gap_tol)?;
    let sixth = h / 6.0;
    let two = Complex64::new(2.0, 0.0);
    let next = TrackState {
        u: &state.u
            + (&k1.du + &k2.du * two + &k3.du * two + &k4.du) * Complex64::new(sixth, 0.0),
        v: &state.v
            + (&k1.dv + &k2.dv * two + &k3.dv * two + &k4.dv) * Complex64::new(sixth, 0.0),
        s: (0..state.s.len())
            .map(|i| state.s[i] + sixth * (k1.ds[i] + 2.0 * k2.ds[i] + 2.0 * k3.ds[i] + k4.ds[i]))
            .collect(),
    };
    let defect = k1
        .skew_defect
        .max(k2.skew_defect)
        .max(k3.skew_defect)
        .max(k4.skew_defect);
    Ok((next, defect))
}

/// Initial `(U, V, per-cluster sigma)` from a fresh SVD, validated against
/// the signature.
fn initial_state(
    a: &MatrixRC,
    sig: &MultiplicitySignature,
    gap_tol: f64,
) -> Result<TrackState> {
    if sig.n() != a.rows() {
        return Err(Error::ShapeMismatch("signature does not match rows".into()));
    }
    let f = matcore::svd(a)?;
    let mut s = Vec::with_capacity(sig.distinct());
    for (&off, &k) in sig.offsets().iter().zip(sig.parts()) {
        let cluster = &f.sigma[off..off + k];
        let mean = cluster.iter().sum::<f64>() / k as f64;
        let spread = cluster
            .iter()
            .map(|x| (x - mean).abs())
            .fold(0.0f64, f64::max);
        if spread > 1e-6 * f.sigma[0] {
            return Err(Error::InvalidInput(
                "initial singular values inconsistent with the signature".into(),
            ));
        }
        s.push(mean);
    }
    if *s.last().unwrap() <= 0.0 {
        return Err(Error::SingularInput);
    }
    if !cluster_gap_ok(&s, gap_tol) {
        return Err(Error::ClusterCollision { t: 0.0 });
    }
    Ok(TrackState {
        u: f.u.data().clone(),
        v: f.v.data().clone(),
        s,
    })
}

/// Tracks the smooth SVD factorization along `path`, starting from a fresh
/// factorization at `t0`.
pub fn track_svd(
    path: &PathSpec,
    sig: &MultiplicitySignature,
    step: &StepControl,
) -> Result<SVDTrajectory> {
    let a0 = path.sample(path.t0());
    let init = initial_state(&a0, sig, step.gap_tol)?;
    track_svd_from(
        path,
        sig,
        step,
        (
            MatrixRC::from_data(a0.field(), init.u)?,
            MatrixRC::from_data(a0.field(), init.v)?,
            init.s,
        ),
    )
}

/// Tracks from an explicit initial state, so trajectories can be continued
/// (for instance, retraced backwards in the same gauge).
pub fn track_svd_from(
    path: &PathSpec,
    sig: &MultiplicitySignature,
    step: &StepControl,
    initial: (MatrixRC, MatrixRC, Vec<f64>),
) -> Result<SVDTrajectory> {
    if step.steps == 0 {
        return Err(Error::InvalidInput("need at least one step".into()));
    }
    let field = initial.0.field();
    let m = initial.1.rows();
    let mut state = TrackState {
        u: initial.0.data().clone(),
        v: initial.1.data().clone(),
        s: initial.2,
    };
    let grid: Vec<f64> = (0..=step.steps)
        .map(|j| path.t0() + (path.t1() - path.t0()) * j as f64 / step.steps as f64)
        .collect();

    let measure = |state: &TrackState, t: f64| -> Result<(f64, f64)> {
        let u = MatrixRC::from_data(field, state.u.clone())?;
        let v = MatrixRC::from_data(field, state.v.clone())?;
        let sigma = build_sigma(field, sig, m, &state.s);
        let recon = u.data() * sigma.data() * v.data().adjoint();
        let target = path.sample(t);
        let resid = (recon - target.data()).norm() / target.norm().max(1e-300);
        let n = sig.n();
        let ud = (state.u.adjoint() * &state.u - DMatrix::<Complex64>::identity(n, n)).norm();
        let vd = (state.v.adjoint() * &state.v - DMatrix::<Complex64>::identity(m, m)).norm();
        Ok((resid, ud.max(vd)))
    };

    let (r0, d0) = measure(&state, grid[0])?;
    if r0 > step.residual_tol {
        return Err(Error::InvalidInput(
            "initial state does not reconstruct the path start".into(),
        ));
    }

    let mut traj = SVDTrajectory {
        times: vec![grid[0]],
        u: vec![MatrixRC::from_data(field, state.u.clone())?],
        v: vec![MatrixRC::from_data(field, state.v.clone())?],
        sigma_distinct: vec![state.s.clone()],
        residuals: vec![r0],
        unitary_drifts: vec![d0],
        skew_defect_max: 0.0,
        signature: sig.clone(),
    };

    for w in grid.windows(2) {
        let (t_start, t_stop) = (w[0], w[1]);
        let mut t = t_start;
        let mut h = t_stop - t_start;
        while t < t_stop - 1e-15 * (path.t1() - path.t0()).abs() {
            let (candidate, defect) = {
                let mut halvings = 0;
                loop {
                    let (mut cand, defect) = rk4_step(path, sig, &state, t, h, step.gap_tol)?;
                    cand.u = retract_unitary(&MatrixRC::from_data(field, cand.u)?)?
                        .data()
                        .clone();
                    cand.v = retract_unitary(&MatrixRC::from_data(field, cand.v)?)?
                        .data()
                        .clone();
                    let probe = measure(&cand, t + h)?;
                    if probe.0 <= step.residual_tol {
                        break (cand, defect);
                    }
                    halvings += 1;
                    if halvings > step.max_halvings {
                        return Err(Error::StepFailure { t });
                    }
                    h *= 0.5;
                }
            };
            traj.skew_defect_max = traj.skew_defect_max.max(defect);
            state = candidate;
            t += h;
            h = (h * 2.0).min((t_stop - t).max(0.0));
            if h == 0.0 {
                break;
            }
        }
        let (resid, drift) = measure(&state, t_stop)?;
        traj.times.push(t_stop);
        traj.u.push(MatrixRC::from_data(field, state.u.clone())?);
        traj.v.push(MatrixRC::from_data(field, state.v.clone())?);
        traj.sigma_distinct.push(state.s.clone());
        traj.residuals.push(resid);
        traj.unitary_drifts.push(drift);
    }
    Ok(traj)
}
