//! Convexity diagnostics: second symmetric difference quotients, discrete
//! convexity verdicts for sampled traces, and the eigenvalue inequality that
//! bounds the second symmetric derivative of `alpha` from below.
//!
//! The central claim under test everywhere in this crate is that
//! `t -> log alpha(A(t))` is convex along condition geodesics; these
//! operations turn sampled traces of that map into verdicts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::GeodesicResult;
use crate::matcore::{alpha, singular_values, MatrixRC, SINGULAR_REL_TOL};

/// Sampled scalar function of time.
#[derive(Clone, Debug)]
pub struct ScalarTrace {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl ScalarTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::ShapeMismatch("times/values length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("times must increase strictly".into()));
        }
        Ok(ScalarTrace {
            times,
            values,
            label: label.into(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same samples in reversed time order (negated times keep them
    /// increasing).
    pub fn reversed(&self) -> ScalarTrace {
        ScalarTrace {
            times: self.times.iter().rev().map(|t| -t).collect(),
            values: self.values.iter().rev().copied().collect(),
            label: self.label.clone(),
        }
    }
}

/// Finite-ladder estimate of the second symmetric upper derivative.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sd2Estimate {
    /// Max of the symmetric quotients over the ladder; a lower estimate of
    /// the limsup.
    pub value: f64,
    /// Set when some quotient exceeds `1/h`, the signature of a divergent
    /// quotient sequence.
    pub diverged: bool,
}

/// Default step ladder `0.1 * 2^-j`, `j = 0..=12`.
pub fn default_h_ladder() -> Vec<f64> {
    (0..=12).map(|j| 0.1 * 0.5f64.powi(j)).collect()
}

/// Max over the ladder of `(f(x+h) + f(x-h) - 2 f(x)) / h^2`.
pub fn sd2_upper<F>(f: F, x: f64, hs: &[f64]) -> Result<Sd2Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if hs.is_empty() || hs.iter().any(|&h| h <= 0.0) {
        return Err(Error::InvalidInput("need positive steps".into()));
    }
    let f0 = f(x)?;
    let mut best = f64::NEG_INFINITY;
    let mut diverged = false;
    for &h in hs {
        let q = (f(x + h)? + f(x - h)? - 2.0 * f0) / (h * h);
        if q.abs() > 1.0 / h {
            diverged = true;
        }
        best = best.max(q);
    }
    Ok(Sd2Estimate {
        value: best,
        diverged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvexWithinTol,
    Violated,
}

/// Outcome of a discrete convexity check.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub min_second_difference: f64,
    /// Interior index attaining the minimum.
    pub worst_index: usize,
    pub verdict: Verdict,
    /// Effective tolerance `tol * (1 + max |value|)` the verdict used.
    pub tol: f64,
}

/// Computes all interior symmetric second differences
/// `(v_{i+1} + v_{i-1} - 2 v_i) / dt^2` of a near-uniform trace and compares
/// the minimum against `-tol * (1 + max |v|)`.
pub fn check_discrete_convexity(trace: &ScalarTrace, tol: f64) -> Result<ConvexityReport> {
    let v = trace.values();
    let t = trace.times();
    if v.len() < 3 {
        return Err(Error::InvalidInput(
            "need at least three samples for second differences".into(),
        ));
    }
    let spacings: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let max_dt = spacings.iter().fold(f64::MIN, |a, &b| a.max(b));
    let min_dt = spacings.iter().fold(f64::MAX, |a, &b| a.min(b));
    if max_dt / min_dt > 1.01 {
        return Err(Error::GridTooIrregular);
    }
    let dt = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let mut min_sd = f64::INFINITY;
    let mut worst = 1;
    for i in 1..v.len() - 1 {
        let sd = (v[i + 1] + v[i - 1] - 2.0 * v[i]) / (dt * dt);
        if sd < min_sd {
            min_sd = sd;
            worst = i;
        }
    }
    let scale = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let tol_eff = tol * (1.0 + scale);
    Ok(ConvexityReport {
        min_second_difference: min_sd,
        worst_index: worst,
        verdict: if min_sd >= -tol_eff {
            Verdict::ConvexWithinTol
        } else {
            Verdict::Violated
        },
        tol: tol_eff,
    })
}

/// Builds the trace `t -> log alpha(A(t))` of a converged geodesic on its
/// uniform condition-arc grid.
pub fn log_alpha_trace(result: &GeodesicResult) -> Result<ScalarTrace> {
    let nodes = result.path.nodes();
    let n = result.path.segments() as f64;
    let mut times = Vec::with_capacity(nodes.len());
    let mut values = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        times.push(i as f64 / n);
        values.push(alpha(node)?.ln());
    }
    ScalarTrace::new(times, values, "log_alpha")
}

/// Verdict for the central log-convexity claim on a converged geodesic.
pub fn verify_selfconvexity(result: &GeodesicResult, tol: f64) -> Result<ConvexityReport> {
    if !result.converged {
        return Err(Error::NotConverged);
    }
    check_discrete_convexity(&log_alpha_trace(result)?, tol)
}

/// Smallest eigenvalue of `A A^* + h^2 B B^*` through the singular values of
/// the concatenation `[A | hB]`.
fn lambda_min_shifted(a: &MatrixRC, b: &MatrixRC, h: f64) -> Result<f64> {
    let n = a.rows();
    let m = a.cols();
    let mut cat = DMatrix::<Complex64>::zeros(n, 2 * m);
    cat.view_mut((0, 0), (n, m)).copy_from(a.data());
    cat.view_mut((0, m), (n, m))
        .copy_from(&(b.data() * Complex64::new(h, 0.0)));
    let wide = MatrixRC::from_data(a.field(), cat)?;
    let smin = *singular_values(&wide).last().unwrap();
    if smin <= SINGULAR_REL_TOL * wide.norm() {
        return Err(Error::SingularInput);
    }
    Ok(smin * smin)
}

/// Verifies, for each step `h`, the concavity-of-`lambda_min` inequality
/// `alpha(A + hB) + alpha(A - hB) >= 2 lambda_min(AA^* + h^2 BB^*)^-1 - 1e-10`
/// that bounds the second symmetric derivative of `alpha` away from `-inf`.
pub fn sd2_lower_bound_check(a: &MatrixRC, b: &MatrixRC, hs: &[f64]) -> Result<bool> {
    if !a.same_shape(b) || a.field() != b.field() {
        return Err(Error::ShapeMismatch("direction shape disagrees".into()));
    }
    for &h in hs {
        let lhs = alpha(&a.axpy(h, b))? + alpha(&a.axpy(-h, b))?;
        let rhs = 2.0 / lambda_min_shifted(a, b, h)?;
        if lhs < rhs - 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}
