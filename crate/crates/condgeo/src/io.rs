//! File formats: matrix/variety-point/polynomial-system JSON and CSV traces.
//!
//! Matrix JSON schema (row-major entries):
//!
//! ```json
//! { "n": 2, "m": 3, "field": "real" | "complex",
//!   "re": [ ... n*m ... ], "im": [ ... optional ... ] }
//! ```
//!
//! A variety point extends the schema of its matrix with `"x_re"` (and
//! optionally `"x_im"`) for the kernel representative. Polynomial systems
//! list dense coefficient rows over the graded-lexicographic monomial basis
//! (degree ascending, then lexicographic with `x1 > x2 > ... > xn`) of
//! degrees `1..=d_i`; see [`crate::symmetry::monomials`].

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{segment_condition_lengths, DiscretePath};
use crate::matcore::{alpha, sigma_min, Field, MatrixRC};
use crate::svdpath::SVDTrajectory;
use crate::symmetry::{monomials, PolySystemAtZero};
use crate::variety::{VarietyPath, VarietyPoint};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub m: usize,
    pub field: Field,
    pub re: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &MatrixRC) -> Self {
        let re: Vec<f64> = (0..a.rows())
            .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
            .map(|(i, j)| a.entry(i, j).re)
            .collect();
        let im = match a.field() {
            Field::Real => None,
            Field::Complex => Some(
                (0..a.rows())
                    .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
                    .map(|(i, j)| a.entry(i, j).im)
                    .collect(),
            ),
        };
        MatrixJson {
            n: a.rows(),
            m: a.cols(),
            field: a.field(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<MatrixRC> {
        match (self.field, &self.im) {
            (Field::Real, Some(im)) if im.iter().any(|&x| x != 0.0) => Err(Error::InvalidInput(
                "real-tagged matrix with imaginary entries".into(),
            )),
            (Field::Real, _) => MatrixRC::new_real(self.n, self.m, &self.re),
            (Field::Complex, im) => {
                let zeros;
                let im = match im {
                    Some(v) => v,
                    None => {
                        zeros = vec![0.0; self.re.len()];
                        &zeros
                    }
                };
                MatrixRC::new_complex(self.n, self.m, &self.re, im)
            }
        }
    }
}

/// Variety point: the matrix schema plus the kernel representative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarietyPointJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    pub x_re: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_im: Option<Vec<f64>>,
}

impl VarietyPointJson {
    pub fn from_point(p: &VarietyPoint) -> Self {
        let x_re = p.x().iter().map(|z| z.re).collect();
        let x_im = match p.field() {
            Field::Real => None,
            Field::Complex => Some(p.x().iter().map(|z| z.im).collect()),
        };
        VarietyPointJson {
            matrix: MatrixJson::from_matrix(p.a()),
            x_re,
            x_im,
        }
    }

    pub fn to_point(&self) -> Result<VarietyPoint> {
        let a = self.matrix.to_matrix()?;
        let m = a.cols();
        if self.x_re.len() != m {
            return Err(Error::ShapeMismatch("kernel vector length".into()));
        }
        let x = DVector::from_fn(m, |i, _| {
            Complex64::new(
                self.x_re[i],
                self.x_im.as_ref().map_or(0.0, |v| v[i]),
            )
        });
        VarietyPoint::new(a, x)
    }
}

/// Geodesic output: nodes plus solver diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicJson {
    pub nodes: Vec<MatrixJson>,
    pub length: f64,
    pub diagnostics: DiagnosticsJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
}

impl GeodesicJson {
    pub fn from_result(r: &crate::geodesic::GeodesicResult) -> Self {
        GeodesicJson {
            nodes: r.path.nodes().iter().map(MatrixJson::from_matrix).collect(),
            length: r.length_kappa,
            diagnostics: DiagnosticsJson {
                grad_norm: r.grad_norm,
                iterations: r.iterations,
                converged: r.converged,
                tol: r.tol,
            },
        }
    }

    pub fn to_path(&self) -> Result<DiscretePath> {
        let nodes: Result<Vec<MatrixRC>> = self.nodes.iter().map(|m| m.to_matrix()).collect();
        DiscretePath::new(nodes?)
    }
}

/// Variety geodesic output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarietyGeodesicJson {
    pub nodes: Vec<VarietyPointJson>,
    pub length: f64,
    pub max_kernel_residual: f64,
    pub diagnostics: DiagnosticsJson,
}

impl VarietyGeodesicJson {
    pub fn from_result(r: &crate::variety::VarietyGeodesicResult) -> Self {
        VarietyGeodesicJson {
            nodes: r
                .path
                .nodes()
                .iter()
                .map(VarietyPointJson::from_point)
                .collect(),
            length: r.length_kappa,
            max_kernel_residual: r.max_kernel_residual,
            diagnostics: DiagnosticsJson {
                grad_norm: r.grad_norm,
                iterations: r.iterations,
                converged: r.converged,
                tol: r.tol,
            },
        }
    }

    pub fn to_path(&self) -> Result<VarietyPath> {
        let nodes: Result<Vec<VarietyPoint>> =
            self.nodes.iter().map(|p| p.to_point()).collect();
        VarietyPath::new(nodes?)
    }
}

/// Node list for `svd-track` inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathJson {
    pub nodes: Vec<MatrixJson>,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_t1")]
    pub t1: f64,
}

fn default_t1() -> f64 {
    1.0
}

/// Polynomial system vanishing at the origin, dense graded-lex coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolySystemJson {
    pub degrees: Vec<u32>,
    pub field: Field,
    pub coeffs_re: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs_im: Option<Vec<Vec<f64>>>,
}

impl PolySystemJson {
    pub fn to_system(&self) -> Result<PolySystemAtZero> {
        let n = self.degrees.len();
        if self.coeffs_re.len() != n {
            return Err(Error::ShapeMismatch(
                "one coefficient row per equation".into(),
            ));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, re_row) in self.coeffs_re.iter().enumerate() {
            let want = monomials(n, 1, self.degrees[i]).len();
            if re_row.len() != want {
                return Err(Error::ShapeMismatch(format!(
                    "equation {i}: expected {want} graded-lex coefficients"
                )));
            }
            let row: Vec<Complex64> = (0..want)
                .map(|k| {
                    Complex64::new(
                        re_row[k],
                        self.coeffs_im
                            .as_ref()
                            .and_then(|rows| rows.get(i))
                            .map_or(0.0, |r| r[k]),
                    )
                })
                .collect();
            rows.push(row);
        }
        PolySystemAtZero::new(self.degrees.clone(), self.field, rows)
    }
}

/// Per-node trace rows `(t, sigma_min, log_alpha, speed)` of a discrete path.
pub fn path_trace_rows(path: &DiscretePath) -> Result<Vec<(f64, f64, f64, f64)>> {
    let n = path.segments();
    let lens = segment_condition_lengths(path)?;
    let dt = 1.0 / n as f64;
    let mut rows = Vec::with_capacity(n + 1);
    for (i, node) in path.nodes().iter().enumerate() {
        let speed = if i == 0 {
            lens[0] / dt
        } else if i == n {
            lens[n - 1] / dt
        } else {
            0.5 * (lens[i - 1] + lens[i]) / dt
        };
        rows.push((i as f64 * dt, sigma_min(node), alpha(node)?.ln(), speed));
    }
    Ok(rows)
}

/// Writes the geodesic trace CSV with header `t,sigma_min,log_alpha,speed`.
pub fn write_path_trace_csv<W: std::io::Write>(path: &DiscretePath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "sigma_min", "log_alpha", "speed"])
        .map_err(csv_err)?;
    for (t, s, la, sp) in path_trace_rows(path)? {
        w.serialize((t, s, la, sp)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Variety trace rows use the matrix component for `sigma_min`/`log_alpha`
/// and the product-metric speed.
pub fn write_variety_trace_csv<W: std::io::Write>(
    r: &crate::variety::VarietyGeodesicResult,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "sigma_min", "log_alpha", "speed"])
        .map_err(csv_err)?;
    let nodes = r.path.nodes();
    let n = r.path.segments();
    for (i, p) in nodes.iter().enumerate() {
        let speed = if i == 0 {
            r.condition_speed[0]
        } else if i == n {
            r.condition_speed[n - 1]
        } else {
            0.5 * (r.condition_speed[i - 1] + r.condition_speed[i])
        };
        let t = i as f64 / n as f64;
        w.serialize((t, sigma_min(p.a()), alpha(p.a())?.ln(), speed))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the tracking CSV `t, sigma_1..sigma_u, residual, unitary_drift`.
pub fn write_trajectory_csv<W: std::io::Write>(traj: &SVDTrajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let u = traj.signature().distinct();
    let mut header = vec!["t".to_string()];
    for i in 1..=u {
        header.push(format!("sigma_{i}"));
    }
    header.push("residual".into());
    header.push("unitary_drift".into());
    w.write_record(&header).map_err(csv_err)?;
    for (k, t) in traj.times.iter().enumerate() {
        let mut row = vec![*t];
        row.extend(&traj.sigma_distinct[k]);
        row.push(traj.residuals[k]);
        row.push(traj.unitary_drifts[k]);
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn matrix_json_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(81);
        for field in [Field::Real, Field::Complex] {
            let a = random::gaussian(field, 2, 3, &mut rng);
            let json = serde_json::to_string(&MatrixJson::from_matrix(&a)).unwrap();
            let back: MatrixJson = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_matrix().unwrap(), a);
        }
    }

    #[test]
    fn matrix_json_is_row_major() {
        let json = r#"{"n":2,"m":2,"field":"real","re":[1.0,2.0,3.0,4.0]}"#;
        let m: MatrixJson = serde_json::from_str(json).unwrap();
        let a = m.to_matrix().unwrap();
        assert_eq!(a.entry(0, 1).re, 2.0);
        assert_eq!(a.entry(1, 0).re, 3.0);
    }

    #[test]
    fn variety_point_json_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(82);
        let a = random::gaussian(Field::Complex, 2, 3, &mut rng);
        let p = crate::variety::kernel_point(&a).unwrap();
        let json = serde_json::to_string(&VarietyPointJson::from_point(&p)).unwrap();
        let back: VarietyPointJson = serde_json::from_str(&json).unwrap();
        let q = back.to_point().unwrap();
        assert!((q.x() - p.x()).norm() <= 1e-12);
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let a = MatrixRC::identity(Field::Real, 2);
        let b = MatrixRC::diagonal(Field::Real, 2, 2, &[2.0, 1.0]).unwrap();
        let nodes: Vec<MatrixRC> = (0..=4)
            .map(|i| a.axpy(i as f64 / 4.0, &(&b - &a)))
            .collect();
        let path = DiscretePath::new(nodes).unwrap();
        let mut buf = Vec::new();
        write_path_trace_csv(&path, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,sigma_min,log_alpha,speed");
        assert_eq!(lines.count(), 5);
    }
}
