//! Geometry of the condition metric on full-rank `n x m` matrices.
//!
//! The condition metric rescales the Frobenius inner product by
//! `alpha(A) = sigma_min(A)^-2`, so paths are charged for travelling close to
//! the rank-deficient set. This crate computes with that structure:
//!
//! - [`matcore`]: dense real/complex matrices, SVD, the conformal factor
//!   `alpha` and its gradient where the smallest singular value is simple;
//! - [`strata`]: singular-value multiplicity strata, their codimensions and
//!   tangent spaces;
//! - [`svdpath`]: smooth SVD continuation along a path inside one stratum;
//! - [`geodesic`]: condition lengths, discrete variational condition
//!   geodesics, geodesic shooting, arc-length reparametrization;
//! - [`convexity`]: second symmetric difference estimators and log-convexity
//!   verdicts for traces along geodesics;
//! - [`symmetry`]: Killing fields of the unitary action, Hessian-with-symmetry
//!   identity checks, and the weighted condition number of polynomial systems
//!   vanishing at the origin;
//! - [`variety`]: the solution variety `{(A, x) : Ax = 0}` with its own
//!   condition lengths and geodesics;
//! - [`cli`]: the `condgeo` command-line front end for seeded, reproducible
//!   experiments.
//!
//! Start with the `examples/` directory: each file is a runnable tour of one
//! capability (`cargo run --example condition_geodesic`).

pub mod cli;
pub mod convexity;
pub mod error;
pub mod geodesic;
pub mod io;
pub mod matcore;
pub mod random;
pub mod strata;
pub mod svdpath;
pub mod symmetry;
pub mod variety;

pub use error::{Error, Result};
pub use matcore::{Field, MatrixRC};
