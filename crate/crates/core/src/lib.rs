//! Computational toolkit for left-invariant G2-structures on the solvable
//! Lie group `G_J = exp(a) ⋉ R^4`.
//!
//! * [`forms`]: exterior algebra, Hodge star and matrix actions on a fixed
//!   oriented orthonormal coframe `e^1..e^7`.
//! * [`liealg`]: the Lie algebras `g_{A,B,C}`, their Chevalley–Eilenberg
//!   differential, Ricci operator and homothety invariant.
//! * [`g2`]: torsion forms, Laplacians and the ERP residual.
//! * [`numberlat`]: lattices in `G_J` from units of totally real quartic fields.
//! * [`coflow`]: Laplacian coflow on the six-parameter coclosed family,
//!   solitons and the bracket-flow ODE.
//! * [`audit`]: numerical re-evaluation of printed claims.

pub mod audit;
pub mod coflow;
pub mod forms;
pub mod g2;
pub mod liealg;
pub mod numberlat;
pub mod numerics;
pub mod ode;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid multi-index {0:?}: indices must be strictly increasing in 1..=7")]
    InvalidMultiIndex(Vec<usize>),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("matrices do not commute (Jacobi identity fails): |[{0}]| = {1:e}")]
    NotCommuting(&'static str, f64),
    #[error("matrix {0} is not traceless: tr = {1:e}")]
    NotTraceless(&'static str, f64),
    #[error("F undefined on flat metrics (Ric = 0)")]
    FlatMetric,
    #[error("ERP residual requires a closed structure (|dφ| = {0:e})")]
    NotClosed(f64),
    #[error("polynomial rejected: {0}")]
    PolynomialRejected(String),
    #[error("not a unit: det = {0}")]
    NotAUnit(i128),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("roots are not separated (min gap {0:e})")]
    RepeatedRoots(f64),
    #[error("matrices do not commute exactly")]
    NonCommutingIntegerMatrices,
    #[error("trajectory diverged at t = {0}")]
    Diverged(f64),
    #[error("trajectory too short: {0}")]
    TrajectoryTooShort(String),
    #[error("trajectory leaves the family (a,a,b,b,c,c): deviation {0:e}")]
    NotInFamily(f64),
    #[error("modified coflow requires m != 0")]
    ZeroM,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
