//! Direct linear-solver backends behind a common trait, registered by name
//! and selected at runtime through the solver settings.

use thiserror::Error;

use crate::assembly::CsrMatrix;

use super::banded::BandedLu;
use super::dense::DenseLu;

/// Name of the backend used when the settings do not pick one.
pub const DEFAULT_BACKEND: &str = "banded-lu";

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("matrix is singular: zero pivot at reduced column {column}")]
    Singular { column: usize },
    #[error("matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side has {got} entries for a {expected}-row matrix")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("non-finite value produced during factorization")]
    NonFinite,
}

/// A direct solver for sparse non-symmetric systems.
pub trait LinearSolverBackend: Send + Sync {
    /// Registry key, e.g. `banded-lu`.
    fn name(&self) -> &'static str;
    /// One-line description for `--help`-style listings.
    fn description(&self) -> &'static str;
    /// Solves `A x = b`.
    fn solve(&self, matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, BackendError>;
}

/// All registered backends, in presentation order.
pub fn backends() -> Vec<Box<dyn LinearSolverBackend>> {
    vec![Box::new(BandedLu), Box::new(DenseLu)]
}

/// Looks a backend up by its registry name.
pub fn backend_by_name(name: &str) -> Option<Box<dyn LinearSolverBackend>> {
    backends().into_iter().find(|b| b.name() == name)
}

/// Names of all registered backends.
pub fn backend_names() -> Vec<&'static str> {
    backends().iter().map(|b| b.name()).collect()
}
