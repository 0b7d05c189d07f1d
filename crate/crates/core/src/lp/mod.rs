//! LP backend contract used by the cutting-plane loop.

use thiserror::Error;

use crate::model::LinearRow;
use crate::scalar::Scalar;

mod simplex;

pub use simplex::{DualSimplex, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowHandle(pub(crate) u64);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP is infeasible")]
    Infeasible,
    #[error("iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("unknown row handle {0:?}")]
    UnknownRow(RowHandle),
    #[error("numerical trouble: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub objective: T,
    /// Column values.
    pub primal: Vec<T>,
    pub iterations: usize,
}

/// A maximization LP over boxed columns whose rows can be added and removed
/// between solves.
///
/// Implementations keep their basis across row edits so that re-solving after
/// adding violated cuts is cheap. The optimum reported by [`LpBackend::solve`]
/// satisfies every row to `1e-6`.
pub trait LpBackend<T: Scalar> {
    /// Replaces the whole LP with the given columns and no rows.
    fn load_columns(&mut self, objective: &[T], col_lower: &[T], col_upper: &[T]);

    fn add_rows(&mut self, rows: &[LinearRow<T>]) -> Vec<RowHandle>;

    fn remove_rows(&mut self, handles: &[RowHandle]) -> Result<(), LpError>;

    fn solve(&mut self) -> Result<LpSolution<T>, LpError>;

    /// Row activity `a·z` at the last optimum.
    fn row_activity(&self, handle: RowHandle) -> Option<T>;

    fn num_rows(&self) -> usize;
}
