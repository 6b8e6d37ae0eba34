//! Complex sparse storage and direct solvers.

mod csr;
mod lu;
mod matrix_market;
mod ordering;

pub use csr::ComplexSparseMatrix;
pub use lu::{
    lu_factorize, lu_factorize_with, lu_solve, residual_norm, FillStats, LuFactors, LuMethod, SymbolicAnalysis,
    DENSE_THRESHOLD, NEAR_SINGULAR_RATIO,
};
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use ordering::minimum_degree;
