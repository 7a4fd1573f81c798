//! Sparse symmetric positive-definite solves and matrix diagnostics.

mod banded;
mod cg;
mod sparse;
mod spectral;

pub use banded::{refine, solve_banded_direct, BandedCholesky, MAX_BANDWIDTH, REFINEMENT_STEPS};
pub use cg::{solve_spd, solve_spd_with, Jacobi, Preconditioner, SolveReport, DEFAULT_TOL, SYMMETRY_TOL};
pub use sparse::{compensated_dot, symmetry_defect, SparseOperator};
pub use spectral::{dirichlet_eigenvalues, SineTransformPreconditioner};
