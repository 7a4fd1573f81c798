//! Problem description and solver dispatch.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, BandedCholesky, SineTransformPreconditioner, SolveReport, SparseOperator, DEFAULT_TOL};
use crate::mesh::{DomainSpec, Field, Forcing, Grid};
use crate::operators::{assemble_rhs, assemble_system, row_weights, system_residual};

/// Domain, perturbation parameter and load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub eps: f64,
    pub forcing: Forcing,
}

impl ProblemSpec {
    pub fn new(domain: DomainSpec, eps: f64, forcing: Forcing) -> Result<Self> {
        domain.validate()?;
        check_eps(eps)?;
        forcing.validate()?;
        Ok(ProblemSpec { domain, eps, forcing })
    }

    /// Tension form `Δ²u − γΔu = f`, equivalent with `ε = γ^{−1/2}`.
    pub fn from_tension(domain: DomainSpec, gamma: f64, forcing: Forcing) -> Result<Self> {
        Self::new(domain, eps_from_gamma(gamma)?, forcing)
    }
}

pub fn eps_from_gamma(gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    Ok(gamma.powf(-0.5))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Banded Cholesky on one-dimensional grids, sine-transform PCG on rectangles.
    #[default]
    Auto,
    Direct,
    JacobiCg,
    SpectralCg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: SolverMethod,
    pub tol: f64,
    pub maxit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { method: SolverMethod::Auto, tol: DEFAULT_TOL, maxit: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: Field,
    pub report: SolveReport,
}

/// Solve `A x = W f` where `a` is `assemble_system(grid, eps)`.
fn solve_assembled(
    grid: &Grid,
    eps: f64,
    a: &SparseOperator,
    rhs: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let method = match opts.method {
        SolverMethod::Auto if grid.is_two_dimensional() => SolverMethod::SpectralCg,
        SolverMethod::Auto => SolverMethod::Direct,
        m => m,
    };
    match method {
        SolverMethod::Direct => {
            let start = Instant::now();
            let chol = BandedCholesky::factor(a)?;
            let residual = |x: &[f64]| system_residual(grid, eps, x, rhs).expect("dimensions checked by assembly");
            let x = linalg::refine(&chol, chol.solve(rhs), residual);
            let rn: f64 = residual(&x).iter().map(|r| r * r).sum::<f64>().sqrt();
            let bn: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            let report = SolveReport {
                method: "banded-cholesky-refined".into(),
                iterations: 0,
                relative_residual: if bn > 0.0 { rn / bn } else { 0.0 },
                residual_increases: 0,
                wall_seconds: start.elapsed().as_secs_f64(),
            };
            Ok((x, report))
        }
        SolverMethod::JacobiCg => linalg::solve_spd(a, rhs, opts.tol, opts.maxit),
        SolverMethod::SpectralCg => {
            if !grid.is_two_dimensional() {
                return Err(Error::InvalidParameter("the sine-transform preconditioner needs a rectangle".into()));
            }
            let (mx, my) = grid.interior_shape();
            let pre = SineTransformPreconditioner::new(mx, my, grid.h(), eps);
            linalg::solve_spd_with(a, rhs, &pre, opts.tol, opts.maxit)
        }
        SolverMethod::Auto => unreachable!(),
    }
}

/// Solve the clamped problem `ε²Δ²u − Δu = f` on `grid` (`eps = 0`: the membrane
/// problem `−Δu = f`, `u = 0`).
pub fn solve(grid: &Grid, eps: f64, forcing: &Forcing, opts: &SolverOptions) -> Result<Solution> {
    check_eps(eps)?;
    let a = assemble_system(grid, eps)?;
    let weights = row_weights(grid);
    let rhs: Vec<f64> = assemble_rhs(grid, forcing)?.iter().zip(&weights).map(|(f, w)| f * w).collect();
    let (x, report) = solve_assembled(grid, eps, &a, &rhs, opts)?;
    Ok(Solution { field: Field::from_interior(grid, &x)?, report })
}

pub fn solve_limit(grid: &Grid, forcing: &Forcing, opts: &SolverOptions) -> Result<Solution> {
    solve(grid, 0.0, forcing, opts)
}
