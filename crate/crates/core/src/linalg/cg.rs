use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sparse::{symmetry_defect, SparseOperator};
use crate::error::{Error, NotConverged, Result};

/// Symmetry defect accepted by the iterative solver.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Fixed reduction block; keeps dot products bitwise reproducible for any thread count.
const DOT_BLOCK: usize = 8192;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: String,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Iterations at which the residual norm grew (monitored, not enforced).
    pub residual_increases: usize,
    pub wall_seconds: f64,
}

/// Symmetric positive-definite preconditioner `z = M⁻¹ r`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);

    fn name(&self) -> &str;
}

/// Inverse diagonal.
pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &SparseOperator) -> Result<Self> {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(i, d)| if d > 0.0 { Ok(1.0 / d) } else { Err(Error::ZeroPivot { row: i, value: d }) })
            .collect::<Result<_>>()?;
        Ok(Jacobi { inv_diag })
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }

    fn name(&self) -> &str {
        "jacobi"
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    if a.len() < 2 * DOT_BLOCK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partial: Vec<f64> = a
        .par_chunks(DOT_BLOCK)
        .zip(b.par_chunks(DOT_BLOCK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    if y.len() < 2 * DOT_BLOCK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    } else {
        y.par_chunks_mut(DOT_BLOCK)
            .zip(x.par_chunks(DOT_BLOCK))
            .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += alpha * xi));
    }
}

/// Conjugate gradients with Jacobi preconditioning from a zero initial guess.
pub fn solve_spd(a: &SparseOperator, b: &[f64], tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveReport)> {
    let jacobi = Jacobi::new(a)?;
    solve_spd_with(a, b, &jacobi, tol, maxit)
}

/// Preconditioned conjugate gradients from a zero initial guess; stops once
/// `‖b − Ax‖₂ ≤ tol·‖b‖₂`.
pub fn solve_spd_with(
    a: &SparseOperator,
    b: &[f64],
    precond: &dyn Preconditioner,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if b.len() != a.dim() {
        return Err(Error::InvalidParameter(format!(
            "right-hand side has length {}, operator dimension is {}",
            b.len(),
            a.dim()
        )));
    }
    if !a.is_symmetric() {
        let defect = symmetry_defect(a);
        if defect > SYMMETRY_TOL {
            return Err(Error::Asymmetric(defect));
        }
    }
    let n = a.dim();
    let mut x = vec![0.0; n];
    let b_norm = norm(b);
    let report = |iterations, rel, increases| SolveReport {
        method: format!("pcg-{}", precond.name()),
        iterations,
        relative_residual: rel,
        residual_increases: increases,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    if b_norm == 0.0 {
        return Ok((x, report(0, 0.0, 0)));
    }

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = 1.0;
    let mut best = (f64::INFINITY, x.clone());
    let mut increases = 0;

    for it in 1..=maxit {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::ZeroPivot { row: it, value: pap });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let new_res = norm(&r) / b_norm;
        if new_res > res {
            increases += 1;
        }
        res = new_res;
        if res < best.0 {
            best.0 = res;
            best.1.copy_from_slice(&x);
        }
        if res <= tol {
            return Ok((x, report(it, res, increases)));
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        if p.len() < 2 * DOT_BLOCK {
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        } else {
            p.par_chunks_mut(DOT_BLOCK)
                .zip(z.par_chunks(DOT_BLOCK))
                .for_each(|(pc, zc)| pc.iter_mut().zip(zc).for_each(|(pi, zi)| *pi = zi + beta * *pi));
        }
    }
    Err(Error::NotConverged(Box::new(NotConverged { iterations: maxit, residual: best.0, best: best.1 })))
}
