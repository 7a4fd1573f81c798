//! Discrete Laplacian, clamped biharmonic and the assembled plate operator.
//!
//! The clamped condition is imposed by a single ghost layer whose values mirror the
//! first interior layer (`u₋₁ = u₁` across the boundary node, `u₀ = 0` on it). The
//! biharmonic is never written down as a boundary-modified 13-point stencil; each row is
//! produced by composing the Laplacian stencil with itself through that closure, and
//! symmetry of the result is checked after assembly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compensated_dot, SparseOperator};
use crate::mesh::{BoundaryNode, DomainSpec, Field, Forcing, Grid, Node};

/// Symmetry defect tolerated by [`assemble_system`].
pub const ASSEMBLY_SYMMETRY_TOL: f64 = 1e-12;

/// Second-order Laplacian stencil at a node as `(numerators, denominator)`: the
/// coefficient on each target is `numerator/denominator`. Numerators are exact in
/// binary floating point, which lets residuals be evaluated without rounding the
/// stencil. Targets may lie one layer outside the grid.
fn scaled_laplacian_stencil(grid: &Grid, node: Node) -> (Vec<([isize; 2], f64)>, f64) {
    let h2 = grid.h() * grid.h();
    let (i, j) = (node.i as isize, node.j as isize);
    match grid.domain() {
        DomainSpec::Interval { .. } => (vec![([i - 1, 0], 1.0), ([i, 0], -2.0), ([i + 1, 0], 1.0)], h2),
        DomainSpec::Rectangle { .. } => {
            (vec![([i - 1, j], 1.0), ([i + 1, j], 1.0), ([i, j - 1], 1.0), ([i, j + 1], 1.0), ([i, j], -4.0)], h2)
        }
        DomainSpec::DiskRadial { .. } => {
            if node.i == 0 {
                // u′(0) = 0: Δu(0) = 2u″(0) ≈ 4(u₁ − u₀)/h².
                (vec![([1, 0], 4.0), ([0, 0], -4.0)], h2)
            } else {
                let r = node.i as f64;
                (vec![([i - 1, 0], r - 0.5), ([i, 0], -2.0 * r), ([i + 1, 0], r + 0.5)], r * h2)
            }
        }
    }
}

fn laplacian_stencil(grid: &Grid, node: Node) -> Vec<([isize; 2], f64)> {
    let (terms, den) = scaled_laplacian_stencil(grid, node);
    terms.into_iter().map(|(t, c)| (t, c / den)).collect()
}

/// Apply the clamped closure to a stencil target: mirror ghosts back inside, then map
/// to an interior unknown (`None` for boundary nodes, whose value is 0).
fn resolve(grid: &Grid, target: [isize; 2]) -> Option<usize> {
    let reflect = |k: isize, n: usize| -> usize {
        if k < 0 {
            (-k) as usize
        } else if k as usize >= n {
            2 * (n - 1) - k as usize
        } else {
            k as usize
        }
    };
    let i = reflect(target[0], grid.nx());
    let j = if grid.ny() == 1 { 0 } else { reflect(target[1], grid.ny()) };
    grid.interior_index(Node::new(i, j))
}

/// Laplacian at `node` (interior or boundary) as a combination of interior unknowns.
fn laplacian_row(grid: &Grid, node: Node) -> Vec<(usize, f64)> {
    laplacian_stencil(grid, node).into_iter().filter_map(|(t, c)| resolve(grid, t).map(|k| (k, c))).collect()
}

fn biharmonic_row(grid: &Grid, node: Node) -> Vec<(usize, f64)> {
    let mut row = Vec::with_capacity(25);
    for (t, c) in laplacian_stencil(grid, node) {
        // Neighbours of interior nodes are always on the grid.
        let q = Node::new(t[0] as usize, t[1] as usize);
        row.extend(laplacian_row(grid, q).into_iter().map(|(k, v)| (k, c * v)));
    }
    row
}

/// Row scaling that makes the assembled operator symmetric: 1 on intervals and
/// rectangles, the radial cell area over `2πh²` on the disk (`i` at node `i`, 1/8 at
/// the origin).
pub fn row_weights(grid: &Grid) -> Vec<f64> {
    if grid.is_radial() {
        (0..grid.interior_count()).map(|i| if i == 0 { 0.125 } else { i as f64 }).collect()
    } else {
        vec![1.0; grid.interior_count()]
    }
}

/// Second-order Laplacian at interior nodes using the stored boundary values; the
/// output vanishes on the boundary.
pub fn apply_laplacian(u: &Field) -> Field {
    let grid = u.grid();
    let mut out = Field::zeros(grid);
    for node in grid.interior_nodes() {
        let v = laplacian_stencil(grid, node).into_iter().map(|(t, c)| c * u.value_with_closure(t[0], t[1])).sum();
        out.set(node, v);
    }
    out
}

/// Assemble `ε²B − Δ_h` over interior unknowns (row-weighted on the disk, see
/// [`row_weights`]). `eps = 0` gives the limiting membrane operator.
pub fn assemble_system(grid: &Grid, eps: f64) -> Result<SparseOperator> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
    }
    let eps2 = eps * eps;
    let weights = row_weights(grid);
    let rows = grid.interior_nodes().zip(&weights).map(|(node, &w)| {
        let mut row: Vec<(usize, f64)> = laplacian_row(grid, node).into_iter().map(|(k, v)| (k, -w * v)).collect();
        if eps2 > 0.0 {
            row.extend(biharmonic_row(grid, node).into_iter().map(|(k, v)| (k, w * eps2 * v)));
        }
        row
    });
    let mut a = SparseOperator::from_rows(grid.interior_count(), rows)?;
    a.verify_symmetry(ASSEMBLY_SYMMETRY_TOL)?;
    Ok(a)
}

/// Clamped biharmonic `B` alone (unweighted), mainly for inspection.
pub fn assemble_biharmonic(grid: &Grid) -> Result<SparseOperator> {
    SparseOperator::from_rows(grid.interior_count(), grid.interior_nodes().map(|n| biharmonic_row(grid, n)))
}

/// Residual `rhs − A x` for `A = assemble_system(grid, eps)` and a row-weighted `rhs`.
///
/// The product is formed as `ε² W Δ_h (Δ_h x) − W Δ_h x` with exact stencil numerators
/// and compensated sums, so it does not inherit the rounding of the assembled entries.
/// With `cond(A) ≈ ε²/h⁴` those roundings would otherwise limit the attainable accuracy.
pub fn system_residual(grid: &Grid, eps: f64, x: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    if x.len() != grid.interior_count() || rhs.len() != grid.interior_count() {
        return Err(Error::InvalidParameter(format!(
            "vectors of length {} and {} do not match {} unknowns",
            x.len(),
            rhs.len(),
            grid.interior_count()
        )));
    }
    let u = Field::from_interior(grid, x)?;
    let lap_at = |f: &Field, node: Node| {
        let (terms, den) = scaled_laplacian_stencil(grid, node);
        compensated_dot(terms.into_iter().map(|(t, c)| (c, f.value_with_closure(t[0], t[1])))) / den
    };
    let mut lap = Field::zeros(grid);
    for node in grid.nodes() {
        lap.set(node, lap_at(&u, node));
    }
    let eps2 = eps * eps;
    let weights = row_weights(grid);
    Ok(grid
        .interior_nodes()
        .zip(weights)
        .zip(rhs)
        .map(|((node, w), &b)| {
            let (terms, den) = scaled_laplacian_stencil(grid, node);
            // Stencil targets of interior nodes are grid nodes, so no closure is needed.
            let outer =
                compensated_dot(terms.into_iter().map(|(t, c)| (c, lap.get(Node::new(t[0] as usize, t[1] as usize)))))
                    / den;
            compensated_dot([(1.0, b), (-w * eps2, outer), (w, lap.get(node))].into_iter())
        })
        .collect())
}

/// Nodal samples of `f` at the interior nodes (unweighted).
pub fn assemble_rhs(grid: &Grid, f: &Forcing) -> Result<Vec<f64>> {
    Ok(f.sample(grid)?.interior_values())
}

/// `ε²Δu` on the boundary nodes of a clamped field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub nodes: Vec<BoundaryNode>,
    pub values: Vec<f64>,
    pub l_minus: f64,
    pub l_plus: f64,
    pub m: f64,
}

impl BoundaryTrace {
    pub fn from_values(nodes: Vec<BoundaryNode>, values: Vec<f64>) -> Self {
        let l_minus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let l_plus = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = l_plus.max(0.0).max((-l_minus).max(0.0));
        BoundaryTrace { nodes, values, l_minus, l_plus, m }
    }

    /// Positive part `L⁺₊`.
    pub fn l_plus_pos(&self) -> f64 {
        self.l_plus.max(0.0)
    }

    /// Negative part `L⁻₋`.
    pub fn l_minus_neg(&self) -> f64 {
        (-self.l_minus).max(0.0)
    }

    pub fn argmax(&self) -> Option<BoundaryNode> {
        self.values
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (k, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((k, v)),
            })
            .map(|(k, _)| self.nodes[k])
    }

    pub fn value_at(&self, node: Node) -> Option<f64> {
        self.nodes.iter().position(|b| b.node == node).map(|k| self.values[k])
    }
}

/// One-sided second-order boundary Laplacian `(8u₁ − u₂)/(2h²)`; exact on cubics that
/// vanish with their normal derivative at the boundary.
pub fn one_sided_boundary_laplacian(u: &Field, b: &BoundaryNode) -> Result<f64> {
    let grid = u.grid();
    let (n1, n2) = match (b.step(grid, 1), b.step(grid, 2)) {
        (Some(a), Some(c)) if !grid.is_boundary(a) && !grid.is_boundary(c) => (a, c),
        _ => {
            return Err(Error::InvalidParameter(
                "grid too coarse: fewer than two interior nodes along the boundary normal".into(),
            ))
        }
    };
    let h2 = grid.h() * grid.h();
    Ok((8.0 * u.get(n1) - u.get(n2)) / (2.0 * h2))
}

pub fn boundary_laplacian_trace(u: &Field, eps: f64) -> Result<BoundaryTrace> {
    let nodes = u.grid().boundary_nodes();
    let eps2 = eps * eps;
    let values =
        nodes.iter().map(|b| one_sided_boundary_laplacian(u, b).map(|v| eps2 * v)).collect::<Result<Vec<_>>>()?;
    Ok(BoundaryTrace::from_values(nodes, values))
}

/// Second-order one-sided inward normal derivative `(4u₁ − u₂)/(2h)` at a boundary
/// node of a field vanishing on the boundary; the outward derivative is its negative.
pub fn inward_normal_derivative(u: &Field, b: &BoundaryNode) -> Result<f64> {
    let grid = u.grid();
    match (b.step(grid, 1), b.step(grid, 2)) {
        (Some(n1), Some(n2)) => Ok((4.0 * u.get(n1) - u.get(n2) - 3.0 * u.get(b.node)) / (2.0 * grid.h())),
        _ => Err(Error::InvalidParameter("grid too coarse for a one-sided derivative".into())),
    }
}
