//! Domains, uniform grids, grid functions and discrete measures.
//!
//! Three domain families are supported: an interval, an axis-aligned rectangle and a
//! disk on which every quantity is radial. All of them are meshed with a single uniform
//! spacing `h`. Grid functions ([`Field`]) store a value at every node, boundary nodes
//! included; fields produced by the clamped solver carry zeros there. Ghost values
//! outside the domain are never stored, they are derived from the reflection rule in
//! [`Field::value_with_closure`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for `h` dividing a side length.
const DIVISIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
    DiskRadial { radius: f64 },
}

impl DomainSpec {
    pub fn unit_interval() -> Self {
        DomainSpec::Interval { length: 1.0 }
    }

    pub fn unit_square() -> Self {
        DomainSpec::Rectangle { lx: 1.0, ly: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let sides: &[(&str, f64)] = match self {
            DomainSpec::Interval { length } => &[("L", *length)],
            DomainSpec::Rectangle { lx, ly } => &[("Lx", *lx), ("Ly", *ly)],
            DomainSpec::DiskRadial { radius } => &[("R", *radius)],
        };
        for (name, v) in sides {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidDomain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Spatial dimension of the continuum domain (the disk is two-dimensional even
    /// though its grid is one-dimensional).
    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Rectangle { .. } | DomainSpec::DiskRadial { .. } => 2,
        }
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        match *self {
            DomainSpec::Interval { length } => length,
            DomainSpec::Rectangle { lx, ly } => lx * ly,
            DomainSpec::DiskRadial { radius } => PI * radius * radius,
        }
    }

    /// Smallest side length (radius for the disk).
    pub fn min_side(&self) -> f64 {
        match *self {
            DomainSpec::Interval { length } => length,
            DomainSpec::Rectangle { lx, ly } => lx.min(ly),
            DomainSpec::DiskRadial { radius } => radius,
        }
    }
}

/// Grid node addressed by its axis indices; `j` is always 0 on one-dimensional grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub i: usize,
    pub j: usize,
}

impl Node {
    pub const fn new(i: usize, j: usize) -> Self {
        Node { i, j }
    }

    pub const fn on_line(i: usize) -> Self {
        Node { i, j: 0 }
    }
}

/// A boundary node together with the grid direction pointing into the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryNode {
    pub node: Node,
    pub inward: [isize; 2],
}

impl BoundaryNode {
    /// Node reached after `k` steps along the inward normal, if it lies on the grid.
    pub fn step(&self, grid: &Grid, k: usize) -> Option<Node> {
        let k = k as isize;
        let i = self.node.i as isize + k * self.inward[0];
        let j = self.node.j as isize + k * self.inward[1];
        if i < 0 || j < 0 || i as usize >= grid.nx() || j as usize >= grid.ny() {
            None
        } else {
            Some(Node::new(i as usize, j as usize))
        }
    }
}

/// Uniform structured grid over a [`DomainSpec`].
///
/// Interior unknowns are numbered with the first axis running fastest. On the radial
/// grid the origin is an interior node (index 0) and the outer circle is the only
/// boundary node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    domain: DomainSpec,
    h: f64,
    nx: usize,
    ny: usize,
}

fn cells_along(side: &'static str, length: f64, h: f64) -> Result<usize> {
    let ratio = length / h;
    let n = ratio.round();
    if n < 1.0 || (n * h - length).abs() > DIVISIBILITY_TOL * length {
        return Err(Error::Spacing { side, length, h });
    }
    Ok(n as usize)
}

/// Build a grid of spacing `h` over `domain`.
pub fn build_grid(domain: DomainSpec, h: f64) -> Result<Grid> {
    Grid::new(domain, h)
}

impl Grid {
    pub fn new(domain: DomainSpec, h: f64) -> Result<Self> {
        domain.validate()?;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
        }
        let (nx, ny) = match domain {
            DomainSpec::Interval { length } => (cells_along("L", length, h)? + 1, 1),
            DomainSpec::Rectangle { lx, ly } => (cells_along("Lx", lx, h)? + 1, cells_along("Ly", ly, h)? + 1),
            DomainSpec::DiskRadial { radius } => (cells_along("R", radius, h)? + 1, 1),
        };
        let grid = Grid { domain, h, nx, ny };
        if grid.interior_count() == 0 {
            return Err(Error::InvalidParameter(format!("spacing {h} leaves no interior node")));
        }
        Ok(grid)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node count along the first axis.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Node count along the second axis (1 for one-dimensional grids).
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.domain, DomainSpec::DiskRadial { .. })
    }

    pub fn is_two_dimensional(&self) -> bool {
        matches!(self.domain, DomainSpec::Rectangle { .. })
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Interior node counts per axis.
    pub fn interior_shape(&self) -> (usize, usize) {
        match self.domain {
            DomainSpec::Interval { .. } => (self.nx - 2, 1),
            DomainSpec::Rectangle { .. } => (self.nx.saturating_sub(2), self.ny.saturating_sub(2)),
            DomainSpec::DiskRadial { .. } => (self.nx - 1, 1),
        }
    }

    pub fn interior_count(&self) -> usize {
        let (a, b) = self.interior_shape();
        a * b
    }

    /// Flat storage index of a node.
    pub fn storage_index(&self, node: Node) -> usize {
        node.j * self.nx + node.i
    }

    pub fn node_at(&self, storage: usize) -> Node {
        Node::new(storage % self.nx, storage / self.nx)
    }

    pub fn is_boundary(&self, node: Node) -> bool {
        match self.domain {
            DomainSpec::Interval { .. } => node.i == 0 || node.i == self.nx - 1,
            DomainSpec::Rectangle { .. } => {
                node.i == 0 || node.j == 0 || node.i == self.nx - 1 || node.j == self.ny - 1
            }
            DomainSpec::DiskRadial { .. } => node.i == self.nx - 1,
        }
    }

    /// Position of a node in the unknown vector, `None` for boundary nodes.
    pub fn interior_index(&self, node: Node) -> Option<usize> {
        if self.is_boundary(node) {
            return None;
        }
        Some(match self.domain {
            DomainSpec::Interval { .. } => node.i - 1,
            DomainSpec::Rectangle { .. } => (node.j - 1) * (self.nx - 2) + (node.i - 1),
            DomainSpec::DiskRadial { .. } => node.i,
        })
    }

    pub fn interior_node(&self, k: usize) -> Node {
        match self.domain {
            DomainSpec::Interval { .. } => Node::on_line(k + 1),
            DomainSpec::Rectangle { .. } => {
                let m = self.nx - 2;
                Node::new(k % m + 1, k / m + 1)
            }
            DomainSpec::DiskRadial { .. } => Node::on_line(k),
        }
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.interior_count()).map(move |k| self.interior_node(k))
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.node_count()).map(move |s| self.node_at(s))
    }

    /// Physical coordinates; the radial grid reports `(r, 0)`.
    pub fn coords(&self, node: Node) -> [f64; 2] {
        [node.i as f64 * self.h, node.j as f64 * self.h]
    }

    /// Exact Euclidean distance from a node to the boundary.
    pub fn distance_to_boundary(&self, node: Node) -> f64 {
        let [x, y] = self.coords(node);
        match self.domain {
            DomainSpec::Interval { length } => x.min(length - x).max(0.0),
            DomainSpec::Rectangle { lx, ly } => x.min(lx - x).min(y).min(ly - y).max(0.0),
            DomainSpec::DiskRadial { radius } => (radius - x).max(0.0),
        }
    }

    /// Quadrature weight of a node: trapezoid per axis on intervals and rectangles,
    /// finite-volume cell area on the radial grid.
    pub fn quadrature_weight(&self, node: Node) -> f64 {
        let h = self.h;
        let edge = |k: usize, n: usize| if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        match self.domain {
            DomainSpec::Interval { .. } => h * edge(node.i, self.nx),
            DomainSpec::Rectangle { .. } => h * h * edge(node.i, self.nx) * edge(node.j, self.ny),
            DomainSpec::DiskRadial { radius } => {
                let r = node.i as f64 * h;
                if node.i == 0 {
                    PI * h * h / 4.0
                } else if node.i + 1 == self.nx {
                    PI * (radius * radius - (radius - 0.5 * h).powi(2))
                } else {
                    2.0 * PI * r * h
                }
            }
        }
    }

    /// Boundary nodes on which the clamped trace is defined: both ends of the interval,
    /// the open edges of a rectangle (corners excluded), the outer circle of the disk.
    pub fn boundary_nodes(&self) -> Vec<BoundaryNode> {
        let (nx, ny) = (self.nx, self.ny);
        match self.domain {
            DomainSpec::Interval { .. } => vec![
                BoundaryNode { node: Node::on_line(0), inward: [1, 0] },
                BoundaryNode { node: Node::on_line(nx - 1), inward: [-1, 0] },
            ],
            DomainSpec::Rectangle { .. } => {
                let mut out = Vec::with_capacity(2 * (nx + ny));
                for i in 1..nx - 1 {
                    out.push(BoundaryNode { node: Node::new(i, 0), inward: [0, 1] });
                }
                for j in 1..ny - 1 {
                    out.push(BoundaryNode { node: Node::new(nx - 1, j), inward: [-1, 0] });
                }
                for i in 1..nx - 1 {
                    out.push(BoundaryNode { node: Node::new(i, ny - 1), inward: [0, -1] });
                }
                for j in 1..ny - 1 {
                    out.push(BoundaryNode { node: Node::new(0, j), inward: [1, 0] });
                }
                out
            }
            DomainSpec::DiskRadial { .. } => {
                vec![BoundaryNode { node: Node::on_line(nx - 1), inward: [-1, 0] }]
            }
        }
    }

    /// Edge-midpoint boundary nodes (one per edge on rectangles; the boundary node on
    /// one-dimensional grids). Midpoints are rounded down to a node when the edge has an
    /// odd number of cells.
    pub fn edge_midpoints(&self) -> Vec<BoundaryNode> {
        match self.domain {
            DomainSpec::Rectangle { .. } => {
                let (mi, mj) = ((self.nx - 1) / 2, (self.ny - 1) / 2);
                vec![
                    BoundaryNode { node: Node::new(mi, 0), inward: [0, 1] },
                    BoundaryNode { node: Node::new(self.nx - 1, mj), inward: [-1, 0] },
                    BoundaryNode { node: Node::new(mi, self.ny - 1), inward: [0, -1] },
                    BoundaryNode { node: Node::new(0, mj), inward: [1, 0] },
                ]
            }
            _ => self.boundary_nodes(),
        }
    }

    /// Neighbour pairs used by forward differences, each with its quadrature weight.
    pub(crate) fn forward_edges(&self) -> Vec<(Node, Node, f64)> {
        let h = self.h;
        let mut out = Vec::new();
        match self.domain {
            DomainSpec::Interval { .. } => {
                for i in 0..self.nx - 1 {
                    out.push((Node::on_line(i), Node::on_line(i + 1), h));
                }
            }
            DomainSpec::Rectangle { .. } => {
                for j in 0..self.ny {
                    for i in 0..self.nx {
                        if i + 1 < self.nx {
                            out.push((Node::new(i, j), Node::new(i + 1, j), h * h));
                        }
                        if j + 1 < self.ny {
                            out.push((Node::new(i, j), Node::new(i, j + 1), h * h));
                        }
                    }
                }
            }
            DomainSpec::DiskRadial { .. } => {
                for i in 0..self.nx - 1 {
                    let r_mid = (i as f64 + 0.5) * h;
                    out.push((Node::on_line(i), Node::on_line(i + 1), 2.0 * PI * r_mid * h));
                }
            }
        }
        out
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.domain == other.domain && self.nx == other.nx && self.ny == other.ny && self.h == other.h
    }
}

/// Real-valued grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field { grid: grid.clone(), values: vec![0.0; grid.node_count()] }
    }

    /// Field with the given value at every node, rejecting non-finite entries.
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} node values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Field { grid: grid.clone(), values })
    }

    /// Clamped field: interior unknowns scattered onto the grid, zero on the boundary.
    pub fn from_interior(grid: &Grid, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.interior_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} interior values, got {}",
                grid.interior_count(),
                interior.len()
            )));
        }
        let mut values = vec![0.0; grid.node_count()];
        for (k, &v) in interior.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(k));
            }
            values[grid.storage_index(grid.interior_node(k))] = v;
        }
        Ok(Field { grid: grid.clone(), values })
    }

    /// Sample `f(x, y)` at every node (`y = 0` on one-dimensional grids, `x = r` on the disk).
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = grid
            .nodes()
            .map(|n| {
                let [x, y] = grid.coords(n);
                f(x, y)
            })
            .collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, node: Node) -> f64 {
        self.values[self.grid.storage_index(node)]
    }

    pub fn set(&mut self, node: Node, value: f64) {
        let k = self.grid.storage_index(node);
        self.values[k] = value;
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.grid.interior_nodes().map(|n| self.get(n)).collect()
    }

    pub fn is_clamped(&self) -> bool {
        self.grid.nodes().filter(|n| self.grid.is_boundary(*n)).all(|n| self.get(n) == 0.0)
    }

    /// Value at integer offsets that may fall one layer outside the grid. Ghost values
    /// mirror the node on the other side of the boundary (`u₋₁ = u₁` per axis); on the
    /// radial grid the same reflection is the symmetry condition at the origin.
    pub fn value_with_closure(&self, i: isize, j: isize) -> f64 {
        let reflect = |k: isize, n: usize| -> usize {
            if k < 0 {
                (-k) as usize
            } else if k as usize >= n {
                2 * (n - 1) - k as usize
            } else {
                k as usize
            }
        };
        let ii = reflect(i, self.grid.nx);
        let jj = if self.grid.ny == 1 { 0 } else { reflect(j, self.grid.ny) };
        self.get(Node::new(ii, jj))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        check_same_grid(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field { grid: self.grid.clone(), values })
    }

    /// Maximum absolute value over all stored nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_same_grid(a: &Field, b: &Field) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch("fields live on different grids".into()))
    }
}

/// Trapezoid (finite-volume on the disk) integral of a grid function, including the
/// `2πr` Jacobian on the radial grid.
pub fn discrete_integral(u: &Field) -> f64 {
    let g = u.grid();
    g.nodes().map(|n| g.quadrature_weight(n) * u.get(n)).sum()
}

pub fn distance_to_boundary(grid: &Grid, node: Node) -> f64 {
    grid.distance_to_boundary(node)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub h1_seminorm: f64,
}

pub fn discrete_norms(u: &Field) -> Norms {
    let g = u.grid();
    let l1 = g.nodes().map(|n| g.quadrature_weight(n) * u.get(n).abs()).sum();
    let l2 = g.nodes().map(|n| g.quadrature_weight(n) * u.get(n).powi(2)).sum::<f64>().sqrt();
    let h1 = h1_seminorm(u);
    Norms { l1, l2, linf: u.sup_norm(), h1_seminorm: h1 }
}

/// Forward-difference H¹ seminorm.
pub fn h1_seminorm(u: &Field) -> f64 {
    let g = u.grid();
    let h = g.h();
    g.forward_edges().into_iter().map(|(a, b, w)| w * ((u.get(b) - u.get(a)) / h).powi(2)).sum::<f64>().sqrt()
}

/// Nonnegative right-hand side `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    Constant {
        amp: f64,
    },
    /// Indicator of the closed ball `|x − center| ≤ radius` scaled by `amp`. On the
    /// interval only `center[0]` is used; on the disk the center must be the origin.
    BallIndicator {
        center: [f64; 2],
        radius: f64,
        amp: f64,
    },
    /// Point mass spread over the quadrature cell of one interior node.
    CellDelta {
        node: Node,
        mass: f64,
    },
    #[serde(skip)]
    Samples(Field),
}

impl Forcing {
    pub fn constant(amp: f64) -> Self {
        Forcing::Constant { amp }
    }

    pub fn validate(&self) -> Result<()> {
        let bad =
            |what: &str, v: f64| Err(Error::InvalidForcing(format!("{what} must be finite and nonnegative, got {v}")));
        match self {
            Forcing::Constant { amp } if !(amp.is_finite() && *amp >= 0.0) => bad("amplitude", *amp),
            Forcing::BallIndicator { amp, radius, center } => {
                if !(amp.is_finite() && *amp >= 0.0) {
                    return bad("amplitude", *amp);
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return bad("radius", *radius);
                }
                if !center.iter().all(|c| c.is_finite()) {
                    return Err(Error::InvalidForcing("center must be finite".into()));
                }
                Ok(())
            }
            Forcing::CellDelta { mass, .. } if !(mass.is_finite() && *mass >= 0.0) => bad("mass", *mass),
            Forcing::Samples(f) => match f.values().iter().find(|v| **v < 0.0) {
                Some(v) => bad("sample", *v),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Nodal samples of `f` over the whole grid.
    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        self.validate()?;
        match self {
            Forcing::Constant { amp } => Field::from_fn(grid, |_, _| *amp),
            Forcing::BallIndicator { center, radius, amp } => {
                let c = match grid.domain() {
                    DomainSpec::Interval { .. } => [center[0], 0.0],
                    DomainSpec::Rectangle { .. } => *center,
                    DomainSpec::DiskRadial { .. } => {
                        if center[0] != 0.0 || center[1] != 0.0 {
                            return Err(Error::InvalidForcing(
                                "ball forcing on a radial disk must be centred at the origin".into(),
                            ));
                        }
                        [0.0, 0.0]
                    }
                };
                Field::from_fn(grid, |x, y| {
                    let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
                    if d2 <= radius * radius {
                        *amp
                    } else {
                        0.0
                    }
                })
            }
            Forcing::CellDelta { node, mass } => {
                if node.i >= grid.nx() || node.j >= grid.ny() || grid.is_boundary(*node) {
                    return Err(Error::InvalidForcing(format!(
                        "delta node ({}, {}) is not an interior node",
                        node.i, node.j
                    )));
                }
                let mut f = Field::zeros(grid);
                f.set(*node, mass / grid.quadrature_weight(*node));
                Ok(f)
            }
            Forcing::Samples(f) => {
                if !f.grid().same_as(grid) {
                    return Err(Error::GridMismatch("forcing samples live on another grid".into()));
                }
                Ok(f.clone())
            }
        }
    }

    /// Mass ratio `τ = ∫f / ‖f‖∞`; rejects `f ≡ 0`.
    pub fn tau(&self, grid: &Grid) -> Result<f64> {
        let f = self.sample(grid)?;
        let sup = f.sup_norm();
        let mass = discrete_integral(&f);
        if sup == 0.0 || mass <= 0.0 {
            return Err(Error::Degenerate("forcing vanishes identically; τ is undefined".into()));
        }
        Ok(mass / sup)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval(h: f64) -> Grid {
        Grid::new(DomainSpec::unit_interval(), h).unwrap()
    }

    #[test]
    fn node_counts() {
        let g = interval(0.25);
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.interior_count(), 3);
        let g = Grid::new(DomainSpec::unit_square(), 0.5).unwrap();
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.interior_count(), 1);
        let g = Grid::new(DomainSpec::DiskRadial { radius: 1.0 }, 0.25).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.interior_count(), 4);
    }

    #[test]
    fn non_dividing_spacing_names_side() {
        let err = Grid::new(DomainSpec::unit_interval(), 0.3).unwrap_err();
        assert!(err.to_string().contains("`L`"), "{err}");
        let err = Grid::new(DomainSpec::Rectangle { lx: 1.0, ly: 0.7 }, 0.2).unwrap_err();
        assert!(err.to_string().contains("`Ly`"), "{err}");
        assert!(Grid::new(DomainSpec::Interval { length: -1.0 }, 0.1).is_err());
        assert!(Grid::new(DomainSpec::unit_interval(), 1.0).is_err());
    }

    #[test]
    fn interior_numbering_round_trips() {
        let g = Grid::new(DomainSpec::Rectangle { lx: 1.0, ly: 0.5 }, 0.125).unwrap();
        for k in 0..g.interior_count() {
            assert_eq!(g.interior_index(g.interior_node(k)), Some(k));
        }
        assert_eq!(g.interior_index(Node::new(0, 2)), None);
    }

    #[test]
    fn distances() {
        let g = interval(0.125);
        assert_eq!(g.distance_to_boundary(Node::on_line(2)), 0.25);
        let g = Grid::new(DomainSpec::unit_square(), 0.125).unwrap();
        assert_eq!(g.distance_to_boundary(Node::new(4, 1)), 0.125);
        let g = Grid::new(DomainSpec::DiskRadial { radius: 1.0 }, 0.1).unwrap();
        assert_relative_eq!(g.distance_to_boundary(Node::on_line(9)), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn constant_integrals_are_exact() {
        let g = Grid::new(DomainSpec::unit_square(), 1.0 / 64.0).unwrap();
        let one = Field::from_fn(&g, |_, _| 1.0).unwrap();
        assert_relative_eq!(discrete_integral(&one), 1.0, max_relative = 1e-12);
        let g = Grid::new(DomainSpec::DiskRadial { radius: 1.0 }, 1.0 / 64.0).unwrap();
        let one = Field::from_fn(&g, |_, _| 1.0).unwrap();
        assert_relative_eq!(discrete_integral(&one), PI, max_relative = 1e-12);
    }

    #[test]
    fn ball_indicator_area() {
        let r: f64 = 0.1;
        let exact = PI * r * r;
        let mut errors = Vec::new();
        for h in [1.0 / 64.0, 1.0 / 256.0] {
            let g = Grid::new(DomainSpec::unit_square(), h).unwrap();
            let f = Forcing::BallIndicator { center: [0.3, 0.4], radius: r, amp: 1.0 }.sample(&g).unwrap();
            assert!(f.values().iter().all(|&v| v == 0.0 || v == 1.0));
            let err = (discrete_integral(&f) - exact).abs();
            assert!(err <= 2.0 * PI * r * h, "h={h} err={err}");
            errors.push(err);
        }
        assert!(errors[1] < errors[0]);
    }

    #[test]
    fn norms_of_simple_fields() {
        let g = interval(1.0 / 64.0);
        let z = Field::zeros(&g);
        let n = discrete_norms(&z);
        assert_eq!((n.l1, n.l2, n.linf, n.h1_seminorm), (0.0, 0.0, 0.0, 0.0));

        let p = Field::from_fn(&g, |x, _| x * (1.0 - x)).unwrap();
        assert_eq!(discrete_norms(&p).linf, 0.25);

        let lin = Field::from_fn(&g, |x, _| x).unwrap();
        assert_relative_eq!(h1_seminorm(&lin), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn ghost_values_mirror() {
        let g = interval(0.25);
        let u = Field::from_interior(&g, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(u.value_with_closure(-1, 0), 1.0);
        assert_eq!(u.value_with_closure(5, 0), 3.0);
        assert_eq!(u.value_with_closure(0, 0), 0.0);
        assert!(u.is_clamped());
    }

    #[test]
    fn forcing_rules() {
        let g = Grid::new(DomainSpec::unit_square(), 0.1).unwrap();
        let f = Forcing::CellDelta { node: Node::new(4, 5), mass: 1.0 }.sample(&g).unwrap();
        assert_relative_eq!(f.get(Node::new(4, 5)), 100.0, max_relative = 1e-12);
        assert_eq!(f.values().iter().filter(|v| **v != 0.0).count(), 1);
        assert!(Forcing::constant(-1.0).sample(&g).is_err());
        assert!(matches!(Forcing::constant(0.0).tau(&g), Err(Error::Degenerate(_))));
        assert_relative_eq!(Forcing::constant(2.0).tau(&g).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let g = interval(0.25);
        assert!(matches!(Field::new(&g, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]), Err(Error::NonFinite(2))));
    }
}
