//! Quantities tracked in the small-ε analysis of the clamped plate.
//!
//! Everything here works on solved grid functions: `u_eps` solves the plate problem,
//! `u0` the membrane problem `−Δu₀ = f` on the same grid, and `v = u_eps − u0`.
//! Boundary traces are `ε²Δu_eps` on ∂Ω with extrema `L⁻ ≤ L⁺` and
//! `M = max(L⁺₊, L⁻₋)`. Near a boundary point `x₀` the rescaled solution
//! `u_eps(x₀ + εsν)/M` approaches `β(e^{−s} − 1 + s)` with `β = |∂_ν u0(x₀)|·ε/M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::HalfspaceProfile;
use crate::linalg::SolveReport;
use crate::mesh::{self, check_same_grid, discrete_integral, BoundaryNode, Field, Forcing, Grid, Node};
use crate::operators::{self, apply_laplacian, inward_normal_derivative, one_sided_boundary_laplacian};
use crate::problem::{self, Solution, SolverOptions};

pub use crate::operators::BoundaryTrace;

/// Collar width as a multiple of ε; `e^{−8} < 10⁻³`.
pub const COLLAR_WIDTH_IN_EPS: f64 = 8.0;

/// Depth of the blow-up samples, in units of ε.
pub const BLOWUP_DEPTH_IN_EPS: f64 = 5.0;

/// Discretisation allowance factor: tolerances are `10·h²` times the relevant scale.
pub const ALLOWANCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub is_nonneg: bool,
    pub min: f64,
    pub argmin: Node,
}

/// Interior minimum of `u`; nonnegative means `min ≥ −postol·‖u‖∞`.
pub fn positivity_report(u: &Field, postol: f64) -> PositivityReport {
    let grid = u.grid();
    let (argmin, min) = grid
        .interior_nodes()
        .map(|n| (n, u.get(n)))
        .fold((grid.interior_node(0), f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    PositivityReport { is_nonneg: min >= -postol * u.sup_norm(), min, argmin }
}

/// Default positivity tolerance `10·h²`.
pub fn default_postol(grid: &Grid) -> f64 {
    ALLOWANCE_FACTOR * grid.h() * grid.h()
}

/// `min u/d(·,∂Ω)` over interior nodes.
pub fn hopf_constant(u: &Field) -> f64 {
    let grid = u.grid();
    grid.interior_nodes().map(|n| u.get(n) / grid.distance_to_boundary(n)).fold(f64::INFINITY, f64::min)
}

/// `Δ_h u` at every node: the five-point (or radial) stencil inside, the one-sided
/// clamped formula on boundary nodes, zero at rectangle corners.
pub fn laplacian_with_trace(u: &Field) -> Result<Field> {
    let mut lap = apply_laplacian(u);
    for b in u.grid().boundary_nodes() {
        lap.set(b.node, one_sided_boundary_laplacian(u, &b)?);
    }
    Ok(lap)
}

/// `∫ (Δ_h u)₊` over the nodes within `collar_width` of the boundary.
pub fn collar_positive_laplacian_mass(u: &Field, collar_width: f64) -> Result<f64> {
    let grid = u.grid();
    if !(collar_width >= 2.0 * grid.h()) {
        return Err(Error::InvalidParameter(format!("collar width {collar_width} is below two grid spacings")));
    }
    let lap = laplacian_with_trace(u)?;
    Ok(grid
        .nodes()
        .filter(|&n| grid.distance_to_boundary(n) <= collar_width)
        .map(|n| grid.quadrature_weight(n) * lap.get(n).max(0.0))
        .sum())
}

/// `∫ (Δ_h u)₊` over the whole domain.
pub fn positive_laplacian_mass(u: &Field) -> Result<f64> {
    collar_positive_laplacian_mass(u, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceMetrics {
    /// H¹ seminorm of `v = u_eps − u0`.
    pub h1_v: f64,
    /// L² norm of `ε·Δ_h u_eps`.
    pub l2_eps_lap: f64,
}

pub fn convergence_metrics(u_eps: &Field, u0: &Field, eps: f64) -> Result<ConvergenceMetrics> {
    check_same_grid(u_eps, u0)?;
    let v = u_eps.sub(u0)?;
    let lap = laplacian_with_trace(u_eps)?.map(|x| eps * x);
    Ok(ConvergenceMetrics { h1_v: mesh::h1_seminorm(&v), l2_eps_lap: mesh::discrete_norms(&lap).l2 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub satisfied: bool,
    /// Worst signed margin over the checked nodes (negative means violated).
    pub slack: f64,
    #[serde(skip)]
    pub allowance: f64,
    #[serde(skip)]
    pub worst_node: Option<Node>,
}

impl BoundCheck {
    fn evaluate(name: &str, grid: &Grid, margins: impl Iterator<Item = (Node, f64)>, scale: f64) -> BoundCheck {
        let (worst_node, slack) =
            margins.fold((None, f64::INFINITY), |(bn, bm), (n, m)| if m < bm { (Some(n), m) } else { (bn, bm) });
        let slack = if slack.is_finite() { slack } else { 0.0 };
        let allowance = ALLOWANCE_FACTOR * grid.h() * grid.h() * scale;
        BoundCheck { name: name.into(), satisfied: slack >= -allowance, slack, allowance, worst_node }
    }
}

/// Nodewise maximum-principle bounds:
///
/// * `v_bounds`: `−L⁺₊ − ε²‖f‖∞ ≤ v ≤ L⁻₋`;
/// * `u_lower`: `u_eps > −L⁺₊`;
/// * `lap_bounds`: `−L⁻₋ − ε²‖f‖∞ ≤ ε²Δu_eps ≤ L⁺₊`.
///
/// Each check passes when its worst margin is above `−10h²·scale`, the scale being the
/// largest magnitude involved.
pub fn bound_checks(
    u_eps: &Field,
    u0: &Field,
    f: &Forcing,
    trace: &BoundaryTrace,
    eps: f64,
) -> Result<Vec<BoundCheck>> {
    check_same_grid(u_eps, u0)?;
    let grid = u_eps.grid();
    let f_sup = f.sample(grid)?.sup_norm();
    let eps2 = eps * eps;
    let (lp, lm) = (trace.l_plus_pos(), trace.l_minus_neg());
    let v = u_eps.sub(u0)?;
    let lap = apply_laplacian(u_eps).map(|x| eps2 * x);

    let v_lo = -lp - eps2 * f_sup;
    let v_hi = lm;
    let v_check = BoundCheck::evaluate(
        "v_bounds",
        grid,
        grid.interior_nodes().map(|n| (n, (v.get(n) - v_lo).min(v_hi - v.get(n)))),
        v.sup_norm().max(v_lo.abs()).max(v_hi),
    );
    let u_check = BoundCheck::evaluate(
        "u_lower",
        grid,
        grid.interior_nodes().map(|n| (n, u_eps.get(n) + lp)),
        u_eps.sup_norm().max(lp),
    );
    let l_lo = -lm - eps2 * f_sup;
    let l_hi = lp;
    let lap_check = BoundCheck::evaluate(
        "lap_bounds",
        grid,
        grid.interior_nodes().map(|n| (n, (lap.get(n) - l_lo).min(l_hi - lap.get(n)))),
        lap.sup_norm().max(l_lo.abs()).max(l_hi),
    );
    Ok(vec![v_check, u_check, lap_check])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupProfile {
    pub x0: BoundaryNode,
    pub m: f64,
    /// Rescaled depths `s_k = t_k/ε`.
    pub s: Vec<f64>,
    /// `u_eps(x₀ + t_k ν)/M`.
    pub values: Vec<f64>,
    pub beta: f64,
    /// `sup_k |values_k − β(e^{−s_k} − 1 + s_k)|`.
    pub residual: f64,
}

impl BlowupProfile {
    /// One-sided second difference of the rescaled samples at `s = 0`, comparable to β.
    pub fn second_difference_at_boundary(&self) -> Option<f64> {
        if self.s.len() < 3 {
            return None;
        }
        let ds = self.s[1] - self.s[0];
        Some((8.0 * self.values[1] - self.values[2]) / (2.0 * ds * ds))
    }

    pub fn profile(&self) -> HalfspaceProfile {
        HalfspaceProfile::new(self.beta)
    }
}

/// `|∂_ν u0(x₀)|·ε/M`.
pub fn beta_estimate(u0: &Field, x0: &BoundaryNode, eps: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Degenerate("boundary trace vanishes (M = 0)".into()));
    }
    Ok(inward_normal_derivative(u0, x0)?.abs() * eps / m)
}

/// Sample `u_eps/M` along the inward normal at `x0` down to `depth_in_eps·ε` and compare
/// with the half-space profile.
pub fn blowup_profile(
    u_eps: &Field,
    u0: &Field,
    eps: f64,
    x0: &BoundaryNode,
    depth_in_eps: f64,
) -> Result<BlowupProfile> {
    check_same_grid(u_eps, u0)?;
    let grid = u_eps.grid();
    let h = grid.h();
    if !(eps > 0.0 && h <= eps / 4.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "boundary layer unresolved: h = {h} exceeds eps/4 = {}",
            eps / 4.0
        )));
    }
    let trace = operators::boundary_laplacian_trace(u_eps, eps)?;
    let m = trace.m;
    let beta = beta_estimate(u0, x0, eps, m)?;
    let steps = (depth_in_eps * eps / h + 1e-9).floor() as usize;
    let profile = HalfspaceProfile::new(beta);
    let mut s = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let node = match x0.step(grid, k) {
            Some(n) if k == 0 || !grid.is_boundary(n) => n,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "domain too small for a blow-up depth of {depth_in_eps}·eps"
                )))
            }
        };
        s.push(k as f64 * h / eps);
        values.push(u_eps.get(node) / m);
    }
    let residual = s.iter().zip(&values).map(|(&sk, &vk)| (vk - profile.value(sk)).abs()).fold(0.0, f64::max);
    Ok(BlowupProfile { x0: *x0, m, s, values, beta, residual })
}

/// Boundary point used for the blow-up: on rectangles the edge midpoint with the largest
/// trace, otherwise the node where the trace is largest.
pub fn blowup_anchor(grid: &Grid, trace: &BoundaryTrace) -> Option<BoundaryNode> {
    if grid.is_two_dimensional() {
        grid.edge_midpoints()
            .into_iter()
            .fold(None, |best: Option<(BoundaryNode, f64)>, b| {
                let v = trace.value_at(b.node).unwrap_or(f64::NEG_INFINITY);
                match best {
                    Some((_, bv)) if bv >= v => best,
                    _ => Some((b, v)),
                }
            })
            .map(|(b, _)| b)
    } else {
        trace.argmax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares fit of `log M` against `log ε`.
pub fn asymptotic_slope(pairs: &[(f64, f64)]) -> Result<SlopeFit> {
    if pairs.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 (eps, M) pairs, got {}", pairs.len())));
    }
    if pairs.windows(2).any(|w| !(w[1].0 < w[0].0)) || pairs.iter().any(|p| !(p.0 > 0.0)) {
        return Err(Error::InvalidParameter("eps values must be positive and strictly decreasing".into()));
    }
    if let Some(p) = pairs.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::InvalidParameter(format!("nonpositive M = {} at eps = {}", p.1, p.0)));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(SlopeFit { slope, intercept, r2 })
}

/// `max |ε²Δu_eps(x₀) − ε·(−∂_ν u0(x₀))| / max ε·|∂_ν u0|` over the trace nodes.
pub fn trace_vs_limit_law(trace: &BoundaryTrace, u0: &Field, eps: f64) -> Result<f64> {
    let grid = u0.grid();
    if !(eps > 0.0 && grid.h() <= eps / 4.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("boundary layer unresolved: h = {} exceeds eps/4", grid.h())));
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (b, &t) in trace.nodes.iter().zip(&trace.values) {
        let law = eps * inward_normal_derivative(u0, b)?;
        worst = worst.max((t - law).abs());
        scale = scale.max(law.abs());
    }
    if worst == 0.0 {
        Ok(0.0)
    } else if scale == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(worst / scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub l_minus: f64,
    pub l_plus: f64,
    pub m: f64,
    pub m_over_eps: f64,
}

/// Bundle of every diagnostic for one solve; serialises to the fixed report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub positivity: PositivityReport,
    pub hopf_c0: f64,
    pub collar_mass: f64,
    pub tau: f64,
    pub conv: ConvergenceMetrics,
    pub trace: TraceSummary,
    /// `None` when the boundary trace vanishes.
    pub beta: Option<f64>,
    /// `None` when the layer is unresolved (`h > ε/4`) or too deep for the domain.
    pub profile_residual: Option<f64>,
    pub bounds: Vec<BoundCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Relative positivity tolerance; `None` means `10h²`.
    pub postol: Option<f64>,
    pub collar_width_in_eps: f64,
    pub blowup_depth_in_eps: f64,
    pub solver: SolverOptions,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            postol: None,
            collar_width_in_eps: COLLAR_WIDTH_IN_EPS,
            blowup_depth_in_eps: BLOWUP_DEPTH_IN_EPS,
            solver: SolverOptions::default(),
        }
    }
}

impl DiagnosticsReport {
    pub fn compute(u_eps: &Field, u0: &Field, f: &Forcing, eps: f64, opts: &AnalysisOptions) -> Result<Self> {
        check_same_grid(u_eps, u0)?;
        let grid = u_eps.grid();
        let postol = opts.postol.unwrap_or_else(|| default_postol(grid));
        let trace = operators::boundary_laplacian_trace(u_eps, eps)?;
        let collar = (opts.collar_width_in_eps * eps).max(2.0 * grid.h());
        let anchor = blowup_anchor(grid, &trace);
        let beta = match anchor {
            Some(x0) if trace.m > 0.0 => Some(beta_estimate(u0, &x0, eps, trace.m)?),
            _ => None,
        };
        let profile_residual = match anchor {
            Some(x0) if trace.m > 0.0 => {
                blowup_profile(u_eps, u0, eps, &x0, opts.blowup_depth_in_eps).ok().map(|p| p.residual)
            }
            _ => None,
        };
        Ok(DiagnosticsReport {
            positivity: positivity_report(u_eps, postol),
            hopf_c0: hopf_constant(u0),
            collar_mass: collar_positive_laplacian_mass(u_eps, collar)?,
            tau: f.tau(grid)?,
            conv: convergence_metrics(u_eps, u0, eps)?,
            trace: TraceSummary {
                l_minus: trace.l_minus,
                l_plus: trace.l_plus,
                m: trace.m,
                m_over_eps: if eps > 0.0 { trace.m / eps } else { f64::INFINITY },
            },
            beta,
            profile_residual,
            bounds: bound_checks(u_eps, u0, f, &trace, eps)?,
        })
    }
}

/// Plate solve, membrane solve and the full report for one configuration.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub grid: Grid,
    pub eps: f64,
    pub u_eps: Solution,
    pub u0: Solution,
    pub trace: BoundaryTrace,
    pub report: DiagnosticsReport,
}

impl Analysis {
    pub fn solve_reports(&self) -> [&SolveReport; 2] {
        [&self.u_eps.report, &self.u0.report]
    }
}

pub fn analyze(grid: &Grid, eps: f64, f: &Forcing, opts: &AnalysisOptions) -> Result<Analysis> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    f.tau(grid)?;
    let u_eps = problem::solve(grid, eps, f, &opts.solver)?;
    let u0 = problem::solve_limit(grid, f, &opts.solver)?;
    let trace = operators::boundary_laplacian_trace(&u_eps.field, eps)?;
    let report = DiagnosticsReport::compute(&u_eps.field, &u0.field, f, eps, opts)?;
    Ok(Analysis { grid: grid.clone(), eps, u_eps, u0, trace, report })
}

/// `∫ f` over the grid (trapezoid), used to normalise the collar mass.
pub fn forcing_mass(grid: &Grid, f: &Forcing) -> Result<f64> {
    Ok(discrete_integral(&f.sample(grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DomainSpec;
    use approx::assert_relative_eq;

    fn interval(h: f64) -> Grid {
        Grid::new(DomainSpec::unit_interval(), h).unwrap()
    }

    #[test]
    fn positivity_of_zero_and_spiked_fields() {
        let g = interval(1.0 / 16.0);
        let z = positivity_report(&Field::zeros(&g), 0.0);
        assert!(z.is_nonneg);
        assert_eq!(z.min, 0.0);

        let mut u = Field::from_fn(&g, |x, _| (std::f64::consts::PI * x).sin()).unwrap();
        u.set(Node::on_line(0), 0.0);
        u.set(Node::on_line(16), 0.0);
        u.set(Node::on_line(8), 1.0);
        u.set(Node::on_line(3), -1e-3);
        let r = positivity_report(&u, 1e-6);
        assert!(!r.is_nonneg);
        assert_eq!(r.argmin, Node::on_line(3));
        assert_eq!(r.min, -1e-3);
    }

    #[test]
    fn hopf_constant_of_parabola() {
        // u = x(1−x)/2, d = min(x, 1−x): u/d = (1−x)/2 on the left half, smallest at
        // the midpoint node, where it equals 1/4.
        let h = 1.0 / 16.0;
        let g = interval(h);
        let u = Field::from_fn(&g, |x, _| x * (1.0 - x) / 2.0).unwrap();
        let oracle = g
            .interior_nodes()
            .map(|n| {
                let x = g.coords(n)[0];
                (x * (1.0 - x) / 2.0) / x.min(1.0 - x)
            })
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(hopf_constant(&u), oracle, max_relative = 1e-14);
        assert_relative_eq!(hopf_constant(&u), 0.25, max_relative = 1e-14);
        assert_eq!(hopf_constant(&Field::zeros(&g)), 0.0);
    }

    #[test]
    fn collar_mass_bounded_by_total() {
        let g = interval(1.0 / 64.0);
        let u = Field::from_fn(&g, |x, _| (x * (1.0 - x)).powi(2)).unwrap();
        let collar = collar_positive_laplacian_mass(&u, 0.1).unwrap();
        let total = positive_laplacian_mass(&u).unwrap();
        assert!(collar <= total + 1e-15);
        assert!(collar > 0.0);
        assert_eq!(collar_positive_laplacian_mass(&Field::zeros(&g), 0.1).unwrap(), 0.0);
        assert!(collar_positive_laplacian_mass(&u, 1.0 / 64.0).is_err());
    }

    #[test]
    fn convergence_metrics_vanish_for_equal_fields() {
        let g = interval(1.0 / 32.0);
        let u = Field::from_fn(&g, |x, _| (x * (1.0 - x)).powi(2)).unwrap();
        let c = convergence_metrics(&u, &u, 0.1).unwrap();
        assert_eq!(c.h1_v, 0.0);
        let other = Grid::new(DomainSpec::unit_interval(), 1.0 / 16.0).unwrap();
        assert!(convergence_metrics(&u, &Field::zeros(&other), 0.1).is_err());
    }

    #[test]
    fn bound_checks_on_zero_fields() {
        let g = interval(1.0 / 32.0);
        let z = Field::zeros(&g);
        let trace = operators::boundary_laplacian_trace(&z, 0.1).unwrap();
        let checks = bound_checks(&z, &z, &Forcing::constant(0.0), &trace, 0.1).unwrap();
        assert_eq!(checks.len(), 3);
        for c in checks {
            assert!(c.satisfied, "{}", c.name);
            assert_eq!(c.slack, 0.0);
        }
    }

    #[test]
    fn fabricated_violation_is_located() {
        let g = interval(1.0 / 32.0);
        let z = Field::zeros(&g);
        let mut u = Field::zeros(&g);
        u.set(Node::on_line(5), -0.5);
        u.set(Node::on_line(20), -0.2);
        let trace = BoundaryTrace::from_values(g.boundary_nodes(), vec![0.1, 0.05]);
        let checks = bound_checks(&u, &z, &Forcing::constant(0.0), &trace, 0.1).unwrap();
        let low = checks.iter().find(|c| c.name == "u_lower").unwrap();
        assert!(!low.satisfied);
        assert_eq!(low.worst_node, Some(Node::on_line(5)));
        assert_relative_eq!(low.slack, -0.4, max_relative = 1e-12);
    }

    #[test]
    fn slope_of_synthetic_laws() {
        let eps = [0.5, 0.25, 0.125, 0.0625];
        let fit = asymptotic_slope(&eps.map(|e| (e, 3.0 * e))).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-10);
        assert!((fit.intercept - 3.0_f64.ln()).abs() < 1e-10);
        assert!((fit.r2 - 1.0).abs() < 1e-10);
        let fit = asymptotic_slope(&eps.map(|e| (e, e * e))).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-10);
        assert!(asymptotic_slope(&[(0.5, 1.0), (0.25, 0.0), (0.1, 1.0)]).is_err());
        assert!(asymptotic_slope(&[(0.5, 1.0), (0.25, 1.0)]).is_err());
        assert!(asymptotic_slope(&[(0.25, 1.0), (0.5, 1.0), (0.1, 1.0)]).is_err());
    }

    #[test]
    fn trace_law_for_zero_load() {
        let g = interval(1.0 / 64.0);
        let z = Field::zeros(&g);
        let trace = operators::boundary_laplacian_trace(&z, 0.1).unwrap();
        assert_eq!(trace_vs_limit_law(&trace, &z, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn blowup_rejects_degenerate_trace() {
        let g = interval(1.0 / 64.0);
        let z = Field::zeros(&g);
        let x0 = g.boundary_nodes()[0];
        assert!(matches!(blowup_profile(&z, &z, 0.1, &x0, 5.0), Err(Error::Degenerate(_))));
    }
}
