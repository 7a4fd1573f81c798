//! Positivity threshold search and ε sweeps.
//!
//! The grid spacing is always tied to ε through an [`HRule`], so that the boundary layer
//! stays resolved as ε shrinks.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{analyze, default_postol, positivity_report, AnalysisOptions, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::mesh::{DomainSpec, Forcing, Grid, Node};
use crate::problem::{self, SolverOptions};

pub const FLAG_NOT_SIGN_CHANGING: &str = "bracket not sign-changing";
pub const FLAG_NON_MONOTONE: &str = "non-monotone";
pub const FLAG_LOWER_NOT_POSITIVE: &str = "lower bracket end not positive";
pub const FLAG_REFINEMENT_UNSTABLE: &str = "refinement-unstable";

/// Spacing rule `h = min(ε, cap)/k`, snapped down to the nearest spacing that divides
/// every side of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HRule {
    pub divisor: f64,
    pub cap: Option<f64>,
}

impl HRule {
    pub fn eps_over(k: f64) -> Self {
        HRule { divisor: k, cap: None }
    }

    pub fn capped(cap: f64, k: f64) -> Self {
        HRule { divisor: k, cap: Some(cap) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.divisor.is_finite() && self.divisor >= 4.0) {
            return Err(Error::InvalidParameter(format!("h rule divisor must be at least 4, got {}", self.divisor)));
        }
        if let Some(c) = self.cap {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidParameter(format!("h rule cap must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Target spacing before snapping.
    pub fn target(&self, eps: f64) -> f64 {
        let scale = match self.cap {
            Some(c) => eps.min(c),
            None => eps,
        };
        scale / self.divisor
    }

    pub fn resolve(&self, domain: &DomainSpec, eps: f64) -> Result<f64> {
        self.validate()?;
        domain.validate()?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        snap_spacing(domain, self.target(eps))
    }

    pub fn grid(&self, domain: &DomainSpec, eps: f64) -> Result<Grid> {
        Grid::new(*domain, self.resolve(domain, eps)?)
    }
}

/// Largest `h ≤ target` that divides every side.
pub fn snap_spacing(domain: &DomainSpec, target: f64) -> Result<f64> {
    const SEARCH: usize = 10_000;
    let (first, other) = match *domain {
        DomainSpec::Interval { length } => (length, None),
        DomainSpec::DiskRadial { radius } => (radius, None),
        DomainSpec::Rectangle { lx, ly } => (lx, Some(ly)),
    };
    let n0 = ((first / target) - 1e-9).ceil().max(1.0) as usize;
    for n in n0..n0 + SEARCH {
        let h = first / n as f64;
        match other {
            None => return Ok(h),
            Some(side) => {
                let m = side / h;
                if (m - m.round()).abs() <= 1e-9 * m.max(1.0) && m.round() >= 1.0 {
                    return Ok(h);
                }
            }
        }
    }
    Err(Error::InvalidParameter(format!("no spacing below {target} divides both sides of {domain:?}")))
}

impl fmt::Display for HRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cap {
            Some(c) => write!(f, "min(eps,{c})/{}", self.divisor),
            None => write!(f, "eps/{}", self.divisor),
        }
    }
}

impl FromStr for HRule {
    type Err = Error;

    /// Accepts `eps/K` and `min(eps,C)/K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("h rule `{s}` is not of the form eps/K or min(eps,C)/K"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, k) = compact.rsplit_once('/').ok_or_else(bad)?;
        let k: f64 = k.parse().map_err(|_| bad())?;
        let rule = if head == "eps" {
            HRule::eps_over(k)
        } else {
            let inner = head.strip_prefix("min(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            let cap = match inner.split_once(',') {
                Some(("eps", c)) | Some((c, "eps")) => c.parse::<f64>().map_err(|_| bad())?,
                _ => return Err(bad()),
            };
            HRule::capped(cap, k)
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Positivity test at one ε on the rule grid and its first refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub eps: f64,
    pub h: f64,
    pub min_u: f64,
    pub argmin: Node,
    pub is_nonneg: bool,
    pub refined_h: f64,
    pub refined_min_u: f64,
    pub refined_is_nonneg: bool,
}

impl Probe {
    /// Nonnegative at both `h` and `h/2`.
    pub fn certified(&self) -> bool {
        self.is_nonneg && self.refined_is_nonneg
    }

    pub fn refinement_stable(&self) -> bool {
        self.is_nonneg == self.refined_is_nonneg
    }
}

fn min_at(domain: &DomainSpec, h: f64, eps: f64, f: &Forcing, solver: &SolverOptions) -> Result<(f64, Node, bool)> {
    let grid = Grid::new(*domain, h)?;
    let u = problem::solve(&grid, eps, f, solver)?;
    let pos = positivity_report(&u.field, default_postol(&grid));
    Ok((pos.min, pos.argmin, pos.is_nonneg))
}

pub fn probe(domain: &DomainSpec, f: &Forcing, h_rule: &HRule, eps: f64, solver: &SolverOptions) -> Result<Probe> {
    let h = h_rule.resolve(domain, eps)?;
    let (coarse, fine) = rayon::join(|| min_at(domain, h, eps, f, solver), || min_at(domain, h / 2.0, eps, f, solver));
    let (min_u, argmin, is_nonneg) = coarse?;
    let (refined_min_u, _, refined_is_nonneg) = fine?;
    Ok(Probe { eps, h, min_u, argmin, is_nonneg, refined_h: h / 2.0, refined_min_u, refined_is_nonneg })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eps: f64,
    pub h: f64,
    pub min_u: f64,
    pub refined_h: f64,
    pub refined_min_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Largest tested ε with certified positivity, when a threshold is claimed.
    pub eps0: Option<f64>,
    /// Smallest tested ε where positivity failed.
    pub eps_sign_change: Option<f64>,
    pub flags: Vec<String>,
    /// Bracket `(lo, hi)` after the scan and after each bisection step.
    pub brackets: Vec<(f64, f64)>,
    /// Every probe in evaluation order.
    pub history: Vec<Probe>,
    pub certificate: Option<Certificate>,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    /// Log-spaced probes strictly inside the bracket, evaluated before bisection to
    /// detect non-monotone behaviour.
    pub scan_points: usize,
    pub solver: SolverOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions { scan_points: 3, solver: SolverOptions::default() }
    }
}

/// Bisect for the largest ε at which the solution stays nonnegative.
pub fn find_eps0(
    domain: &DomainSpec,
    f: &Forcing,
    h_rule: &HRule,
    bracket: (f64, f64),
    bistol: f64,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bracket ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    if !(bistol > 0.0) {
        return Err(Error::InvalidParameter(format!("bisection tolerance must be positive, got {bistol}")));
    }
    h_rule.validate()?;
    let tau = f.tau(&h_rule.grid(domain, hi)?)?;

    // Scan from the top: the bracket ends plus interior log-spaced points.
    let n = opts.scan_points;
    let ratio = (hi / lo).ln();
    let mut scan_eps: Vec<f64> = (0..n + 2)
        .map(|k| match k {
            0 => lo,
            k if k == n + 1 => hi,
            k => lo * (ratio * k as f64 / (n + 1) as f64).exp(),
        })
        .collect();
    scan_eps.reverse();
    let mut history: Vec<Probe> =
        scan_eps.par_iter().map(|&e| probe(domain, f, h_rule, e, &opts.solver)).collect::<Result<_>>()?;

    let mut result = ThresholdResult {
        eps0: None,
        eps_sign_change: None,
        flags: Vec::new(),
        brackets: Vec::new(),
        history: Vec::new(),
        certificate: None,
        tau,
    };
    if history.iter().any(|p| !p.refinement_stable()) {
        result.flags.push(FLAG_REFINEMENT_UNSTABLE.into());
    }

    let lowest = history.last().expect("scan has at least two probes");
    if !lowest.certified() {
        result.flags.push(FLAG_LOWER_NOT_POSITIVE.into());
        result.eps_sign_change = Some(lowest.eps);
        result.history = history;
        return Ok(result);
    }
    // Sorted by decreasing ε the predicate must read [fail…, pass…].
    let first_pass = history.iter().position(|p| p.certified()).unwrap();
    if history[first_pass..].iter().any(|p| !p.certified()) {
        result.flags.push(FLAG_NON_MONOTONE.into());
        result.history = history;
        return Ok(result);
    }
    if first_pass == 0 {
        result.flags.push(FLAG_NOT_SIGN_CHANGING.into());
        result.certificate = Some(certificate(&history[0]));
        result.eps0 = Some(hi);
        result.history = history;
        return Ok(result);
    }

    let mut good = history[first_pass].clone();
    let mut bad_eps = history[first_pass - 1].eps;
    result.brackets.push((good.eps, bad_eps));
    while bad_eps - good.eps > bistol {
        let mid = 0.5 * (good.eps + bad_eps);
        let p = probe(domain, f, h_rule, mid, &opts.solver)?;
        if !p.refinement_stable() && !result.flags.iter().any(|s| s == FLAG_REFINEMENT_UNSTABLE) {
            result.flags.push(FLAG_REFINEMENT_UNSTABLE.into());
        }
        if p.certified() {
            good = p.clone();
        } else {
            bad_eps = mid;
        }
        history.push(p);
        result.brackets.push((good.eps, bad_eps));
    }
    result.eps0 = Some(good.eps);
    result.eps_sign_change = Some(bad_eps);
    result.certificate = Some(certificate(&good));
    result.history = history;
    Ok(result)
}

fn certificate(p: &Probe) -> Certificate {
    Certificate { eps: p.eps, h: p.h, min_u: p.min_u, refined_h: p.refined_h, refined_min_u: p.refined_min_u }
}

/// One row of a sweep: either a full report or the reason the solve failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub h: Option<f64>,
    pub report: Option<DiagnosticsReport>,
    pub error: Option<String>,
}

/// Independent diagnostics for each ε, computed in parallel and returned in input order.
pub fn sweep(
    domain: &DomainSpec,
    f: &Forcing,
    eps_list: &[f64],
    h_rule: &HRule,
    opts: &AnalysisOptions,
) -> Result<Vec<SweepRow>> {
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("eps list must be strictly decreasing".into()));
    }
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {e}")));
    }
    h_rule.validate()?;
    Ok(eps_list
        .par_iter()
        .map(|&eps| {
            let h = h_rule.resolve(domain, eps).ok();
            let run = || -> Result<DiagnosticsReport> {
                let grid = h_rule.grid(domain, eps)?;
                Ok(analyze(&grid, eps, f, opts)?.report)
            };
            match run() {
                Ok(report) => SweepRow { eps, h, report: Some(report), error: None },
                Err(e) => SweepRow { eps, h, report: None, error: Some(e.to_string()) },
            }
        })
        .collect())
}
