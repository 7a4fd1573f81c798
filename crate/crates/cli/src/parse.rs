//! Problem description from resolved settings.

use std::path::Path;

use plate_lab::io::read_field_csv;
use plate_lab::problem::{eps_from_gamma, SolverMethod, SolverOptions};
use plate_lab::threshold::HRule;
use plate_lab::{DomainSpec, Forcing, Grid, Node};

use crate::settings::{Layer, Settings};
use crate::CliError;

pub fn domain(s: &Settings) -> Result<DomainSpec, CliError> {
    let kind = s.str("domain").unwrap_or("interval");
    let allowed: &[&str] = match kind {
        "interval" | "square" => &["L"],
        "rect" => &["Lx", "Ly"],
        "disk" => &["R"],
        other => {
            return Err(CliError::Usage(format!("unknown domain `{other}` (expected interval, square, rect or disk)")))
        }
    };
    for key in ["L", "Lx", "Ly", "R"] {
        if !allowed.contains(&key) && s.str(key).is_some() {
            return Err(CliError::Usage(format!("--{key} does not apply to --domain {kind}")));
        }
    }
    let d = match kind {
        "interval" => DomainSpec::Interval { length: s.parse_or("L", 1.0)? },
        "square" => {
            let side = s.parse_or("L", 1.0)?;
            DomainSpec::Rectangle { lx: side, ly: side }
        }
        "rect" => DomainSpec::Rectangle { lx: s.parse_or("Lx", 1.0)?, ly: s.parse_or("Ly", 1.0)? },
        _ => DomainSpec::DiskRadial { radius: s.parse_or("R", 1.0)? },
    };
    d.validate()?;
    Ok(d)
}

fn numbers(spec: &str, body: &str) -> Result<Vec<f64>, CliError> {
    body.split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("forcing `{spec}`: `{x}` is not a number")))
        })
        .collect()
}

/// Forcing that does not depend on the grid; `samples:` files are read per grid by
/// [`forcing_on`].
pub enum ForcingSpec {
    Analytic(Forcing),
    Samples(String),
}

pub fn forcing(s: &Settings) -> Result<ForcingSpec, CliError> {
    let spec = s.str("forcing").unwrap_or("const:1");
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("forcing `{spec}` is not of the form KIND:ARGS")))?;
    let bad_count = |want: &str| CliError::Usage(format!("forcing `{spec}`: expected {want}"));
    let f = match kind {
        "const" => match numbers(spec, body)?[..] {
            [amp] => Forcing::Constant { amp },
            _ => return Err(bad_count("const:A")),
        },
        "ball" => match numbers(spec, body)?[..] {
            [cx, cy, radius, amp] => Forcing::BallIndicator { center: [cx, cy], radius, amp },
            [c, radius, amp] => Forcing::BallIndicator { center: [c, 0.0], radius, amp },
            _ => return Err(bad_count("ball:CX,CY,R,A (or ball:C,R,A in one dimension)")),
        },
        "delta" => {
            let v = numbers(spec, body)?;
            let index = |x: f64| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(CliError::Usage(format!("forcing `{spec}`: node index {x} is not a nonnegative integer")))
                }
            };
            match v[..] {
                [i, j, mass] => Forcing::CellDelta { node: Node::new(index(i)?, index(j)?), mass },
                [i, mass] => Forcing::CellDelta { node: Node::on_line(index(i)?), mass },
                _ => return Err(bad_count("delta:I,J,MASS (or delta:I,MASS in one dimension)")),
            }
        }
        "samples" => return Ok(ForcingSpec::Samples(body.to_string())),
        other => {
            return Err(CliError::Usage(format!(
                "unknown forcing kind `{other}` (expected const, ball, delta or samples)"
            )))
        }
    };
    f.validate()?;
    Ok(ForcingSpec::Analytic(f))
}

pub fn forcing_on(spec: &ForcingSpec, grid: &Grid) -> Result<Forcing, CliError> {
    match spec {
        ForcingSpec::Analytic(f) => Ok(f.clone()),
        ForcingSpec::Samples(path) => {
            let field = read_field_csv(Path::new(path), grid)?;
            let f = Forcing::Samples(field);
            f.validate()?;
            Ok(f)
        }
    }
}

/// ε from `--eps` or `--gamma`. Both in the same layer is a usage error; across layers
/// the command-line flag wins.
pub fn eps(s: &Settings) -> Result<f64, CliError> {
    let eps = match (s.raw("eps"), s.raw("gamma")) {
        (None, None) => return Err(CliError::Usage("missing required option --eps (or --gamma)".into())),
        (Some((_, a)), Some((_, b))) if a == b => {
            return Err(CliError::Usage("--eps and --gamma are mutually exclusive".into()))
        }
        (Some((_, Layer::Flag)), _) | (Some(_), None) => s.require::<f64>("eps")?,
        _ => eps_from_gamma(s.require::<f64>("gamma")?)?,
    };
    if !(eps.is_finite() && eps > 0.0) {
        return Err(CliError::Usage(format!("eps must be positive, got {eps}")));
    }
    Ok(eps)
}

pub fn h_rule(s: &Settings) -> Result<HRule, CliError> {
    Ok(s.str("h-rule").unwrap_or("eps/8").parse::<HRule>()?)
}

/// Grid from `--h`, or from the spacing rule when `--h` is absent.
pub fn grid(s: &Settings, domain: &DomainSpec, eps: f64) -> Result<Grid, CliError> {
    Ok(match s.parse::<f64>("h")? {
        Some(h) => Grid::new(*domain, h)?,
        None => h_rule(s)?.grid(domain, eps)?,
    })
}

pub fn solver(s: &Settings) -> Result<SolverOptions, CliError> {
    let defaults = SolverOptions::default();
    let method = match s.str("solver").unwrap_or("auto") {
        "auto" => SolverMethod::Auto,
        "direct" => SolverMethod::Direct,
        "jacobi-cg" => SolverMethod::JacobiCg,
        "spectral-cg" => SolverMethod::SpectralCg,
        other => {
            return Err(CliError::Usage(format!(
                "unknown solver `{other}` (expected auto, direct, jacobi-cg or spectral-cg)"
            )))
        }
    };
    let tol = s.parse_or("tol", defaults.tol)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")));
    }
    let maxit = s.parse_or("maxit", defaults.maxit)?;
    Ok(SolverOptions { method, tol, maxit })
}
