//! `plate-lab`: command-line front end for the clamped plate laboratory.
//!
//! Exit codes: 0 on success, 1 on numerical failure, 2 on invalid usage.

mod commands;
mod parse;
mod settings;

use std::fmt;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<plate_lab::Error> for CliError {
    fn from(e: plate_lab::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Failure(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("json error: {e}"))
    }
}

fn opt(name: &'static str, value: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name(value).help(help).action(ArgAction::Set)
}

fn config_arg() -> Arg {
    opt("config", "PATH", "flat key = value file; command-line flags take precedence")
}

fn domain_args() -> Vec<Arg> {
    vec![
        opt("domain", "KIND", "interval | square | rect | disk [default: interval]"),
        opt("L", "LENGTH", "interval length or square side [default: 1]"),
        opt("Lx", "LENGTH", "rectangle width [default: 1]"),
        opt("Ly", "LENGTH", "rectangle height [default: 1]"),
        opt("R", "RADIUS", "disk radius [default: 1]"),
        opt("forcing", "SPEC", "const:A | ball:CX,CY,R,A | delta:I,J,MASS | samples:PATH [default: const:1]"),
    ]
}

fn eps_args() -> Vec<Arg> {
    vec![
        opt("eps", "EPS", "perturbation parameter ε"),
        opt("gamma", "GAMMA", "tension γ, converted to ε = γ^(-1/2); excludes --eps"),
    ]
}

fn solver_args() -> Vec<Arg> {
    vec![
        opt("solver", "METHOD", "auto | direct | jacobi-cg | spectral-cg [default: auto]"),
        opt("tol", "TOL", "relative residual tolerance of iterative solves [default: 1e-10]"),
        opt("maxit", "N", "iteration cap of iterative solves [default: 20000]"),
    ]
}

fn spacing_args() -> Vec<Arg> {
    vec![
        opt("h", "H", "grid spacing; must divide every side"),
        opt("h-rule", "RULE", "spacing tied to ε when --h is absent: eps/K or min(eps,C)/K [default: eps/8]"),
    ]
}

pub fn cli() -> Command {
    let problem = || {
        let mut args = domain_args();
        args.extend(solver_args());
        args.push(config_arg());
        args
    };
    Command::new("plate-lab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Finite-difference laboratory for ε²Δ²u − Δu = f with clamped boundary conditions")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("solve")
                .about("Solve one problem and write the field and its diagnostics report")
                .args(problem())
                .args(eps_args())
                .args(spacing_args())
                .arg(opt("out", "PATH", "field CSV (x[,y],u)"))
                .arg(opt("report", "PATH", "diagnostics report JSON [default: stdout]"))
                .arg(opt("dump-operator", "PATH", "assembled operator as row col value triplets")),
        )
        .subcommand(
            Command::new("exact")
                .about("Tabulate a closed-form solution as t,u,du,d2u")
                .arg(opt("model", "MODEL", "oned | radial | profile"))
                .args(eps_args())
                .arg(opt("L", "LENGTH", "interval length for oned [default: 1]"))
                .arg(opt("R", "RADIUS", "disk radius for radial [default: 1]"))
                .arg(opt("amp", "A", "constant load for oned and radial [default: 1]"))
                .arg(opt("beta", "BETA", "profile amplitude [default: 1]"))
                .arg(opt("tmax", "T", "profile sample range [default: 5]"))
                .arg(opt("dt", "DT", "sample step [default: 0.01 for profile, L/256 or R/256 otherwise]"))
                .arg(opt("out", "PATH", "CSV output [default: stdout]"))
                .arg(config_arg()),
        )
        .subcommand(
            Command::new("sweep")
                .about("Diagnostics for a strictly decreasing list of ε values")
                .args(problem())
                .arg(opt("eps-list", "LIST", "comma-separated ε values, strictly decreasing"))
                .arg(opt("h-rule", "RULE", "eps/K or min(eps,C)/K [default: eps/8]"))
                .arg(opt("out", "PATH", "sweep table CSV [default: stdout]"))
                .arg(opt("report", "PATH", "full per-ε reports as JSON")),
        )
        .subcommand(
            Command::new("threshold")
                .about("Bisect for the positivity threshold ε₀")
                .args(problem())
                .arg(opt("bracket", "LO,HI", "ε bracket"))
                .arg(opt("bistol", "TOL", "bisection tolerance on ε [default: 1e-3]"))
                .arg(opt("h-rule", "RULE", "eps/K or min(eps,C)/K [default: eps/8]"))
                .arg(opt("scan-points", "N", "interior probes before bisection [default: 3]"))
                .arg(opt("out", "PATH", "threshold result JSON [default: stdout]")),
        )
        .subcommand(
            Command::new("blowup")
                .about("Rescaled boundary-layer profile against β(e^(-s) - 1 + s)")
                .args(problem())
                .args(eps_args())
                .args(spacing_args())
                .arg(opt("depth", "S", "sample depth in units of ε [default: 5]"))
                .arg(opt("out", "PATH", "profile CSV (s,u_scaled,halfspace,abs_diff) [default: stdout]"))
                .arg(opt("report", "PATH", "profile summary JSON")),
        )
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("PLATE_LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Usage(format!("PLATE_LAB_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failure(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut command = cli();
    let matches = match command.try_get_matches_from_mut(std::env::args_os()) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| {
        let (name, sub) = matches.subcommand().expect("a subcommand is required");
        let sub_cmd = command.find_subcommand(name).expect("parsed subcommand exists");
        commands::run(name, sub_cmd, sub)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
