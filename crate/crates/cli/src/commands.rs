use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgMatches, Command};
use serde::Serialize;
use serde_json::{json, Value};

use plate_lab::diagnostics::{analyze, blowup_anchor, blowup_profile, AnalysisOptions, BLOWUP_DEPTH_IN_EPS};
use plate_lab::exact::{solve_exact_1d, solve_exact_radial, HalfspaceProfile};
use plate_lab::io::{self, fmt_f64, RunManifest};
use plate_lab::linalg::SolveReport;
use plate_lab::operators::assemble_system;
use plate_lab::problem::SolverOptions;
use plate_lab::threshold::{find_eps0, sweep, ThresholdOptions};

use crate::parse::{self, ForcingSpec};
use crate::settings::Settings;
use crate::CliError;

pub fn run(name: &str, cmd: &Command, matches: &ArgMatches) -> Result<(), CliError> {
    let settings = Settings::collect(cmd, matches)?;
    let mut run = Run::new(name, &settings);
    match name {
        "solve" => solve(&settings, &mut run)?,
        "exact" => exact(&settings, &mut run)?,
        "sweep" => sweep_cmd(&settings, &mut run)?,
        "threshold" => threshold(&settings, &mut run)?,
        "blowup" => blowup(&settings, &mut run)?,
        other => unreachable!("unknown subcommand {other}"),
    }
    run.finish()
}

/// Bookkeeping for one invocation: outputs written so far and what goes into the
/// manifests placed next to them.
struct Run {
    command: String,
    settings: std::collections::BTreeMap<String, String>,
    start: Instant,
    inputs: serde_json::Map<String, Value>,
    solver: SolverOptions,
    solves: Vec<SolveReport>,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new(command: &str, settings: &Settings) -> Self {
        Run {
            command: command.to_string(),
            settings: settings.resolved(),
            start: Instant::now(),
            inputs: serde_json::Map::new(),
            solver: SolverOptions::default(),
            solves: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.inputs.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Write to `path`, or to standard output when no path is given.
    fn emit(&mut self, path: Option<&str>, content: &str) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let p = PathBuf::from(p);
                io::write_atomic(&p, content.as_bytes())?;
                self.outputs.push(p);
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.inputs.insert("settings".into(), serde_json::to_value(&self.settings)?);
        let manifest = RunManifest {
            tool: "plate-lab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.clone(),
            arguments: std::env::args().skip(1).collect(),
            inputs: Value::Object(self.inputs.clone()),
            solver_tolerance: self.solver.tol,
            solver_max_iterations: self.solver.maxit,
            solves: self.solves.clone(),
            wall_seconds: self.start.elapsed().as_secs_f64(),
            workers: rayon::current_num_threads(),
            timestamp_unix: io::unix_timestamp(),
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
        };
        for p in &self.outputs {
            io::write_json(&RunManifest::path_for(p), &manifest)?;
        }
        Ok(())
    }
}

fn analytic(spec: ForcingSpec, command: &str) -> Result<plate_lab::Forcing, CliError> {
    match spec {
        ForcingSpec::Analytic(f) => Ok(f),
        ForcingSpec::Samples(_) => Err(CliError::Usage(format!(
            "samples forcing is tied to a single grid and cannot be used with `{command}`"
        ))),
    }
}

fn solve(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let domain = parse::domain(s)?;
    let fspec = parse::forcing(s)?;
    let eps = parse::eps(s)?;
    let grid = parse::grid(s, &domain, eps)?;
    let f = parse::forcing_on(&fspec, &grid)?;
    let solver = parse::solver(s)?;
    run.solver = solver;
    run.input("domain", domain)?;
    run.input("eps", eps)?;
    run.input("h", grid.h())?;

    let opts = AnalysisOptions { solver, ..AnalysisOptions::default() };
    let a = analyze(&grid, eps, &f, &opts)?;
    run.solves.extend(a.solve_reports().into_iter().cloned());
    if let Some(p) = s.str("dump-operator") {
        let p = Path::new(p);
        io::write_operator(p, &assemble_system(&grid, eps)?)?;
        run.outputs.push(p.to_path_buf());
    }
    if let Some(p) = s.str("out") {
        run.emit(Some(p), &io::field_csv(&a.u_eps.field))?;
    }
    run.emit(s.str("report"), &io::to_json(&a.report)?)
}

fn exact(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let model: String = s.require("model")?;
    let mut rows: Vec<[f64; 4]> = Vec::new();
    let samples = |length: f64, dt: f64| -> Result<usize, CliError> {
        if !(dt > 0.0 && length > 0.0) {
            return Err(CliError::Usage(format!("sample step and range must be positive, got {dt} and {length}")));
        }
        Ok(((length / dt).round() as usize).max(1))
    };
    match model.as_str() {
        "profile" => {
            let beta = s.parse_or("beta", 1.0)?;
            let tmax = s.parse_or("tmax", 5.0)?;
            let dt = s.parse_or("dt", 0.01)?;
            let n = samples(tmax, dt)?;
            let p = HalfspaceProfile::new(beta);
            run.input("beta", beta)?;
            for k in 0..=n {
                let t = k as f64 * dt;
                rows.push([t, p.value(t), p.derivative(t), p.second_derivative(t)]);
            }
        }
        "oned" => {
            let length = s.parse_or("L", 1.0)?;
            let amp = s.parse_or("amp", 1.0)?;
            let eps = parse::eps(s)?;
            let sol = solve_exact_1d(length, eps, amp)?;
            let n = samples(length, s.parse_or("dt", length / 256.0)?)?;
            run.input("eps", eps)?;
            for k in 0..=n {
                let x = length * k as f64 / n as f64;
                rows.push([x, sol.value(x), sol.slope(x), sol.second(x)]);
            }
        }
        "radial" => {
            let radius = s.parse_or("R", 1.0)?;
            let amp = s.parse_or("amp", 1.0)?;
            let eps = parse::eps(s)?;
            let sol = solve_exact_radial(radius, eps, amp)?;
            let n = samples(radius, s.parse_or("dt", radius / 256.0)?)?;
            run.input("eps", eps)?;
            for k in 0..=n {
                let r = radius * k as f64 / n as f64;
                rows.push([r, sol.value(r), sol.slope(r), sol.second(r)]);
            }
        }
        other => return Err(CliError::Usage(format!("unknown model `{other}` (expected oned, radial or profile)"))),
    }
    run.input("model", &model)?;
    run.emit(s.str("out"), &io::profile_csv(&rows))
}

fn sweep_cmd(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let domain = parse::domain(s)?;
    let f = analytic(parse::forcing(s)?, "sweep")?;
    let eps_list = s.list("eps-list")?.ok_or_else(|| CliError::Usage("missing required option --eps-list".into()))?;
    let rule = parse::h_rule(s)?;
    let solver = parse::solver(s)?;
    run.solver = solver;
    run.input("domain", domain)?;
    run.input("eps_list", &eps_list)?;
    run.input("h_rule", rule.to_string())?;

    let rows = sweep(&domain, &f, &eps_list, &rule, &AnalysisOptions { solver, ..AnalysisOptions::default() })?;
    for row in &rows {
        if let Some(e) = &row.error {
            eprintln!("warning: eps = {}: {e}", row.eps);
        }
    }
    run.emit(s.str("out"), &io::sweep_csv(&rows))?;
    if let Some(p) = s.str("report") {
        run.emit(Some(p), &io::to_json(&rows)?)?;
    }
    Ok(())
}

fn threshold(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let domain = parse::domain(s)?;
    let f = analytic(parse::forcing(s)?, "threshold")?;
    let bracket = match s.list("bracket")?.as_deref() {
        Some([lo, hi]) => (*lo, *hi),
        Some(_) => return Err(CliError::Usage("--bracket takes exactly two values LO,HI".into())),
        None => return Err(CliError::Usage("missing required option --bracket".into())),
    };
    let bistol = s.parse_or("bistol", 1e-3)?;
    let rule = parse::h_rule(s)?;
    let solver = parse::solver(s)?;
    let scan_points = s.parse_or("scan-points", ThresholdOptions::default().scan_points)?;
    run.solver = solver;
    run.input("domain", domain)?;
    run.input("bracket", [bracket.0, bracket.1])?;
    run.input("bistol", bistol)?;
    run.input("h_rule", rule.to_string())?;

    let result = find_eps0(&domain, &f, &rule, bracket, bistol, &ThresholdOptions { scan_points, solver })?;
    run.emit(s.str("out"), &io::to_json(&result)?)
}

fn blowup(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let domain = parse::domain(s)?;
    let fspec = parse::forcing(s)?;
    let eps = parse::eps(s)?;
    let grid = parse::grid(s, &domain, eps)?;
    let f = parse::forcing_on(&fspec, &grid)?;
    let solver = parse::solver(s)?;
    let depth = s.parse_or("depth", BLOWUP_DEPTH_IN_EPS)?;
    run.solver = solver;
    run.input("domain", domain)?;
    run.input("eps", eps)?;
    run.input("h", grid.h())?;
    run.input("depth", depth)?;

    let a = analyze(&grid, eps, &f, &AnalysisOptions { solver, ..AnalysisOptions::default() })?;
    run.solves.extend(a.solve_reports().into_iter().cloned());
    let x0 = blowup_anchor(&grid, &a.trace)
        .ok_or_else(|| CliError::Failure("domain has no boundary node for the blow-up".into()))?;
    let p = blowup_profile(&a.u_eps.field, &a.u0.field, eps, &x0, depth)?;
    let halfspace = p.profile();
    let mut csv = String::from("s,u_scaled,halfspace,abs_diff\n");
    for (&sk, &vk) in p.s.iter().zip(&p.values) {
        let q = halfspace.value(sk);
        let _ = writeln!(csv, "{},{},{},{}", fmt_f64(sk), fmt_f64(vk), fmt_f64(q), fmt_f64((vk - q).abs()));
    }
    run.emit(s.str("out"), &csv)?;
    if let Some(path) = s.str("report") {
        let summary = json!({
            "x0": p.x0,
            "x0_coords": grid.coords(p.x0.node),
            "m": p.m,
            "beta": p.beta,
            "residual": p.residual,
            "residual_over_beta": p.residual / p.beta,
            "second_difference_at_boundary": p.second_difference_at_boundary(),
        });
        run.emit(Some(path), &io::to_json(&summary)?)?;
    }
    Ok(())
}
