//! Acceptance suite. Runs every criterion at its stated tolerance, prints one line per
//! criterion and fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use plate_lab::diagnostics::{
    self, analyze, asymptotic_slope, blowup_anchor, blowup_profile, collar_positive_laplacian_mass, positivity_report,
    trace_vs_limit_law, Analysis, AnalysisOptions, BLOWUP_DEPTH_IN_EPS,
};
use plate_lab::exact::{clamped_basis_derivatives, ode_basis, solve_exact_1d, solve_exact_radial, wrong_sign_residual};
use plate_lab::linalg::{solve_banded_direct, solve_spd, symmetry_defect};
use plate_lab::mesh::{discrete_integral, DomainSpec, Field, Forcing, Grid};
use plate_lab::operators::{assemble_rhs, assemble_system, row_weights};
use plate_lab::problem::{eps_from_gamma, solve, SolverOptions};
use plate_lab::threshold::HRule;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Least-squares slope of `log err` against `log h`.
fn rate(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn sup_error(u: &Field, exact: impl Fn(f64) -> f64) -> f64 {
    let g = u.grid();
    g.nodes().map(|n| (u.get(n) - exact(g.coords(n)[0])).abs()).fold(0.0, f64::max)
}

const SWEEP_EPS: [f64; 4] = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];

struct Sweeps {
    interval: Vec<Analysis>,
    square: Vec<Analysis>,
}

fn run_sweep(domain: DomainSpec) -> Vec<Analysis> {
    let rule = HRule::eps_over(8.0);
    SWEEP_EPS
        .iter()
        .map(|&eps| {
            let grid = rule.grid(&domain, eps).unwrap();
            analyze(&grid, eps, &Forcing::constant(1.0), &AnalysisOptions::default()).unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let exact = solve_exact_1d(1.0, 0.1, 1.0).unwrap();
    let pairs: Vec<(f64, f64)> = (6..=9)
        .map(|k| {
            let h = 2f64.powi(-k);
            let g = Grid::new(DomainSpec::unit_interval(), h).unwrap();
            let u = solve(&g, 0.1, &Forcing::constant(1.0), &SolverOptions::default()).unwrap();
            (h, sup_error(&u.field, |x| exact.value(x)))
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let p = rate(&pairs);
    outcome(
        p >= 1.8 && secs < 5.0,
        format!("rate {p:.3} (need >= 1.8), finest error {:.3e}, {secs:.2} s (limit 5 s)", pairs[3].1),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for eps in [0.2, 0.05] {
        let exact = solve_exact_radial(1.0, eps, 1.0).unwrap();
        let pairs: Vec<(f64, f64)> = (8..=11)
            .map(|k| {
                let h = 2f64.powi(-k);
                let g = Grid::new(DomainSpec::DiskRadial { radius: 1.0 }, h).unwrap();
                let u = solve(&g, eps, &Forcing::constant(1.0), &SolverOptions::default()).unwrap();
                (h, sup_error(&u.field, |r| exact.value(r)))
            })
            .collect();
        let p = rate(&pairs);
        let finest = pairs[3].1;
        pass &= p >= 1.8 && finest <= 1e-6;
        detail.push(format!("eps {eps}: rate {p:.3}, finest error {finest:.3e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    outcome(pass, format!("{}; {secs:.2} s (limit 10 s)", detail.join("; ")))
}

/// Bound checks of every solve in criteria 3 to 5 are collected here for criterion 10.
struct BoundTally {
    solves: usize,
    failures: Vec<String>,
}

impl BoundTally {
    fn record(&mut self, label: &str, a: &Analysis) {
        self.solves += 1;
        for c in &a.report.bounds {
            if !c.satisfied {
                self.failures.push(format!("{label}: {} slack {:.3e} allowance {:.3e}", c.name, c.slack, c.allowance));
            }
        }
    }
}

fn criterion_3(tally: &mut BoundTally) -> Outcome {
    let rule = HRule::capped(1.0, 16.0);
    let mut violations = Vec::new();
    let mut worst_min = f64::INFINITY;
    for gamma in [1e-1, 1.0, 1e1, 1e2, 1e3, 1e4] {
        let eps = eps_from_gamma(gamma).unwrap();
        let grid = rule.grid(&DomainSpec::unit_interval(), eps).unwrap();
        let a = analyze(&grid, eps, &Forcing::constant(1.0), &AnalysisOptions::default()).unwrap();
        let min = positivity_report(&a.u_eps.field, 0.0).min;
        worst_min = worst_min.min(min);
        if !(min > 0.0) {
            violations.push(format!("gamma {gamma}: min {min:.3e}"));
        }
        tally.record(&format!("interval gamma {gamma}"), &a);
    }
    outcome(
        violations.is_empty(),
        format!("{} violations over 6 tensions, smallest interior minimum {worst_min:.3e}", violations.len()),
    )
}

fn criterion_4(tally: &mut BoundTally) -> Outcome {
    let start = Instant::now();
    let eps = 1.0 / 64.0;
    let f = Forcing::BallIndicator { center: [0.3, 0.4], radius: 0.1, amp: 1.0 };
    let mut pass = true;
    let mut detail = Vec::new();
    for k in [8.0, 16.0] {
        let grid = Grid::new(DomainSpec::unit_square(), eps / k).unwrap();
        let a = analyze(&grid, eps, &f, &AnalysisOptions::default()).unwrap();
        let p = &a.report.positivity;
        pass &= p.is_nonneg;
        detail.push(format!(
            "h = eps/{k}: nonneg {} min {:.3e} (allowed {:.3e})",
            p.is_nonneg,
            p.min,
            -diagnostics::default_postol(&grid) * a.u_eps.field.sup_norm()
        ));
        tally.record(&format!("square ball h=eps/{k}"), &a);
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(pass, format!("{}; {secs:.1} s (limit 60 s)", detail.join("; ")))
}

fn criterion_5(s: &Sweeps, tally: &mut BoundTally) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, runs) in [("interval", &s.interval), ("square", &s.square)] {
        let pairs: Vec<(f64, f64)> = runs.iter().map(|a| (a.eps, a.report.trace.m)).collect();
        let fit = asymptotic_slope(&pairs).unwrap();
        let r = |a: &Analysis| a.report.trace.m_over_eps;
        let (a, b) = (r(&runs[2]), r(&runs[3]));
        let variation = (a - b).abs() / a.min(b);
        pass &= (0.85..=1.15).contains(&fit.slope) && variation < 0.2;
        detail.push(format!("{name}: slope {:.3}, M/eps variation {:.1}%", fit.slope, 100.0 * variation));
        for a in runs.iter() {
            tally.record(&format!("{name} sweep eps {}", a.eps), a);
        }
    }
    outcome(pass, detail.join("; "))
}

fn criterion_6(s: &Sweeps) -> Outcome {
    let one = &s.interval[3];
    let sq = &s.square[2];
    let d1 = trace_vs_limit_law(&one.trace, &one.u0.field, one.eps).unwrap();
    let d2 = trace_vs_limit_law(&sq.trace, &sq.u0.field, sq.eps).unwrap();
    outcome(
        d1 <= 0.05 && d2 <= 0.10,
        format!("interval eps 1/128: {d1:.4} (limit 0.05); square eps 1/64: {d2:.4} (limit 0.10)"),
    )
}

fn criterion_7(s: &Sweeps) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, a, limit) in [("interval eps 1/128", &s.interval[3], 0.05), ("square eps 1/64", &s.square[2], 0.10)] {
        let x0 = blowup_anchor(&a.grid, &a.trace).unwrap();
        let p = blowup_profile(&a.u_eps.field, &a.u0.field, a.eps, &x0, BLOWUP_DEPTH_IN_EPS).unwrap();
        let rel = p.residual / p.beta;
        pass &= rel <= limit;
        detail.push(format!("{name}: residual/beta {rel:.4} (limit {limit}), beta {:.4}", p.beta));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_8(s: &Sweeps) -> Outcome {
    let a = &s.interval[3];
    let mass = collar_positive_laplacian_mass(&a.u_eps.field, 8.0 * a.eps).unwrap();
    let total = discrete_integral(&Forcing::constant(1.0).sample(&a.grid).unwrap());
    outcome(mass >= 0.9 * total, format!("collar mass {mass:.4}, need >= {:.4}", 0.9 * total))
}

fn criterion_9(s: &Sweeps) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, runs) in [("interval", &s.interval), ("square", &s.square)] {
        let h1: Vec<f64> = runs.iter().map(|a| a.report.conv.h1_v).collect();
        let l2: Vec<f64> = runs.iter().map(|a| a.report.conv.l2_eps_lap).collect();
        let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < 1.02 * w[0]);
        pass &= decreasing(&h1) && decreasing(&l2);
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
        detail.push(format!("{name}: h1_v [{}], l2_eps_lap [{}]", fmt(&h1), fmt(&l2)));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_10(tally: &BoundTally) -> Outcome {
    outcome(
        tally.failures.is_empty(),
        if tally.failures.is_empty() {
            format!("all 3 bounds satisfied in {} solves", tally.solves)
        } else {
            format!("{} of {} solves violate: {}", tally.failures.len(), tally.solves, tally.failures.join("; "))
        },
    )
}

fn criterion_11(s: &Sweeps) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();

    let (v1, v2) = clamped_basis_derivatives(0.0).unwrap();
    let initial_ok = v1[0] == 0.0 && v1[1] == 0.0 && v2[0] == 0.0 && v2[1] == 0.0;
    pass &= initial_ok;
    detail.push(format!("clamped initial values exact: {initial_ok}"));

    // Fourth-order central differences at t = 1.
    let d = 0.05;
    let mut ode = 0.0_f64;
    for pick in [0usize, 1] {
        let v = |t: f64| {
            let b = ode_basis(t).unwrap();
            if pick == 0 {
                b.v1
            } else {
                b.v2
            }
        };
        let f: Vec<f64> = (-3..=3).map(|k| v(1.0 + k as f64 * d)).collect();
        let d2 = (-f[1] + 16.0 * f[2] - 30.0 * f[3] + 16.0 * f[4] - f[5]) / (12.0 * d * d);
        let d4 =
            (-f[0] + 12.0 * f[1] - 39.0 * f[2] + 56.0 * f[3] - 39.0 * f[4] + 12.0 * f[5] - f[6]) / (6.0 * d.powi(4));
        ode = ode.max((d4 - d2).abs());
    }
    pass &= ode <= 1e-6;
    detail.push(format!("v1/v2 ODE residual {ode:.2e} (limit 1e-6)"));

    let wrong = (0..10).map(|k| wrong_sign_residual(0.7 * k as f64).abs()).fold(0.0, f64::max);
    pass &= wrong <= 1e-15;
    detail.push(format!("1 - cos t residual {wrong:.1e}"));

    for (name, runs) in [("interval", &s.interval), ("square", &s.square)] {
        let t = &runs[3].report.trace;
        let ok = t.l_minus > 0.0 && t.m == t.l_plus;
        pass &= ok;
        detail.push(format!("{name} eps 1/128: L- {:.3e}, M = L+ {}", t.l_minus, t.m == t.l_plus));
    }
    outcome(pass, detail.join("; "))
}

fn criterion_12() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();

    let mut worst: f64 = 0.0;
    for (domain, h) in [
        (DomainSpec::unit_interval(), 1.0 / 128.0),
        (DomainSpec::unit_square(), 1.0 / 32.0),
        (DomainSpec::Rectangle { lx: 1.0, ly: 0.5 }, 1.0 / 32.0),
        (DomainSpec::DiskRadial { radius: 1.0 }, 1.0 / 128.0),
    ] {
        let g = Grid::new(domain, h).unwrap();
        for eps in [0.0, 0.01, 0.1, 1.0] {
            worst = worst.max(symmetry_defect(&assemble_system(&g, eps).unwrap()));
        }
    }
    pass &= worst <= 1e-12;
    detail.push(format!("max symmetry defect {worst:.1e}"));

    let tol = 1e-10;
    let mut agree: f64 = 0.0;
    for eps in [1.0, 0.1, 0.01] {
        let g = Grid::new(DomainSpec::unit_interval(), 1.0 / 128.0).unwrap();
        let a = assemble_system(&g, eps).unwrap();
        let b: Vec<f64> = assemble_rhs(&g, &Forcing::constant(1.0))
            .unwrap()
            .iter()
            .zip(row_weights(&g))
            .map(|(f, w)| f * w)
            .collect();
        let direct = solve_banded_direct(&a, &b).unwrap();
        let (cg, _) = solve_spd(&a, &b, tol, 100_000).unwrap();
        let scale = direct.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let diff = direct.iter().zip(&cg).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
        agree = agree.max(diff / scale);
    }
    pass &= agree <= 10.0 * tol;
    detail.push(format!("CG vs direct {agree:.2e} (limit {:.0e})", 10.0 * tol));

    let deterministic = cli_runs_are_identical();
    pass &= deterministic;
    detail.push(format!("CLI outputs byte-identical: {deterministic}"));
    outcome(pass, detail.join("; "))
}

fn cli_runs_are_identical() -> bool {
    let bin = env!("CARGO_BIN_EXE_plate-lab");
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| -> Option<(Vec<u8>, Vec<u8>)> {
        let out = dir.path().join(format!("{tag}.csv"));
        let report = dir.path().join(format!("{tag}.json"));
        let status = Command::new(bin)
            .args(["solve", "--domain", "square", "--eps", "0.1", "--h", "0.03125", "--forcing", "ball:0.3,0.4,0.2,1"])
            .arg("--out")
            .arg(&out)
            .arg("--report")
            .arg(&report)
            .status()
            .ok()?;
        if !status.success() {
            return None;
        }
        Some((std::fs::read(&out).ok()?, std::fs::read(&report).ok()?))
    };
    match (run("a"), run("b")) {
        (Some(a), Some(b)) => a == b && !a.0.is_empty() && Path::new(bin).exists(),
        _ => false,
    }
}

fn main() {
    let mut tally = BoundTally { solves: 0, failures: Vec::new() };
    let sweeps =
        Sweeps { interval: run_sweep(DomainSpec::unit_interval()), square: run_sweep(DomainSpec::unit_square()) };
    let results = vec![
        ("1 oracle agreement, interval", criterion_1()),
        ("2 oracle agreement, radial disk", criterion_2()),
        ("3 interval positivity for all tensions", criterion_3(&mut tally)),
        ("4 square positivity at eps 1/64", criterion_4(&mut tally)),
        ("5 asymptotic law M ~ eps", criterion_5(&sweeps, &mut tally)),
        ("6 boundary trace law", criterion_6(&sweeps)),
        ("7 blow-up profile", criterion_7(&sweeps)),
        ("8 collar mass", criterion_8(&sweeps)),
        ("9 convergence metrics decrease", criterion_9(&sweeps)),
        ("10 discrete bound suite", criterion_10(&tally)),
        ("11 analytic checks", criterion_11(&sweeps)),
        ("12 infrastructure", criterion_12()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
