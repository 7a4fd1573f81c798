//! CSV and JSON persistence with atomic writes.
//!
//! Floats in CSV files carry 17 significant digits. JSON uses the shortest
//! representation that round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::linalg::{SolveReport, SparseOperator};
use crate::mesh::{Field, Grid};
use crate::threshold::SweepRow;

/// `{:.16e}`: one leading digit plus sixteen decimals.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

/// Header `x,u` (interval), `r,u` (radial disk) or `x,y,u`; nodes in storage order.
pub fn field_csv(u: &Field) -> String {
    let grid = u.grid();
    let mut out = String::new();
    out.push_str(if grid.is_two_dimensional() {
        "x,y,u\n"
    } else if grid.is_radial() {
        "r,u\n"
    } else {
        "x,u\n"
    });
    for (k, v) in u.values().iter().enumerate() {
        let [x, y] = grid.coords(grid.node_at(k));
        if grid.is_two_dimensional() {
            let _ = writeln!(out, "{},{},{}", fmt_f64(x), fmt_f64(y), fmt_f64(*v));
        } else {
            let _ = writeln!(out, "{},{}", fmt_f64(x), fmt_f64(*v));
        }
    }
    out
}

pub fn write_field_csv(path: &Path, u: &Field) -> Result<()> {
    write_atomic(path, field_csv(u).as_bytes())
}

/// Read nodal values written by [`field_csv`]; the last column holds the values and the
/// coordinates must match `grid`.
pub fn read_field_csv(path: &Path, grid: &Grid) -> Result<Field> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(csv_error)?;
    let dim = if grid.is_two_dimensional() { 2 } else { 1 };
    let mut values = Vec::with_capacity(grid.node_count());
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        if record.len() != dim + 1 {
            return Err(Error::InvalidForcing(format!(
                "line {}: expected {} columns, found {}",
                k + 2,
                dim + 1,
                record.len()
            )));
        }
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::InvalidForcing(format!("line {}: `{s}` is not a number", k + 2)))
        };
        if k >= grid.node_count() {
            return Err(Error::GridMismatch(format!("file has more than {} rows", grid.node_count())));
        }
        let xy = grid.coords(grid.node_at(k));
        for c in 0..dim {
            let got = parse(&record[c])?;
            if (got - xy[c]).abs() > 1e-9 * (1.0 + xy[c].abs()) {
                return Err(Error::GridMismatch(format!(
                    "line {}: coordinate {got} does not match grid coordinate {}",
                    k + 2,
                    xy[c]
                )));
            }
        }
        values.push(parse(&record[dim])?);
    }
    if values.len() != grid.node_count() {
        return Err(Error::GridMismatch(format!(
            "file has {} rows, grid has {} nodes",
            values.len(),
            grid.node_count()
        )));
    }
    Field::new(grid, values)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidForcing(format!("malformed CSV: {other:?}")),
    }
}

/// Rows `t,u,du,d2u`.
pub fn profile_csv(rows: &[[f64; 4]]) -> String {
    let mut out = String::from("t,u,du,d2u\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(r[0]), fmt_f64(r[1]), fmt_f64(r[2]), fmt_f64(r[3]));
    }
    out
}

pub const SWEEP_HEADER: &str =
    "eps,h,min_u,is_nonneg,L_minus,L_plus,M,M_over_eps,beta,profile_residual,hopf_c0,collar_mass,h1_v,l2_eps_lap";

/// Sweep table; failed rows keep `eps` and `h` and leave the other columns empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let mut cells = vec![fmt_f64(row.eps), opt(row.h)];
        match &row.report {
            Some(r) => cells.extend([
                fmt_f64(r.positivity.min),
                r.positivity.is_nonneg.to_string(),
                fmt_f64(r.trace.l_minus),
                fmt_f64(r.trace.l_plus),
                fmt_f64(r.trace.m),
                fmt_f64(r.trace.m_over_eps),
                opt(r.beta),
                opt(r.profile_residual),
                fmt_f64(r.hopf_c0),
                fmt_f64(r.collar_mass),
                fmt_f64(r.conv.h1_v),
                fmt_f64(r.conv.l2_eps_lap),
            ]),
            None => cells.extend(std::iter::repeat_n(String::new(), 12)),
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Operator dump, one `row col value` triplet per line.
pub fn write_operator(path: &Path, a: &SparseOperator) -> Result<()> {
    let mut buf = Vec::new();
    a.write_coordinate(&mut buf)?;
    write_atomic(path, &buf)
}

/// Provenance written next to every CLI output. Only this file carries timestamps and
/// timings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: serde_json::Value,
    pub solver_tolerance: f64,
    pub solver_max_iterations: usize,
    pub solves: Vec<SolveReport>,
    pub wall_seconds: f64,
    pub workers: usize,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// Manifest path for an output file: `out.csv` → `out.csv.manifest.json`.
    pub fn path_for(output: &Path) -> std::path::PathBuf {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}

pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DomainSpec;

    #[test]
    fn field_roundtrip() {
        let g = Grid::new(DomainSpec::Rectangle { lx: 1.0, ly: 0.5 }, 0.25).unwrap();
        let u = Field::from_fn(&g, |x, y| x * y + 1.0 / 3.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        write_field_csv(&path, &u).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y,u\n"));
        assert_eq!(text.lines().count(), 1 + g.node_count());
        let back = read_field_csv(&path, &g).unwrap();
        assert_eq!(back.values(), u.values());

        let other = Grid::new(DomainSpec::unit_square(), 0.25).unwrap();
        assert!(read_field_csv(&path, &other).is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_f64(1.0 / 3.0);
        let mantissa = s.split('e').next().unwrap().replace('.', "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn sweep_csv_header_and_failed_rows() {
        let rows = vec![SweepRow { eps: 0.5, h: Some(0.0625), report: None, error: Some("boom".into()) }];
        let text = sweep_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER);
        assert_eq!(lines.next().unwrap().split(',').count(), 14);
    }

    #[test]
    fn manifest_path() {
        assert_eq!(RunManifest::path_for(Path::new("out/u.csv")), Path::new("out/u.csv.manifest.json"));
    }
}
