//! Result files: fixed-format CSV series and atomic writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use secres_core::integrator::CartesianTrajectory;
use secres_core::secular::EccentricityVector;
use secres_core::OrbitalElements;

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: &str = "t_yr,e1,varpi1_rad,e2,varpi2_rad,a1_au,a2_au,energy_rel_err";

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub e: [f64; 2],
    pub varpi: [f64; 2],
    pub a: [f64; 2],
    pub energy_rel_err: f64,
}

pub fn version_line() -> String {
    format!("# secres {}", env!("CARGO_PKG_VERSION"))
}

/// Comment line, header, then one line per row; every value as `{:.15e}`, LF endings.
pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(160 * (rows.len() + 2));
    out.push_str(&version_line());
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let vals = [r.t, r.e[0], r.varpi[0], r.e[1], r.varpi[1], r.a[0], r.a[1], r.energy_rel_err];
        for (i, v) in vals.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.15e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn numeric_rows(traj: &CartesianTrajectory, elements: &[Vec<OrbitalElements>; 2]) -> Vec<Row> {
    (0..traj.len())
        .map(|j| Row {
            t: traj.times[j],
            e: [elements[0][j].e, elements[1][j].e],
            varpi: [elements[0][j].varpi, elements[1][j].varpi],
            a: [elements[0][j].a, elements[1][j].a],
            energy_rel_err: traj.energy_rel_err[j],
        })
        .collect()
}

/// Rows of an analytic series; semi-major axes are constant and the energy column is zero.
pub fn analytic_rows(times: &[f64], series: &[EccentricityVector], a: [f64; 2]) -> Vec<Row> {
    times
        .iter()
        .zip(series)
        .map(|(&t, z)| Row { t, e: [z.e(0), z.e(1)], varpi: [z.varpi(0), z.varpi(1)], a, energy_rel_err: 0.0 })
        .collect()
}

/// Write through a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
