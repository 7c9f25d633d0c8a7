use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use secres_core::criterion::{pi_indicator, PiReport};
use secres_core::frequency::{compare, max_sampling_interval, PrecessionReport};
use secres_core::integrator::{integrate, osculating_series, IntegrationSettings};
use secres_core::secular::{envelope, LaplaceLagrange, Matrix2, SecularModel, SecularModes};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{analytic_rows, numeric_rows, render_csv, write_atomic};
use crate::schema::{load, LoadedSystem, Overrides};

const ARCSEC_PER_RAD: f64 = 180.0 / PI * 3600.0;

pub fn cmd_integrate(file: &Path, out: &Path, overrides: &Overrides) -> CliResult<()> {
    let sys = load(file, overrides)?;
    let traj = integrate(&sys.config, &sys.settings).map_err(|e| CliError::integration(e.to_string()))?;
    let elements = osculating_series(&traj).map_err(|e| CliError::integration(e.to_string()))?;
    write_atomic(out, render_csv(&numeric_rows(&traj, &elements)).as_bytes())
}

#[derive(Debug, Serialize)]
struct ModesJson {
    g_rad_per_yr: [f64; 2],
    g_arcsec_per_yr: [f64; 2],
    /// Columns are modes.
    modes: Matrix2,
    amplitudes: [f64; 2],
    phases_rad: [f64; 2],
    secular_period_yr: f64,
    degenerate: bool,
    /// Per planet `[e_min, e_max]`.
    envelope: [[f64; 2]; 2],
}

impl From<&SecularModes> for ModesJson {
    fn from(m: &SecularModes) -> Self {
        ModesJson {
            g_rad_per_yr: m.g,
            g_arcsec_per_yr: m.g.map(|g| g * ARCSEC_PER_RAD),
            modes: m.modes,
            amplitudes: m.amplitudes,
            phases_rad: m.phases,
            secular_period_yr: m.secular_period(),
            degenerate: m.degenerate,
            envelope: envelope(m).map(|(lo, hi)| [lo, hi]),
        }
    }
}

#[derive(Debug, Serialize)]
struct SecularJson<'a> {
    name: &'a str,
    /// `null` when the speed of light is infinite.
    c_au_per_yr: Option<f64>,
    laplace_lagrange: &'a LaplaceLagrange,
    /// Quadratic form of the Newtonian secular Hamiltonian.
    a: Matrix2,
    /// `a` plus the relativistic diagonal.
    b: Matrix2,
    basis_scale: [f64; 2],
    newtonian: ModesJson,
    relativistic: ModesJson,
    pi: PiReport,
}

pub fn secular_report(sys: &LoadedSystem, threshold: f64) -> CliResult<String> {
    let model = SecularModel::new(&sys.config).map_err(|e| CliError::schema(e.to_string()))?;
    let c = sys.config.constants.c;
    let doc = SecularJson {
        name: &sys.name,
        c_au_per_yr: c.is_finite().then_some(c),
        laplace_lagrange: &model.laplace_lagrange,
        a: model.matrices.a,
        b: model.matrices.b,
        basis_scale: model.matrices.basis_scale,
        newtonian: (&model.newtonian).into(),
        relativistic: (&model.relativistic).into(),
        pi: pi_indicator(&sys.config, threshold),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    Ok(text)
}

pub fn cmd_secular(file: &Path, overrides: &Overrides, threshold: f64) -> CliResult<String> {
    secular_report(&load(file, overrides)?, threshold)
}

fn flag(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// One row per system: name, Π₁, Π₂ to 7 decimal places, then the two relevance flags.
pub fn cmd_criterion(files: &[impl AsRef<Path>], overrides: &Overrides, threshold: f64) -> CliResult<String> {
    if files.is_empty() {
        return Err(CliError::new(crate::error::Kind::Usage, "criterion needs at least one system file"));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(CliError::new(crate::error::Kind::Usage, format!("--threshold must be positive, got {threshold}")));
    }
    let systems = files.iter().map(|f| load(f.as_ref(), overrides)).collect::<CliResult<Vec<_>>>()?;
    let width = systems.iter().map(|s| s.name.chars().count()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>12}  {:>12}  {:>10}  {:>10}", "system", "pi_1", "pi_2", "relevant_1", "relevant_2")
        .unwrap();
    for s in &systems {
        let r = pi_indicator(&s.config, threshold);
        writeln!(
            out,
            "{:<width$}  {:>12.7}  {:>12.7}  {:>10}  {:>10}",
            s.name,
            r.pi[0],
            r.pi[1],
            flag(r.relevant[0]),
            flag(r.relevant[1])
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CompareJson<'a> {
    name: &'a str,
    c_au_per_yr: Option<f64>,
    t_end_yr: f64,
    dt_out_yr: f64,
    rel_tol: f64,
    max_energy_rel_err: [f64; 2],
    report: &'a PrecessionReport,
}

pub const COMPARE_FILES: [&str; 4] =
    ["numeric_newtonian.csv", "numeric_relativistic.csv", "analytic_newtonian.csv", "analytic_relativistic.csv"];

/// Output interval must resolve the fastest secular time scale with the required margin.
pub fn check_sampling(sys: &LoadedSystem) -> CliResult<()> {
    let model = SecularModel::new(&sys.config).map_err(|e| CliError::schema(e.to_string()))?;
    let max_dt = max_sampling_interval(&model);
    if sys.settings.dt_out > max_dt {
        return Err(CliError::schema(format!(
            "integration.dt_out_yr: {} is too coarse for frequency extraction; at most {max_dt:.6e} is allowed",
            sys.settings.dt_out
        )));
    }
    Ok(())
}

pub fn run_compare(sys: &LoadedSystem, settings: &IntegrationSettings, out_dir: &Path) -> CliResult<PrecessionReport> {
    let c = compare(&sys.config, settings).map_err(|e| CliError::integration(e.to_string()))?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let times = &c.newtonian.trajectory.times;
    let a0 = sys.config.semi_major_axes();
    let series = [
        render_csv(&numeric_rows(&c.newtonian.trajectory, &c.newtonian.elements)),
        render_csv(&numeric_rows(&c.relativistic.trajectory, &c.relativistic.elements)),
        render_csv(&analytic_rows(times, &c.analytic_newton, a0)),
        render_csv(&analytic_rows(times, &c.analytic_rel, a0)),
    ];
    for (name, text) in COMPARE_FILES.iter().zip(&series) {
        write_atomic(&out_dir.join(name), text.as_bytes())?;
    }
    let cval = sys.config.constants.c;
    let doc = CompareJson {
        name: &sys.name,
        c_au_per_yr: cval.is_finite().then_some(cval),
        t_end_yr: settings.t_end,
        dt_out_yr: settings.dt_out,
        rel_tol: settings.rel_tol,
        max_energy_rel_err: [c.newtonian.trajectory.max_energy_error(), c.relativistic.trajectory.max_energy_error()],
        report: &c.report,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    write_atomic(&out_dir.join("report.json"), text.as_bytes())?;
    Ok(c.report)
}

pub fn cmd_compare(file: &Path, out_dir: &Path, overrides: &Overrides) -> CliResult<PrecessionReport> {
    let sys = load(file, overrides)?;
    check_sampling(&sys)?;
    run_compare(&sys, &sys.settings, out_dir)
}

