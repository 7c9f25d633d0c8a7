//! System description files.
//!
//! ```json
//! {
//!   "name": "HD 169830",
//!   "star_mass_msun": 1.4,
//!   "planets": [
//!     {"mass_msun": 0.00275, "a_au": 0.81, "e": 0.31, "varpi_deg": 148.0, "mean_anomaly_deg": 0.0},
//!     {"mass_msun": 0.00386, "a_au": 3.60, "e": 0.33, "varpi_deg": 252.0, "mean_anomaly_deg": 0.0}
//!   ],
//!   "model": "relativistic",
//!   "integration": {"t_end_yr": 1.0e5, "dt_out_yr": 50.0, "rel_tol": 1e-11}
//! }
//! ```
//!
//! Angles are read in degrees and converted to radians. The inner planet
//! comes first. Optional `label` (per planet), `provenance` and `notes`
//! strings are carried along but not interpreted.

use std::path::Path;

use secres_core::integrator::IntegrationSettings;
use secres_core::{Constants, Model, OrbitalElements, Planet, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanetEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub mass_msun: f64,
    pub a_au: f64,
    pub e: f64,
    pub varpi_deg: f64,
    pub mean_anomaly_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationEntry {
    pub t_end_yr: f64,
    pub dt_out_yr: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: String,
    pub star_mass_msun: f64,
    pub planets: Vec<PlanetEntry>,
    pub model: Model,
    pub integration: IntegrationEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Command-line adjustments applied on top of a file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Speed of light, AU/yr; `inf` switches the correction off.
    pub c: Option<f64>,
    pub rel_tol: Option<f64>,
}

/// A validated file ready for the core library.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSystem {
    pub name: String,
    pub config: SystemConfig,
    pub settings: IntegrationSettings,
}

fn finite(field: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::schema(format!("{field}: must be a finite number, got {x}")))
    }
}

fn positive(field: &str, x: f64) -> CliResult<f64> {
    if finite(field, x)? > 0.0 {
        Ok(x)
    } else {
        Err(CliError::schema(format!("{field}: must be positive, got {x}")))
    }
}

impl SystemFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                CliError::schema(inner.to_string())
            } else {
                CliError::schema(format!("{path}: {inner}"))
            }
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::schema(format!("{}: {}", path.display(), e.message)))
    }

    /// Range checks and conversion; every error names the offending field.
    pub fn validate(&self, overrides: &Overrides) -> CliResult<LoadedSystem> {
        if self.name.trim().is_empty() {
            return Err(CliError::schema("name: must not be empty"));
        }
        let m0 = positive("star_mass_msun", self.star_mass_msun)?;
        if self.planets.len() != 2 {
            return Err(CliError::schema(format!("planets: exactly 2 entries required, got {}", self.planets.len())));
        }
        let mut planets = Vec::with_capacity(2);
        for (i, p) in self.planets.iter().enumerate() {
            let f = |name: &str| format!("planets[{i}].{name}");
            let mass = positive(&f("mass_msun"), p.mass_msun)?;
            if mass >= m0 {
                return Err(CliError::schema(format!("{}: must be below star_mass_msun, got {mass}", f("mass_msun"))));
            }
            let a = positive(&f("a_au"), p.a_au)?;
            let e = finite(&f("e"), p.e)?;
            if !(0.0..1.0).contains(&e) {
                return Err(CliError::schema(format!("{}: must lie in [0, 1), got {e}", f("e"))));
            }
            let varpi = finite(&f("varpi_deg"), p.varpi_deg)?.to_radians();
            let mean_anomaly = finite(&f("mean_anomaly_deg"), p.mean_anomaly_deg)?.to_radians();
            let elements = OrbitalElements::new(a, e, varpi, mean_anomaly)
                .map_err(|err| CliError::schema(format!("planets[{i}]: {err}")))?;
            planets.push(Planet { mass, elements });
        }
        if planets[0].elements.a >= planets[1].elements.a {
            return Err(CliError::schema(format!(
                "planets[1].a_au: planets must be ordered inner first, got a = {} after {}",
                planets[1].elements.a, planets[0].elements.a
            )));
        }

        let constants = match overrides.c {
            None => Constants::default(),
            Some(c) => Constants::with_c(c).map_err(|e| CliError::schema(format!("--c-override: {e}")))?,
        };
        let config = SystemConfig::new(m0, [planets[0], planets[1]], self.model, constants)
            .map_err(|e| CliError::schema(e.to_string()))?;

        let it = &self.integration;
        let t_end = positive("integration.t_end_yr", it.t_end_yr)?;
        let dt_out = positive("integration.dt_out_yr", it.dt_out_yr)?;
        if dt_out > t_end {
            return Err(CliError::schema(format!("integration.dt_out_yr: exceeds t_end_yr ({dt_out} > {t_end})")));
        }
        let (tol_field, rel_tol) = match overrides.rel_tol {
            Some(t) => ("--rel-tol", t),
            None => ("integration.rel_tol", it.rel_tol),
        };
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(CliError::schema(format!("{tol_field}: must lie in (0, 1e-6], got {rel_tol}")));
        }
        let settings = IntegrationSettings::new(t_end, dt_out, rel_tol).map_err(|e| CliError::schema(e.to_string()))?;
        Ok(LoadedSystem { name: self.name.clone(), config, settings })
    }
}

pub fn load(path: &Path, overrides: &Overrides) -> CliResult<LoadedSystem> {
    SystemFile::read(path)?
        .validate(overrides)
        .map_err(|e| CliError::schema(format!("{}: {}", path.display(), e.message)))
}
