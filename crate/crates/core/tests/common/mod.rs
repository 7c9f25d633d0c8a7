#![allow(dead_code)]

use std::f64::consts::PI;

use secres_core::{Constants, Model, OrbitalElements, Planet, SystemConfig};

pub const JUPITER_MASS: f64 = 1.0 / 1047.3486;
pub const ARCSEC_PER_RAD: f64 = 180.0 / PI * 3600.0;

pub fn planet(mass: f64, a: f64, e: f64, varpi_deg: f64, mean_anomaly_deg: f64) -> Planet {
    let d = PI / 180.0;
    Planet { mass, elements: OrbitalElements::new(a, e, varpi_deg * d, mean_anomaly_deg * d).unwrap() }
}

/// Same parameters as `systems/hd169830.json`; `e_scale` multiplies both eccentricities.
pub fn hd169830(model: Model, e_scale: f64) -> SystemConfig {
    SystemConfig::new(
        1.4,
        [
            planet(2.88 * JUPITER_MASS, 0.81, 0.31 * e_scale, 148.0, 0.0),
            planet(4.04 * JUPITER_MASS, 3.60, 0.33 * e_scale, 252.0, 0.0),
        ],
        model,
        Constants::default(),
    )
    .unwrap()
}

pub fn hd11964(model: Model) -> SystemConfig {
    SystemConfig::new(
        1.125,
        [
            planet(0.0788 * JUPITER_MASS, 0.229, 0.30, 102.0, 0.0),
            planet(0.622 * JUPITER_MASS, 3.16, 0.041, 155.0, 0.0),
        ],
        model,
        Constants::default(),
    )
    .unwrap()
}

/// Mercury around the Sun with a negligible outer companion.
pub fn mercury(model: Model, constants: Constants) -> SystemConfig {
    SystemConfig::new(
        1.0,
        [planet(1.66e-7, 0.387, 0.2056, 77.0, 0.0), planet(1e-12, 20.0, 0.0, 0.0, 0.0)],
        model,
        constants,
    )
    .unwrap()
}

/// `3β^{3/2} / (c² a^{5/2} (1 − e²))`, rad/yr.
pub fn pn_apsidal_rate(m0: f64, m: f64, a: f64, e: f64, c: f64) -> f64 {
    let beta = 4.0 * PI * PI * (m0 + m);
    3.0 * beta.powf(1.5) / (c * c * a.powf(2.5) * (1.0 - e * e))
}
