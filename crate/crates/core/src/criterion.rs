//! Dimensionless indicator of relativistic relevance for the secular motion.
//!
//! `Π_i` approximates the ratio of the relativistic apsidal rate of planet
//! `i` to its Newtonian secular rate in the hierarchical limit `a₁ ≪ a₂`
//! (where `b_{3/2}^(1) ≈ 3α`, `b_{3/2}^(2) ≈ (15/4)α²`).

use serde::{Deserialize, Serialize};

use crate::elements::SystemConfig;

pub const DEFAULT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiReport {
    pub pi: [f64; 2],
    pub threshold: f64,
    /// `Π_i ≥ threshold` per planet.
    pub relevant: [bool; 2],
}

/// `Π_i = 4G a₂³ m₀ (m₀ + m_i) / (c² a_i² a₁² m_{3−i})`.
pub fn pi_values(config: &SystemConfig) -> [f64; 2] {
    let g = config.constants.g;
    let inv_c2 = config.constants.inv_c2();
    let m0 = config.m0;
    let m = config.masses();
    let a = config.semi_major_axes();
    let a2_cubed = a[1] * a[1] * a[1];
    [0, 1].map(|i| 4.0 * g * inv_c2 * a2_cubed * m0 * (m0 + m[i]) / (a[i] * a[i] * a[0] * a[0] * m[1 - i]))
}

pub fn pi_indicator(config: &SystemConfig, threshold: f64) -> PiReport {
    let pi = pi_values(config);
    PiReport { pi, threshold, relevant: pi.map(|p| p >= threshold) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{Constants, Model, OrbitalElements, Planet};
    use crate::secular::{gr_correction, ll_matrix};

    fn system(m0: f64, m1: f64, a1: f64, m2: f64, a2: f64) -> SystemConfig {
        let pl = |m, a| Planet { mass: m, elements: OrbitalElements::new(a, 0.05, 0.0, 0.0).unwrap() };
        SystemConfig::new(m0, [pl(m1, a1), pl(m2, a2)], Model::Relativistic, Constants::default()).unwrap()
    }

    #[test]
    fn inverse_c_squared() {
        let cfg = system(1.1, 1e-4, 0.1, 5e-4, 2.0);
        let c = cfg.constants.c;
        let p1 = pi_values(&cfg);
        let p2 = pi_values(&cfg.with_constants(Constants::with_c(2.0 * c).unwrap()));
        for i in 0..2 {
            assert!((p1[i] / p2[i] - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ratio_between_planets() {
        // Π₁/Π₂ = (m₀+m₁) m₁ a₂² / ((m₀+m₂) m₂ a₁²)
        let cfg = system(0.9, 3e-5, 0.2, 7e-4, 4.0);
        let p = pi_values(&cfg);
        let expect = (0.9 + 3e-5) * 3e-5 * 16.0 / ((0.9 + 7e-4) * 7e-4 * 0.04);
        assert!((p[0] / p[1] - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn tracks_ratio_of_rates_when_hierarchical() {
        for (a1, a2) in [(0.05, 5.0), (0.1, 3.0), (0.3, 2.0)] {
            let cfg = system(1.0, 1e-4, a1, 1e-3, a2);
            let ll = ll_matrix(&cfg).unwrap();
            let gr = gr_correction(&cfg);
            let p = pi_values(&cfg);
            for i in 0..2 {
                let ratio = (2.0 * gr[i][i]).abs() / ll.classical[i][i];
                assert!(p[i] / ratio > 1.0 / 3.0 && p[i] / ratio < 3.0, "{i} {} {ratio}", p[i]);
            }
        }
        let cfg = system(1.0, 1e-4, 0.01, 1e-3, 10.0);
        let ll = ll_matrix(&cfg).unwrap();
        let gr = gr_correction(&cfg);
        let p = pi_values(&cfg);
        let ratio = (2.0 * gr[0][0]).abs() / ll.classical[0][0];
        assert!((p[0] / ratio - 1.0).abs() < 1e-2);
    }

    #[test]
    fn invariant_under_length_rescaling_with_c() {
        // lengths × L and times × L^{3/2} keep G fixed and send c to c/√L
        let cfg = system(1.0, 2e-4, 0.2, 1e-3, 1.5);
        let l = 3.7;
        let mut scaled = cfg;
        for p in scaled.planets.iter_mut() {
            p.elements.a *= l;
        }
        scaled.constants = Constants::with_c(cfg.constants.c / l.sqrt()).unwrap();
        let a = pi_values(&cfg);
        let b = pi_values(&scaled);
        for i in 0..2 {
            assert!((a[i] - b[i]).abs() < 1e-13 * a[i]);
        }
    }

    #[test]
    fn threshold_decision() {
        let cfg = system(1.0, 1e-4, 0.05, 1e-3, 5.0);
        let p = pi_values(&cfg);
        assert!(p[0] > p[1]);
        assert_eq!(pi_indicator(&cfg, p[0]).relevant, [true, false]);
        assert_eq!(pi_indicator(&cfg, p[1]).relevant, [true, true]);
        assert_eq!(pi_indicator(&cfg, p[0] * 1.0001).relevant, [false, false]);
        assert_eq!(pi_indicator(&cfg, DEFAULT_THRESHOLD).threshold, 0.1);
    }
}
