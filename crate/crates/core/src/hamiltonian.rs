//! The planar two-planet Hamiltonian in canonical heliocentric variables.
//!
//! ```text
//! H_N  = Σ_i [ |p_i|²/(2μ_i) − β_i μ_i/|r_i| ] + p₁·p₂/m₀ − G m₁m₂/|r₁ − r₂|
//! H_PN = c⁻² Σ_i [ −γ₁/μ³ (P·P)² − γ₂/μ (P·P)/|r| − γ₃/μ (r·P)²/|r|³ + γ₄ μ/|r|² ]_i
//! P_i  = p_i + (μ_i/m₀) p_{3−i}
//! ```
//!
//! Only the star–planet post-Newtonian terms are present. Gradients are exact
//! analytic partial derivatives, used directly as canonical equations of
//! motion by the integrator.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::elements::{BodyState, Model, SystemConfig};
use crate::error::{Error, Result};

/// Positions and momenta of both planets at time `t` (yr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub bodies: [BodyState; 2],
    pub t: f64,
}

impl PhaseState {
    pub fn new(bodies: [BodyState; 2], t: f64) -> Self {
        PhaseState { bodies, t }
    }

    /// Osculating state built from the configured elements, at `t = 0`.
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let mut bodies = [BodyState::new(Vector2::zeros(), Vector2::zeros()); 2];
        for (i, body) in bodies.iter_mut().enumerate() {
            let pl = &config.planets[i];
            *body = crate::elements::elements_to_state(&pl.elements, config.m0, pl.mass, &config.constants)?;
        }
        Ok(PhaseState { bodies, t: 0.0 })
    }

    /// Flattened `[r₁, r₂, p₁, p₂]`.
    pub fn to_array(&self) -> [f64; 8] {
        let [b1, b2] = &self.bodies;
        [b1.r.x, b1.r.y, b2.r.x, b2.r.y, b1.p.x, b1.p.y, b2.p.x, b2.p.y]
    }

    pub fn from_array(y: &[f64; 8], t: f64) -> Self {
        PhaseState {
            bodies: [
                BodyState::new(Vector2::new(y[0], y[1]), Vector2::new(y[4], y[5])),
                BodyState::new(Vector2::new(y[2], y[3]), Vector2::new(y[6], y[7])),
            ],
            t,
        }
    }

    /// Total angular momentum `Σ r_i × p_i` (z component).
    pub fn angular_momentum(&self) -> f64 {
        self.bodies.iter().map(|b| b.r.x * b.p.y - b.r.y * b.p.x).sum()
    }
}

/// Mass-dependent coefficients of one planet's post-Newtonian term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnCoefficients {
    pub mu: f64,
    pub beta: f64,
    pub upsilon: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

pub fn pn_coefficients(m0: f64, m: f64, g: f64) -> PnCoefficients {
    let mu = m0 * m / (m0 + m);
    let beta = g * (m0 + m);
    let upsilon = m0 * m / ((m0 + m) * (m0 + m));
    PnCoefficients {
        mu,
        beta,
        upsilon,
        gamma1: (1.0 - 3.0 * upsilon) / 8.0,
        gamma2: beta * (3.0 + upsilon) / 2.0,
        gamma3: beta * upsilon / 2.0,
        gamma4: beta * beta / 2.0,
    }
}

/// Partial derivatives of the Hamiltonian with respect to every `r_i`, `p_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradients {
    pub dr: [Vector2<f64>; 2],
    pub dp: [Vector2<f64>; 2],
}

/// Everything the Hamiltonian needs, precomputed from a [`SystemConfig`].
#[derive(Debug, Clone, Copy)]
pub struct HamiltonianParams {
    pub m0: f64,
    pub pn: [PnCoefficients; 2],
    /// `G m₁ m₂`.
    pub g_m1m2: f64,
    pub inv_c2: f64,
    pub relativistic: bool,
}

impl HamiltonianParams {
    pub fn new(config: &SystemConfig) -> Self {
        let g = config.constants.g;
        let [m1, m2] = config.masses();
        HamiltonianParams {
            m0: config.m0,
            pn: [pn_coefficients(config.m0, m1, g), pn_coefficients(config.m0, m2, g)],
            g_m1m2: g * m1 * m2,
            inv_c2: config.constants.inv_c2(),
            relativistic: config.model == Model::Relativistic,
        }
    }

    #[inline]
    fn corrected_momenta(&self, p: &[Vector2<f64>; 2]) -> [Vector2<f64>; 2] {
        [
            p[0] + p[1] * (self.pn[0].mu / self.m0),
            p[1] + p[0] * (self.pn[1].mu / self.m0),
        ]
    }

    pub fn h_newton(&self, s: &PhaseState) -> Result<f64> {
        let [b1, b2] = &s.bodies;
        let (r1, r2) = nonzero_distances(s)?;
        let r12 = (b1.r - b2.r).norm();
        if r12 == 0.0 {
            return Err(Error::Singularity("planets coincide".into()));
        }
        let kepler = |b: &BodyState, c: &PnCoefficients, r: f64| b.p.norm_squared() / (2.0 * c.mu) - c.beta * c.mu / r;
        Ok(kepler(b1, &self.pn[0], r1) + kepler(b2, &self.pn[1], r2) + b1.p.dot(&b2.p) / self.m0
            - self.g_m1m2 / r12)
    }

    pub fn h_pn(&self, s: &PhaseState) -> Result<f64> {
        nonzero_distances(s)?;
        let big_p = self.corrected_momenta(&[s.bodies[0].p, s.bodies[1].p]);
        let mut sum = 0.0;
        for i in 0..2 {
            let c = &self.pn[i];
            let r = s.bodies[i].r;
            let rn = r.norm();
            let pp = big_p[i].norm_squared();
            let rp = r.dot(&big_p[i]);
            sum += -c.gamma1 / (c.mu * c.mu * c.mu) * pp * pp - c.gamma2 / c.mu * pp / rn
                - c.gamma3 / c.mu * rp * rp / (rn * rn * rn)
                + c.gamma4 * c.mu / (rn * rn);
        }
        Ok(self.inv_c2 * sum)
    }

    /// Value of the Hamiltonian selected by the model.
    pub fn energy(&self, s: &PhaseState) -> Result<f64> {
        let h = self.h_newton(s)?;
        if self.relativistic {
            Ok(h + self.h_pn(s)?)
        } else {
            Ok(h)
        }
    }

    pub fn gradients(&self, s: &PhaseState) -> Result<Gradients> {
        let [b1, b2] = &s.bodies;
        nonzero_distances(s)?;
        let d = b1.r - b2.r;
        let d2 = d.norm_squared();
        if d2 == 0.0 {
            return Err(Error::Singularity("planets coincide".into()));
        }
        let mut dr = [Vector2::zeros(); 2];
        let mut dp = [Vector2::zeros(); 2];

        for i in 0..2 {
            let c = &self.pn[i];
            let b = &s.bodies[i];
            let rn2 = b.r.norm_squared();
            let rn = rn2.sqrt();
            dr[i] = b.r * (c.beta * c.mu / (rn2 * rn));
            dp[i] = b.p / c.mu + s.bodies[1 - i].p / self.m0;
        }
        let mutual = d * (self.g_m1m2 / (d2 * d2.sqrt()));
        dr[0] += mutual;
        dr[1] -= mutual;

        if self.relativistic && self.inv_c2 != 0.0 {
            let big_p = self.corrected_momenta(&[b1.p, b2.p]);
            let mut d_big_p = [Vector2::zeros(); 2];
            for i in 0..2 {
                let c = &self.pn[i];
                let r = s.bodies[i].r;
                let rn2 = r.norm_squared();
                let rn = rn2.sqrt();
                let rn3 = rn2 * rn;
                let pv = big_p[i];
                let pp = pv.norm_squared();
                let rp = r.dot(&pv);
                d_big_p[i] = pv * (-4.0 * c.gamma1 / (c.mu * c.mu * c.mu) * pp - 2.0 * c.gamma2 / (c.mu * rn))
                    - r * (2.0 * c.gamma3 / c.mu * rp / rn3);
                let dri = r * (c.gamma2 / c.mu * pp / rn3 + 3.0 * c.gamma3 / c.mu * rp * rp / (rn3 * rn2)
                    - 2.0 * c.gamma4 * c.mu / (rn2 * rn2))
                    - pv * (2.0 * c.gamma3 / c.mu * rp / rn3);
                dr[i] += dri * self.inv_c2;
            }
            // P_i depends on p_i directly and on p_{3−i} through μ_i/m₀
            dp[0] += (d_big_p[0] + d_big_p[1] * (self.pn[1].mu / self.m0)) * self.inv_c2;
            dp[1] += (d_big_p[1] + d_big_p[0] * (self.pn[0].mu / self.m0)) * self.inv_c2;
        }
        Ok(Gradients { dr, dp })
    }
}

fn nonzero_distances(s: &PhaseState) -> Result<(f64, f64)> {
    let r1 = s.bodies[0].r.norm();
    let r2 = s.bodies[1].r.norm();
    if r1 == 0.0 || r2 == 0.0 {
        return Err(Error::Singularity("planet at the star's position".into()));
    }
    Ok((r1, r2))
}

/// Newtonian Hamiltonian (Keplerian part plus planet–planet perturbation).
pub fn h_newton(state: &PhaseState, config: &SystemConfig) -> Result<f64> {
    HamiltonianParams::new(config).h_newton(state)
}

/// First post-Newtonian star–planet correction, including the `1/c²` factor.
pub fn h_pn(state: &PhaseState, config: &SystemConfig) -> Result<f64> {
    HamiltonianParams::new(config).h_pn(state)
}

/// Gradients of the Hamiltonian selected by `config.model`.
pub fn gradients(state: &PhaseState, config: &SystemConfig) -> Result<Gradients> {
    HamiltonianParams::new(config).gradients(state)
}
