//! Orbital elements, heliocentric states and Poincaré secular variables.
//!
//! Units throughout the crate are solar masses, astronomical units and Julian
//! years, so the gravitational constant is exactly `4π²` and a circular orbit
//! of radius 1 AU around one solar mass has mean motion `2π` rad/yr.
//!
//! Geometry is planar. A heliocentric state pairs the position `r` of a planet
//! relative to the star with the canonical momentum `p`; the osculating
//! elements of a state are those of the Keplerian problem with gravitational
//! parameter `β = G(m₀ + m)` and reduced mass `μ = m₀m/(m₀ + m)`, i.e. the
//! velocity entering the conic is `p/μ`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
/// IAU 2012 astronomical unit in m.
const ASTRONOMICAL_UNIT_SI: f64 = 1.495_978_707e11;
/// Julian year in s.
const JULIAN_YEAR_SI: f64 = 365.25 * 86_400.0;

/// Physical constants in internal units (M☉, AU, yr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Gravitational constant, AU³ yr⁻² M☉⁻¹.
    pub g: f64,
    /// Speed of light, AU yr⁻¹. May be `f64::INFINITY` for the Newtonian limit.
    pub c: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            g: 4.0 * PI * PI,
            c: SPEED_OF_LIGHT_SI * JULIAN_YEAR_SI / ASTRONOMICAL_UNIT_SI,
        }
    }
}

impl Constants {
    /// Default constants with the speed of light replaced.
    pub fn with_c(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain(format!("speed of light must be positive, got {c}")));
        }
        Ok(Constants { c, ..Constants::default() })
    }

    /// `1/c²`, exactly zero when `c` is infinite.
    #[inline]
    pub fn inv_c2(&self) -> f64 {
        1.0 / (self.c * self.c)
    }
}

/// Which Hamiltonian governs the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Newtonian,
    Relativistic,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Newtonian => "newtonian",
            Model::Relativistic => "relativistic",
        }
    }
}

/// Reduce an angle to `[0, 2π)`.
#[inline]
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Planar osculating elements. Angles are radians in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    /// Semi-major axis, AU.
    pub a: f64,
    /// Eccentricity.
    pub e: f64,
    /// Longitude of perihelion, rad.
    pub varpi: f64,
    /// Mean anomaly, rad.
    pub mean_anomaly: f64,
}

impl OrbitalElements {
    /// Validate and build a set of elements, reducing both angles.
    pub fn new(a: f64, e: f64, varpi: f64, mean_anomaly: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("semi-major axis must be positive and finite, got {a}")));
        }
        if !(0.0..1.0).contains(&e) {
            return Err(Error::domain(format!("eccentricity must lie in [0, 1), got {e}")));
        }
        if !varpi.is_finite() || !mean_anomaly.is_finite() {
            return Err(Error::domain("angles must be finite"));
        }
        Ok(OrbitalElements {
            a,
            e,
            varpi: reduce_angle(varpi),
            mean_anomaly: reduce_angle(mean_anomaly),
        })
    }

    /// `(h, k) = (e sin ϖ, e cos ϖ)`.
    pub fn hk(&self) -> (f64, f64) {
        let (s, c) = self.varpi.sin_cos();
        (self.e * s, self.e * c)
    }
}

/// Heliocentric position and conjugate canonical momentum of one planet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub r: Vector2<f64>,
    pub p: Vector2<f64>,
}

impl BodyState {
    pub fn new(r: Vector2<f64>, p: Vector2<f64>) -> Self {
        BodyState { r, p }
    }

    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(self.p.iter()).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planet {
    /// Mass, M☉.
    pub mass: f64,
    pub elements: OrbitalElements,
}

/// Star, two planets (inner first), model switch and constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Star mass, M☉.
    pub m0: f64,
    pub planets: [Planet; 2],
    pub model: Model,
    pub constants: Constants,
}

impl SystemConfig {
    pub fn new(m0: f64, planets: [Planet; 2], model: Model, constants: Constants) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::domain(format!("star mass must be positive, got {m0}")));
        }
        for (i, pl) in planets.iter().enumerate() {
            if !(pl.mass > 0.0) || !pl.mass.is_finite() {
                return Err(Error::domain(format!("planet {} mass must be positive, got {}", i + 1, pl.mass)));
            }
        }
        let (a1, a2) = (planets[0].elements.a, planets[1].elements.a);
        if !(a1 < a2) {
            return Err(Error::domain(format!(
                "planet 1 must be the inner planet (a1 < a2), got a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(SystemConfig { m0, planets, model, constants })
    }

    /// Same system under another model.
    pub fn with_model(&self, model: Model) -> Self {
        SystemConfig { model, ..*self }
    }

    pub fn with_constants(&self, constants: Constants) -> Self {
        SystemConfig { constants, ..*self }
    }

    pub fn masses(&self) -> [f64; 2] {
        [self.planets[0].mass, self.planets[1].mass]
    }

    pub fn semi_major_axes(&self) -> [f64; 2] {
        [self.planets[0].elements.a, self.planets[1].elements.a]
    }

    /// Reduced mass `μ_i = m₀m_i/(m₀+m_i)` of planet `i` (0-based).
    pub fn reduced_mass(&self, i: usize) -> f64 {
        reduced_mass(self.m0, self.planets[i].mass)
    }

    /// Gravitational parameter `β_i = G(m₀+m_i)` of planet `i` (0-based).
    pub fn beta(&self, i: usize) -> f64 {
        self.constants.g * (self.m0 + self.planets[i].mass)
    }
}

#[inline]
pub fn reduced_mass(m0: f64, m: f64) -> f64 {
    m0 * m / (m0 + m)
}

/// Solve Kepler's equation `E − e sin E = M` for the eccentric anomaly.
///
/// Damped Newton iteration from `E₀ = M + 0.85 e sign(sin M)`; if it has not
/// converged after 50 iterations the root is bracketed in `[M − e, M + e]`
/// and bisected. The result lives on the branch continuous in `M`, i.e.
/// `E(M + 2π) = E(M) + 2π`.
pub fn kepler_solve(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::domain(format!("eccentricity must lie in [0, 1), got {e}")));
    }
    if !mean_anomaly.is_finite() {
        return Err(Error::domain("mean anomaly must be finite"));
    }
    // work on the principal branch M ∈ [−π, π) and shift back afterwards
    let turns = ((mean_anomaly + PI) / TAU).floor();
    let m = mean_anomaly - turns * TAU;
    let shift = turns * TAU;
    if e == 0.0 || m == 0.0 {
        return Ok(m + shift);
    }

    const TOL: f64 = 1e-15;
    let residual = |ea: f64| ea - e * ea.sin() - m;
    let mut ea = m + 0.85 * e * m.sin().signum();
    let mut converged = false;
    for _ in 0..50 {
        let f = residual(ea);
        let fp = 1.0 - e * ea.cos();
        // |E − M| ≤ e bounds any sensible correction
        let step = (f / fp).clamp(-1.0, 1.0);
        ea -= step;
        if step.abs() <= TOL * ea.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged || residual(ea).abs() > 1e-14 {
        let (mut lo, mut hi) = (m - e, m + e);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if residual(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ea = 0.5 * (lo + hi);
    }
    Ok(ea + shift)
}

/// Osculating heliocentric state of a planet with the given elements.
///
/// The momentum is `μ ṙ` where `ṙ` is the Keplerian velocity for
/// `β = G(m₀+m)`.
pub fn elements_to_state(el: &OrbitalElements, m0: f64, m: f64, constants: &Constants) -> Result<BodyState> {
    let OrbitalElements { a, e, varpi, mean_anomaly } = OrbitalElements::new(el.a, el.e, el.varpi, el.mean_anomaly)?;
    let beta = constants.g * (m0 + m);
    let mu = reduced_mass(m0, m);
    let ea = kepler_solve(mean_anomaly, e)?;
    let (sin_e, cos_e) = ea.sin_cos();
    let root = (1.0 - e * e).sqrt();
    let n = (beta / (a * a * a)).sqrt();

    let x = a * (cos_e - e);
    let y = a * root * sin_e;
    let edot = n / (1.0 - e * cos_e);
    let vx = -a * sin_e * edot;
    let vy = a * root * cos_e * edot;

    let (s, c) = varpi.sin_cos();
    let r = Vector2::new(c * x - s * y, s * x + c * y);
    let v = Vector2::new(c * vx - s * vy, s * vx + c * vy);
    Ok(BodyState { r, p: v * mu })
}

/// Osculating elements of a heliocentric state (inverse of [`elements_to_state`]).
///
/// For an exactly circular state the perihelion is undefined; it is then
/// reported as 0 and the mean anomaly carries the mean longitude.
pub fn state_to_elements(s: &BodyState, m0: f64, m: f64, constants: &Constants) -> Result<OrbitalElements> {
    let beta = constants.g * (m0 + m);
    let mu = reduced_mass(m0, m);
    let r = s.r;
    let v = s.p / mu;
    let rn = r.norm();
    if !(rn > 0.0) || !s.is_finite() {
        return Err(Error::Singularity(format!("state has |r| = {rn}")));
    }
    let v2 = v.norm_squared();
    let energy = 0.5 * v2 - beta / rn;
    if !(energy < 0.0) {
        return Err(Error::Unbound { energy });
    }
    let a = -beta / (2.0 * energy);
    let rv = r.dot(&v);
    let ecc = ((v2 - beta / rn) * r - rv * v) / beta;
    let e = ecc.norm();
    if e >= 1.0 {
        return Err(Error::Unbound { energy });
    }
    // angular momentum sign selects the sense of motion
    let hz = r.x * v.y - r.y * v.x;
    let sense = if hz < 0.0 { -1.0 } else { 1.0 };

    if e < 1e-300 {
        let lambda = (sense * r.y).atan2(r.x);
        return OrbitalElements::new(a, 0.0, 0.0, lambda);
    }
    let varpi = (sense * ecc.y).atan2(ecc.x);
    let cos_e = (1.0 - rn / a) / e;
    let sin_e = rv / (e * (beta * a).sqrt());
    let ea = sin_e.atan2(cos_e);
    let mean_anomaly = ea - e * ea.sin();
    OrbitalElements::new(a, e, varpi, mean_anomaly)
}

/// Poincaré secular variables `(ξ, η)` of both planets and their fast actions `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareSecular {
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    /// `Λ_i = μ_i √(β_i a_i)`.
    pub lambda: [f64; 2],
}

/// `1 − √(1 − e²)` without cancellation at small `e`.
#[inline]
fn one_minus_root(e: f64) -> f64 {
    let e2 = e * e;
    e2 / (1.0 + (1.0 - e2).sqrt())
}

/// Poincaré variables
/// `ξ = √(2Λ)·√(1−√(1−e²))·cos ϖ`, `η = −√(2Λ)·√(1−√(1−e²))·sin ϖ`.
pub fn secular_coordinates(elements: &[OrbitalElements; 2], m0: f64, masses: [f64; 2], constants: &Constants) -> PoincareSecular {
    let mut out = PoincareSecular { xi: [0.0; 2], eta: [0.0; 2], lambda: [0.0; 2] };
    for i in 0..2 {
        let el = &elements[i];
        let mu = reduced_mass(m0, masses[i]);
        let beta = constants.g * (m0 + masses[i]);
        let lambda = mu * (beta * el.a).sqrt();
        let rho = (2.0 * lambda * one_minus_root(el.e)).sqrt();
        let (s, c) = el.varpi.sin_cos();
        out.lambda[i] = lambda;
        out.xi[i] = rho * c;
        out.eta[i] = -rho * s;
    }
    out
}

impl PoincareSecular {
    /// Recover `(e_i, ϖ_i)` for each planet.
    pub fn eccentricities(&self) -> [(f64, f64); 2] {
        let mut out = [(0.0, 0.0); 2];
        for i in 0..2 {
            let gamma = 0.5 * (self.xi[i] * self.xi[i] + self.eta[i] * self.eta[i]);
            let x = gamma / self.lambda[i];
            let e = (x * (2.0 - x)).max(0.0).sqrt();
            let varpi = if gamma == 0.0 { 0.0 } else { reduce_angle((-self.eta[i]).atan2(self.xi[i])) };
            out[i] = (e, varpi);
        }
        out
    }
}
