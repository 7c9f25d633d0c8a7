//! Direct integration of the canonical equations of motion.
//!
//! The state `[r₁, r₂, p₁, p₂]` is advanced with the adaptive DOP853 scheme.
//! Steps are shortened so that they end exactly on the uniform output grid;
//! no interpolation is involved in producing samples.

use std::fmt;

use crate::dop853::{Attempt, Dop853, OdeSystem, StepControl, Stats};
use crate::elements::{state_to_elements, OrbitalElements, SystemConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianParams, PhaseState};

/// Minimum allowed star–planet or planet–planet distance, AU.
pub const SINGULARITY_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    /// Final time, yr.
    pub t_end: f64,
    /// Output sampling interval, yr.
    pub dt_out: f64,
    pub rel_tol: f64,
    /// Absolute error floor per component, in native units.
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl IntegrationSettings {
    pub fn new(t_end: f64, dt_out: f64, rel_tol: f64) -> Result<Self> {
        let s = IntegrationSettings { t_end, dt_out, rel_tol, abs_tol: 0.0, max_steps: 2_000_000_000 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.dt_out > 0.0 && self.dt_out <= self.t_end) {
            return Err(Error::domain(format!("dt_out must lie in (0, t_end], got {}", self.dt_out)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::domain(format!("rel_tol must lie in (0, 1e-6], got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::domain("abs_tol must be non-negative"));
        }
        Ok(())
    }

    /// Number of output intervals; the grid is `k·dt_out` for `k = 0..=n`.
    pub fn n_intervals(&self) -> usize {
        (self.t_end / self.dt_out + 1e-9).floor() as usize
    }
}

/// Sampled solution of one integration.
#[derive(Debug, Clone)]
pub struct CartesianTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
    /// `|H(t) − H(0)| / |H(0)|` at every sample.
    pub energy_rel_err: Vec<f64>,
    pub config_used: SystemConfig,
    pub stats: Stats,
}

impl CartesianTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_error(&self) -> f64 {
        self.energy_rel_err.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest relative deviation of total angular momentum from its initial value.
    pub fn max_angular_momentum_error(&self) -> f64 {
        let l0 = self.states[0].angular_momentum();
        self.states.iter().map(|s| ((s.angular_momentum() - l0) / l0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureKind {
    StepBudget { steps: usize },
    StepSizeUnderflow { h: f64 },
    Singularity { distance: f64 },
    Model(Error),
}

/// An integration that stopped early; keeps everything sampled so far.
#[derive(Debug, Clone)]
pub struct IntegrationFailure {
    pub kind: FailureKind,
    pub t: f64,
    pub partial: Box<CartesianTrajectory>,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FailureKind::StepBudget { steps } => write!(f, "step budget of {steps} exhausted at t = {} yr", self.t),
            FailureKind::StepSizeUnderflow { h } => write!(f, "step size underflow (h = {h:e}) at t = {} yr", self.t),
            FailureKind::Singularity { distance } => {
                write!(f, "close approach ({distance:e} AU) at t = {} yr", self.t)
            }
            FailureKind::Model(e) => write!(f, "{e} at t = {} yr", self.t),
        }?;
        write!(f, " after {} samples", self.partial.len())
    }
}

impl std::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Self {
        Error::Integration(f.to_string())
    }
}

struct CanonicalEquations {
    params: HamiltonianParams,
}

#[derive(Debug)]
enum RhsError {
    Close(f64),
    Model(Error),
}

impl OdeSystem<8> for CanonicalEquations {
    type Error = RhsError;

    #[inline]
    fn rhs(&self, t: f64, y: &[f64; 8], dy: &mut [f64; 8]) -> std::result::Result<(), RhsError> {
        let s = PhaseState::from_array(y, t);
        let d1 = s.bodies[0].r.norm();
        let d2 = s.bodies[1].r.norm();
        let d12 = (s.bodies[0].r - s.bodies[1].r).norm();
        let closest = d1.min(d2).min(d12);
        if !(closest >= SINGULARITY_GUARD) {
            return Err(RhsError::Close(closest));
        }
        let g = self.params.gradients(&s).map_err(RhsError::Model)?;
        // ṙ = ∂H/∂p, ṗ = −∂H/∂r
        dy[0] = g.dp[0].x;
        dy[1] = g.dp[0].y;
        dy[2] = g.dp[1].x;
        dy[3] = g.dp[1].y;
        dy[4] = -g.dr[0].x;
        dy[5] = -g.dr[0].y;
        dy[6] = -g.dr[1].x;
        dy[7] = -g.dr[1].y;
        Ok(())
    }
}

/// Integrate the configured system from its osculating elements.
pub fn integrate(config: &SystemConfig, settings: &IntegrationSettings) -> Result<CartesianTrajectory, IntegrationFailure> {
    let empty = |kind| IntegrationFailure {
        kind,
        t: 0.0,
        partial: Box::new(CartesianTrajectory {
            times: vec![],
            states: vec![],
            energy_rel_err: vec![],
            config_used: *config,
            stats: Stats::default(),
        }),
    };
    let initial = PhaseState::from_config(config).map_err(|e| empty(FailureKind::Model(e)))?;
    integrate_from(config, initial, settings)
}

/// Integrate from an explicit initial state; sample times are relative to `initial.t`.
pub fn integrate_from(
    config: &SystemConfig,
    initial: PhaseState,
    settings: &IntegrationSettings,
) -> Result<CartesianTrajectory, IntegrationFailure> {
    let system = CanonicalEquations { params: HamiltonianParams::new(config) };
    let n = settings.n_intervals();
    let mut traj = CartesianTrajectory {
        times: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        energy_rel_err: Vec::with_capacity(n + 1),
        config_used: *config,
        stats: Stats::default(),
    };
    let fail = |traj: CartesianTrajectory, kind: FailureKind, t: f64| IntegrationFailure { kind, t, partial: Box::new(traj) };
    if let Err(e) = settings.validate() {
        return Err(fail(traj, FailureKind::Model(e), 0.0));
    }
    let h0 = match system.params.energy(&initial) {
        Ok(h) => h,
        Err(e) => return Err(fail(traj, FailureKind::Model(e), 0.0)),
    };
    traj.times.push(0.0);
    traj.states.push(PhaseState { t: 0.0, ..initial });
    traj.energy_rel_err.push(0.0);

    let control = StepControl::new(settings.rel_tol, settings.abs_tol);
    let mut stepper = match Dop853::new(&system, 0.0, initial.to_array(), control, None, settings.dt_out) {
        Ok(s) => s,
        Err(e) => return Err(fail(traj, rhs_failure(e), 0.0)),
    };

    let mut steps = 0usize;
    for k in 1..=n {
        let target = k as f64 * settings.dt_out;
        loop {
            let remaining = target - stepper.t;
            if remaining <= 1e-12 * target {
                break;
            }
            if steps >= settings.max_steps {
                traj.stats = stepper.stats;
                return Err(fail(traj, FailureKind::StepBudget { steps }, stepper.t));
            }
            if stepper.h <= 1e-14 * target.max(1.0) {
                traj.stats = stepper.stats;
                let h = stepper.h;
                return Err(fail(traj, FailureKind::StepSizeUnderflow { h }, stepper.t));
            }
            steps += 1;
            match stepper.step(&system, remaining) {
                Ok(Attempt::Accepted) | Ok(Attempt::Rejected) => {}
                Err(e) => {
                    traj.stats = stepper.stats;
                    let t = stepper.t;
                    return Err(fail(traj, rhs_failure(e), t));
                }
            }
        }
        stepper.t = target;
        let s = PhaseState::from_array(&stepper.y, target);
        let h = match system.params.energy(&s) {
            Ok(h) => h,
            Err(e) => return Err(fail(traj, FailureKind::Model(e), target)),
        };
        traj.times.push(target);
        traj.states.push(s);
        traj.energy_rel_err.push(((h - h0) / h0).abs());
    }
    traj.stats = stepper.stats;
    Ok(traj)
}

fn rhs_failure(e: RhsError) -> FailureKind {
    match e {
        RhsError::Close(d) => FailureKind::Singularity { distance: d },
        RhsError::Model(e) => FailureKind::Model(e),
    }
}

/// Osculating elements of both planets at every sample.
pub fn osculating_series(traj: &CartesianTrajectory) -> Result<[Vec<OrbitalElements>; 2]> {
    let cfg = &traj.config_used;
    let mut out = [Vec::with_capacity(traj.len()), Vec::with_capacity(traj.len())];
    for (idx, s) in traj.states.iter().enumerate() {
        for i in 0..2 {
            let el = state_to_elements(&s.bodies[i], cfg.m0, cfg.planets[i].mass, &cfg.constants).map_err(|e| {
                Error::Integration(format!("sample {idx} (t = {} yr), planet {}: {e}", traj.times[idx], i + 1))
            })?;
            out[i].push(el);
        }
    }
    Ok(out)
}
