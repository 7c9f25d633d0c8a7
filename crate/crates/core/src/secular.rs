//! Linear (Lagrange–Laplace) secular theory with the relativistic apsidal term.
//!
//! Two conventions meet here:
//!
//! * the *frequency* matrix `F` acting on `z_i = k_i + i h_i = e_i exp(iϖ_i)`
//!   through `ż = i F z`; positive eigenvalues are prograde precession rates;
//! * the *quadratic-form* matrices `A`, `B` of the averaged Hamiltonian
//!   `H_q = ξ·Aξ + η·Aη` in the normalized variables `x_i = s_i z_i`, where
//!   `s_i ≈ √Λ_i` is the basis scale. Here `F_sym = −2A`, so Newtonian
//!   diagonal entries of `A` are negative and the relativistic shift
//!   `B − A = −(3/2)(G^{3/2}/c²) diag((m₀+m_i)^{3/2}/a_i^{5/2})` raises each
//!   diagonal frequency by `3β_i^{3/2}/(c² a_i^{5/2})`.
//!
//! The classical `F` is not symmetric in `(h, k)`; a diagonal similarity
//! with the basis scale makes it symmetric without changing its spectrum.
//! No resonance detection is attempted: near a mean-motion commensurability
//! the first-order average is not valid.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::elements::{reduce_angle, reduced_mass, Model, SystemConfig};
use crate::error::{Error, Result};
use crate::laplace::laplace_coefficient;

pub type Matrix2 = [[f64; 2]; 2];

/// Eigenfrequencies closer than this (rad/yr) are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Per-planet `(h, k) = (e sin ϖ, e cos ϖ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EccentricityVector {
    pub h: [f64; 2],
    pub k: [f64; 2],
}

impl EccentricityVector {
    pub fn from_config(config: &SystemConfig) -> Self {
        let mut out = EccentricityVector { h: [0.0; 2], k: [0.0; 2] };
        for i in 0..2 {
            let (h, k) = config.planets[i].elements.hk();
            out.h[i] = h;
            out.k[i] = k;
        }
        out
    }

    pub fn e(&self, i: usize) -> f64 {
        self.h[i].hypot(self.k[i])
    }

    pub fn varpi(&self, i: usize) -> f64 {
        reduce_angle(self.h[i].atan2(self.k[i]))
    }
}

/// Classical Lagrange–Laplace frequency matrix and its symmetrized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceLagrange {
    pub alpha: f64,
    /// `b_{3/2}^(1)(α)`.
    pub b1: f64,
    /// `b_{3/2}^(2)(α)`.
    pub b2: f64,
    /// `F` acting on `(k + ih)`, rad/yr; not symmetric.
    pub classical: Matrix2,
    /// `S F S⁻¹`, symmetric.
    pub frequency: Matrix2,
    pub basis_scale: [f64; 2],
}

/// Classical secular frequency matrix of the pair, symmetrized.
pub fn ll_matrix(config: &SystemConfig) -> Result<LaplaceLagrange> {
    let [a1, a2] = config.semi_major_axes();
    let alpha = a1 / a2;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("orbits cross or touch: a1/a2 = {alpha}")));
    }
    let [m1, m2] = config.masses();
    let m0 = config.m0;
    let b1 = laplace_coefficient(1.5, 1, alpha)?;
    let b2 = laplace_coefficient(1.5, 2, alpha)?;
    let n1 = (config.beta(0) / (a1 * a1 * a1)).sqrt();
    let n2 = (config.beta(1) / (a2 * a2 * a2)).sqrt();

    let c1 = 0.25 * n1 * m2 / (m0 + m1) * alpha * alpha;
    let c2 = 0.25 * n2 * m1 / (m0 + m2) * alpha;
    let classical = [[c1 * b1, -c1 * b2], [-c2 * b2, c2 * b1]];

    // s₁/s₂ = √(F₂₁/F₁₂) balances the off-diagonal entries exactly;
    // the overall normalization follows Λ_i = μ_i √(β_i a_i)
    let lambda = [
        reduced_mass(m0, m1) * (config.beta(0) * a1).sqrt(),
        reduced_mass(m0, m2) * (config.beta(1) * a2).sqrt(),
    ];
    let q = ((classical[1][0] / classical[0][1]) * (lambda[1] / lambda[0])).powf(0.25);
    let basis_scale = [lambda[0].sqrt() * q, lambda[1].sqrt() / q];
    let off_12 = basis_scale[0] * classical[0][1] / basis_scale[1];
    let off_21 = basis_scale[1] * classical[1][0] / basis_scale[0];
    let off = 0.5 * (off_12 + off_21);
    let frequency = [[classical[0][0], off], [off, classical[1][1]]];
    Ok(LaplaceLagrange { alpha, b1, b2, classical, frequency, basis_scale })
}

/// Diagonal relativistic increment of the quadratic-form matrix,
/// `−(3/2)(G^{3/2}/c²) diag((m₀+m_i)^{3/2}/a_i^{5/2})`.
pub fn gr_correction(config: &SystemConfig) -> Matrix2 {
    let g = config.constants.g;
    let pref = -1.5 * g.powf(1.5) * config.constants.inv_c2();
    let [m1, m2] = config.masses();
    let [a1, a2] = config.semi_major_axes();
    let m0 = config.m0;
    [
        [pref * (m0 + m1).powf(1.5) / a1.powf(2.5), 0.0],
        [0.0, pref * (m0 + m2).powf(1.5) / a2.powf(2.5)],
    ]
}

/// Quadratic parts of the Newtonian (`a`) and relativistic (`b`) secular Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularMatrices {
    pub a: Matrix2,
    pub b: Matrix2,
    pub basis_scale: [f64; 2],
}

impl SecularMatrices {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let ll = ll_matrix(config)?;
        Ok(Self::from_parts(&ll, &gr_correction(config)))
    }

    pub fn from_parts(ll: &LaplaceLagrange, gr: &Matrix2) -> Self {
        let a = scale(&ll.frequency, -0.5);
        let mut b = a;
        b[0][0] += gr[0][0];
        b[1][1] += gr[1][1];
        SecularMatrices { a, b, basis_scale: ll.basis_scale }
    }

    pub fn quadratic_form(&self, model: Model) -> &Matrix2 {
        match model {
            Model::Newtonian => &self.a,
            Model::Relativistic => &self.b,
        }
    }

    /// Symmetric frequency matrix `−2A` or `−2B`, rad/yr.
    pub fn frequency_matrix(&self, model: Model) -> Matrix2 {
        scale(self.quadratic_form(model), -2.0)
    }
}

fn scale(m: &Matrix2, f: f64) -> Matrix2 {
    [[m[0][0] * f, m[0][1] * f], [m[1][0] * f, m[1][1] * f]]
}

/// Normal modes of a symmetric secular frequency matrix fitted to an initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularModes {
    /// Eigenfrequencies, rad/yr, descending.
    pub g: [f64; 2],
    /// Orthonormal eigenvectors as columns: `modes[i][j]` is component `i` of mode `j`.
    pub modes: Matrix2,
    pub amplitudes: [f64; 2],
    /// Mode phases, rad in `[0, 2π)`.
    pub phases: [f64; 2],
    pub basis_scale: [f64; 2],
    pub degenerate: bool,
}

/// Eigen-decomposition of a real symmetric 2×2 matrix.
///
/// Returns eigenvalues in descending order and the rotation whose columns are
/// the matching unit eigenvectors.
pub fn symmetric_eigen(m: &Matrix2) -> ([f64; 2], Matrix2) {
    let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let radius = half_diff.hypot(b);
    let theta = 0.5 * b.atan2(half_diff);
    let (s, c) = theta.sin_cos();
    ([mean + radius, mean - radius], [[c, -s], [s, c]])
}

/// Diagonalize `frequency` (symmetric, acting on `x_i = s_i (k_i + i h_i)`)
/// and fit mode amplitudes and phases to `initial`.
pub fn secular_modes(frequency: &Matrix2, basis_scale: [f64; 2], initial: &EccentricityVector) -> SecularModes {
    let (g, v) = symmetric_eigen(frequency);
    let x: [(f64, f64); 2] =
        [0, 1].map(|i| (basis_scale[i] * initial.k[i], basis_scale[i] * initial.h[i]));
    let mut amplitudes = [0.0; 2];
    let mut phases = [0.0; 2];
    for j in 0..2 {
        let re = v[0][j] * x[0].0 + v[1][j] * x[1].0;
        let im = v[0][j] * x[0].1 + v[1][j] * x[1].1;
        amplitudes[j] = re.hypot(im);
        phases[j] = if amplitudes[j] == 0.0 { 0.0 } else { reduce_angle(im.atan2(re)) };
    }
    SecularModes {
        g,
        modes: v,
        amplitudes,
        phases,
        basis_scale,
        degenerate: (g[0] - g[1]).abs() < DEGENERACY_TOL,
    }
}

impl SecularModes {
    /// Contribution `|V_ij| E_j / s_i` of mode `j` to the eccentricity of planet `i`.
    pub fn mode_eccentricity(&self, i: usize, j: usize) -> f64 {
        self.modes[i][j].abs() * self.amplitudes[j] / self.basis_scale[i]
    }

    /// Beat period `2π/|g₁ − g₂|` of the eccentricity oscillation, yr.
    pub fn secular_period(&self) -> f64 {
        TAU / (self.g[0] - self.g[1]).abs()
    }

    /// Index of the mode that dominates planet `i`'s eccentricity vector.
    pub fn dominant_mode(&self, i: usize) -> usize {
        if self.mode_eccentricity(i, 0) >= self.mode_eccentricity(i, 1) {
            0
        } else {
            1
        }
    }
}

/// Eccentricity vectors at time `t` (yr):
/// `(k_i + i h_i)(t) = Σ_j V_ij E_j exp(i(g_j t + β_j)) / s_i`.
pub fn evolve(modes: &SecularModes, t: f64) -> EccentricityVector {
    let mut out = EccentricityVector { h: [0.0; 2], k: [0.0; 2] };
    let rot = [0, 1].map(|j| (modes.g[j] * t + modes.phases[j]).sin_cos());
    for i in 0..2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for j in 0..2 {
            let w = modes.modes[i][j] * modes.amplitudes[j];
            re += w * rot[j].1;
            im += w * rot[j].0;
        }
        out.k[i] = re / modes.basis_scale[i];
        out.h[i] = im / modes.basis_scale[i];
    }
    out
}

/// Per-planet `(e_min, e_max)` of the linear solution.
pub fn envelope(modes: &SecularModes) -> [(f64, f64); 2] {
    [0, 1].map(|i| {
        let (c1, c2) = (modes.mode_eccentricity(i, 0), modes.mode_eccentricity(i, 1));
        ((c1 - c2).abs(), c1 + c2)
    })
}

/// Everything the linear theory says about one system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularModel {
    pub laplace_lagrange: LaplaceLagrange,
    pub matrices: SecularMatrices,
    pub initial: EccentricityVector,
    pub newtonian: SecularModes,
    pub relativistic: SecularModes,
}

impl SecularModel {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let ll = ll_matrix(config)?;
        let matrices = SecularMatrices::from_parts(&ll, &gr_correction(config));
        let initial = EccentricityVector::from_config(config);
        let modes = |model| secular_modes(&matrices.frequency_matrix(model), matrices.basis_scale, &initial);
        Ok(SecularModel {
            laplace_lagrange: ll,
            matrices,
            initial,
            newtonian: modes(Model::Newtonian),
            relativistic: modes(Model::Relativistic),
        })
    }

    pub fn modes(&self, model: Model) -> &SecularModes {
        match model {
            Model::Newtonian => &self.newtonian,
            Model::Relativistic => &self.relativistic,
        }
    }
}
