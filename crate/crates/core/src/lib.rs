//! Secular evolution of coplanar two-planet systems with first
//! post-Newtonian star–planet corrections.
//!
//! The crate pairs an analytic linear secular theory (eigenmodes of the
//! Lagrange–Laplace matrix, optionally shifted by the relativistic apsidal
//! term) with direct integration of the full three-body Hamiltonian, and
//! extracts apsidal frequencies from both to decide when relativity matters.

pub mod criterion;
pub mod dop853;
pub mod elements;
pub mod error;
pub mod frequency;
pub mod hamiltonian;
pub mod integrator;
pub mod laplace;
pub mod secular;

pub use elements::{Constants, Model, OrbitalElements, Planet, SystemConfig};
pub use error::{Error, Result};
