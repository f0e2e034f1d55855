//! Stochastic verifiers for collapse-model heating.
//!
//! - [`mc`]: Monte-Carlo ensemble of linearised phonon-mode amplitudes
//!   under white collapse noise, checked against its discrete oracle and
//!   the continuum heating rate.
//! - [`cumulant`] and [`trajectory`]: second-cumulant master equation and
//!   unitary noise trajectories for small Hilbert spaces.
//! - [`sde`]: Stratonovich ↔ Itô conversion for linear SDE systems.

pub mod cumulant;
pub mod error;
pub mod mc;
pub mod sde;
pub mod stats;
pub mod trajectory;

pub use error::{Error, Result};
