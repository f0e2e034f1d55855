//! Heat generation in crystals driven by the mass-proportional CSL collapse
//! noise, and the steady-state temperature profiles it produces.
//!
//! The crate is organised bottom-up:
//!
//! - [`materials`]: physical constants and crystal records (Cu, TeO₂ built in).
//! - [`noise`]: collapse-noise parameters, spectra γ(ω), correlation f(t) and
//!   white-noise path synthesis on a discrete probe grid.
//! - [`lattice`]: Debye-model phonon mode grids for a mono-atomic cubic
//!   crystal and the mode/site coupling coefficients η.
//! - [`heating`]: white-noise closed form and non-white spectral integral for
//!   the volumetric heating rate q̇.
//! - [`diffusion`]: steady-state profiles for conductivity k = k₀T and an
//!   independent finite-difference Newton solver.
//!
//! Everything is SI internally.

pub mod diffusion;
pub mod error;
pub mod heating;
pub mod lattice;
pub mod materials;
pub mod noise;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
