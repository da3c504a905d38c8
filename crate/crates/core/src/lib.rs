//! Kleinian mock modular forms attached to weight-2 newform orbits.
//!
//! The pipeline runs newform orbit -> Eichler integrals -> period lattice and
//! polarization -> Riemann theta -> completed Kleinian zeta -> harmonic Maass
//! forms and their Fourier coefficients.

pub mod diagnostics;
pub mod error;
pub mod kleinian;
pub mod mockform;
pub mod newforms;
pub mod numerics;
pub mod par;
pub mod periods;
pub mod theta;

pub use error::{Error, Result};
