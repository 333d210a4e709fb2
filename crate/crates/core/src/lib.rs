//! Neumann spectra of the Ornstein–Uhlenbeck operator `-Δu + x·∇u` on
//! origin-symmetric domains in Gauss space, and numerical verification of the
//! harmonic-mean isoperimetric inequality for the first `m - 1` nonzero eigenvalues.

pub mod ball_spectrum;
pub mod domain;
pub mod error;
pub mod fem2d;
pub mod quadrature;
pub mod radial_ode;
pub mod verify;

pub use domain::DomainSpec;
pub use error::{Error, Result};
