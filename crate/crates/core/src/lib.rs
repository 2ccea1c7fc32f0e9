//! Fourier spectral laboratory: spectral, 2/3 de-aliased pseudo-spectral and
//! spectral-viscosity discretizations of linear transport, inviscid Burgers,
//! 2D incompressible Euler and the Lagrangian isentropic system, with the
//! diagnostics used to study their stability.

pub mod burgers;
pub mod coefficient;
pub mod diagnostics;
pub mod error;
pub mod euler2d;
pub mod fourier;
pub mod harness;
pub mod isentropic;
pub mod timestepping;
pub mod transport;

pub use error::{Result, SpecError};
