//! Independent references for the engine: a dense Fourier–Galerkin
//! eigensolver for the one-period problems and the closed-form
//! Kronig–Penney discriminant and transfer matrices.
//!
//! Nothing here touches the quasi-derivative propagator.

mod galerkin;
mod kronig_penney;

pub use galerkin::{galerkin_eigenvalues, galerkin_matrix, GalerkinError, GalerkinProblem, DEFAULT_GALERKIN_SIZE};
pub use kronig_penney::{free_transfer, kp_discriminant, kp_quasi_transfer, kp_transfer};
