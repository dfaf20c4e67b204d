//! Band-and-gap structure of Hill operators `−u'' + q(x)u` with real
//! 1-periodic potentials `q ∈ H⁻¹_per`, delta combs included.
//!
//! The engine never evaluates `q`. It writes `q = C + Q'` with `Q` a
//! periodic `L²` primitive and integrates the first-order system for
//! `(u, u' − Qu)`, which stays well posed for distributional `q`. Gap
//! endpoints are the roots of `Δ(λ) = ±2`, where `Δ` is the trace of the
//! period map in those coordinates.
//!
//! - [`potential`]: Fourier tables, primitives, truncation, `H⁻¹` norm.
//! - [`propagator`]: period map and discriminant.
//! - [`spectrum`]: gap endpoints, parity classification, validation, truncation studies.
//! - [`oracle`]: Fourier–Galerkin eigenvalues and Kronig–Penney closed forms for cross-checks.
//!
//! Everything is generic over [`Real`]; the `*F64` aliases below are the
//! usual entry points.

pub mod oracle;
pub mod potential;
pub mod propagator;
pub mod roots;
mod scalar;
pub mod spectrum;

pub use scalar::Real;

pub use potential::{FourierPotential, PotentialError, PotentialFile, PotentialSource, PrimitiveProfile};
pub use propagator::{IntegratorConfig, Mat2, Monodromy, PropState, PropagationError, Scheme};
pub use spectrum::{BandStructure, GapEndpoint, Parity, SearchConfig, Side, SpectrumError};

pub type FourierPotentialF64 = FourierPotential<f64>;
pub type PrimitiveProfileF64 = PrimitiveProfile<f64>;
pub type PropStateF64 = PropState<f64>;
pub type MonodromyF64 = Monodromy<f64>;
pub type IntegratorConfigF64 = IntegratorConfig<f64>;
pub type SearchConfigF64 = SearchConfig<f64>;
pub type BandStructureF64 = BandStructure<f64>;
pub type GapEndpointF64 = GapEndpoint<f64>;

pub type FourierPotentialF32 = FourierPotential<f32>;
pub type PrimitiveProfileF32 = PrimitiveProfile<f32>;
pub type BandStructureF32 = BandStructure<f32>;

/// Any failure raised by the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}
