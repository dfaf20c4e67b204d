//! Gap endpoints of the periodic operator from the Floquet discriminant.
//!
//! The spectrum is `{λ : |Δ(λ)| ≤ 2}`. Its gap endpoints are ordered as
//!
//! ```text
//! λ₀ < λ₁⁻ ≤ λ₁⁺ < λ₂⁻ ≤ λ₂⁺ < …
//! ```
//!
//! with `Δ = +2` at `λ₀` and at both ends of every even gap, and `Δ = −2` at
//! both ends of every odd gap. A gap whose ends coincide is collapsed: there
//! `Δ` touches `±2` without crossing, and the point is recorded twice.

mod convergence;
mod endpoints;
mod scan;
mod validate;

use serde::{Deserialize, Serialize};

use crate::propagator::{IntegratorConfig, PropagationError};
use crate::scalar::Real;

pub use convergence::{convergence_study, ConvergenceStudy, ConvergenceRow};
pub use endpoints::{
    band_structure, detect_tangency, periodic_eigenvalues, refine_endpoint, semiperiodic_eigenvalues,
    TangencyReport, Target, Verdict,
};
pub use scan::{sample_discriminant, DiscriminantSample};
pub use validate::{classify_and_validate, validate_against_discriminant, Check, ValidationReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("no sign change of Δ − ({target}) over [{lo}, {hi}]")]
    NoSignChange { target: f64, lo: f64, hi: f64 },
    #[error("bracketing incomplete: found {found} of {needed} endpoints up to λ = {lambda_max}")]
    BracketingIncomplete { found: usize, needed: usize, lambda_max: f64 },
    #[error("root refinement did not converge")]
    IterationLimit,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Bottom,
    Minus,
    Plus,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Boundary type of the one-period problem an endpoint is an eigenvalue of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `u(0) = u(1)`, `u^[1](0) = u^[1](1)`; `Δ = +2`.
    Periodic,
    /// `u(0) = −u(1)`, `u^[1](0) = −u^[1](1)`; `Δ = −2`.
    Semiperiodic,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Periodic => "periodic",
            Parity::Semiperiodic => "semiperiodic",
        }
    }

    /// Parity an endpoint of gap `k` must have.
    pub fn expected_for_gap(k: usize) -> Self {
        if k % 2 == 0 {
            Parity::Periodic
        } else {
            Parity::Semiperiodic
        }
    }

    pub fn discriminant_value<T: Real>(&self) -> T {
        match self {
            Parity::Periodic => T::two(),
            Parity::Semiperiodic => -T::two(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEndpoint<T> {
    pub lambda: T,
    pub k: usize,
    pub side: Side,
    /// Which of `Δ = ±2` the endpoint was located as a root of.
    pub parity: Parity,
    pub collapsed: bool,
}

/// Closed interval `[lo, hi]` of λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure<T> {
    /// `λ₀, λ₁⁻, λ₁⁺, …, λ_g⁻, λ_g⁺` in increasing order.
    pub endpoints: Vec<GapEndpoint<T>>,
    pub mean_shift_applied: T,
    /// Root tolerance the endpoints were refined to.
    pub root_tol: T,
}

impl<T: Real> BandStructure<T> {
    pub fn num_gaps(&self) -> usize {
        self.endpoints.len().saturating_sub(1) / 2
    }

    pub fn bottom(&self) -> Option<T> {
        self.endpoints.first().map(|e| e.lambda)
    }

    /// `(λ_k⁻, λ_k⁺)` for `k ≥ 1`.
    pub fn gap_edges(&self, k: usize) -> Option<(T, T)> {
        if k == 0 {
            return None;
        }
        let lo = self.endpoints.get(2 * k - 1)?;
        let hi = self.endpoints.get(2 * k)?;
        Some((lo.lambda, hi.lambda))
    }

    /// Bands whose both ends are known: `B₀ = [λ₀, λ₁⁻]`, `B_k = [λ_k⁺, λ_{k+1}⁻]`.
    pub fn bands(&self) -> Vec<Interval<T>> {
        let mut out = Vec::new();
        let mut lo_index = 0;
        while lo_index + 1 < self.endpoints.len() {
            out.push(Interval { lo: self.endpoints[lo_index].lambda, hi: self.endpoints[lo_index + 1].lambda });
            lo_index += 2;
        }
        out
    }

    /// Finite gaps `G_k = (λ_k⁻, λ_k⁺)`, `k ≥ 1`; `G₀ = (−∞, λ₀)` is implied.
    pub fn gaps(&self) -> Vec<Interval<T>> {
        (1..=self.num_gaps()).filter_map(|k| self.gap_edges(k)).map(|(lo, hi)| Interval { lo, hi }).collect()
    }

    pub fn lambdas(&self) -> Vec<T> {
        self.endpoints.iter().map(|e| e.lambda).collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String>
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig<T> {
    pub num_gaps: usize,
    /// Grid spacing in `s = √(λ − λ_floor)`.
    pub s_step: T,
    /// Root tolerance in λ, relative above `|λ| = 1`.
    pub root_tol: T,
    pub tangency_tol: T,
    /// Physical λ to start scanning from; `None` derives one from `sup |Q|`.
    pub lambda_floor: Option<T>,
    /// Times the scan range is enlarged before giving up.
    pub max_extensions: usize,
    pub integrator: IntegratorConfig<T>,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            num_gaps: 3,
            s_step: T::lit(0.02),
            root_tol: T::lit(1e-10),
            tangency_tol: T::lit(1e-7),
            lambda_floor: None,
            max_extensions: 2,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl<T: Real> SearchConfig<T> {
    pub fn with_gaps(num_gaps: usize) -> Self {
        Self { num_gaps, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        if self.num_gaps == 0 {
            return Err(SpectrumError::InvalidConfig("num_gaps must be at least 1".into()));
        }
        if !positive(self.s_step) || !positive(self.root_tol) || !positive(self.tangency_tol) {
            return Err(SpectrumError::InvalidConfig("s_step, root_tol and tangency_tol must be positive".into()));
        }
        if self.lambda_floor.is_some_and(|f| !f.is_finite()) {
            return Err(SpectrumError::InvalidConfig("lambda_floor must be finite".into()));
        }
        self.integrator.validate()?;
        Ok(())
    }
}
