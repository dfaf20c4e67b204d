//! Transport of solutions of `−u'' + q u = λu` across the period in the
//! quasi-derivative coordinates `(u, u^[1])`, `u^[1] = u' − Q u`.
//!
//! In these coordinates the equation is the first-order system
//!
//! ```text
//! u'     =  Q u + u^[1]
//! u^[1]' = (−λ − Q²) u − Q u^[1]
//! ```
//!
//! whose coefficients are locally integrable even when `q` is a measure or
//! worse, and whose coefficient matrix is trace-free. Both coordinates stay
//! continuous where `Q` jumps, so a solver only has to stop at the jumps.
//!
//! Functions taking a spectral parameter use the physical `λ` of
//! `−d² + q` and integrate the centered system at `λ − C`, except
//! [`system_rhs`], which evaluates the centered system as given.

mod matrix;
mod stepper;

use serde::{Deserialize, Serialize};

use crate::potential::{PieceFormula, PrimitiveProfile};
use crate::scalar::Real;

pub use matrix::Mat2;
use stepper::{integrate_piece, Column};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagationError {
    #[error("integration failure: step limit reached at x = {x} after {steps} steps")]
    StepLimit { x: f64, steps: usize },
    #[error("numerical blowup at x = {x}")]
    Blowup { x: f64 },
    #[error("bracket needs states at one position, got x = {a} and x = {b}")]
    PositionMismatch { a: f64, b: f64 },
    #[error("target position {target} lies before start {start}")]
    BackwardInterval { start: f64, target: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite input to the propagator")]
    NonFiniteInput,
}

/// Solution value and quasi-derivative at a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropState<T> {
    pub u: T,
    pub u1: T,
    pub x: T,
}

impl<T: Real> PropState<T> {
    pub fn new(u: T, u1: T, x: T) -> Self {
        Self { u, u1, x }
    }

    /// Classical derivative `u' = u^[1] + Q u`. Where `Q` jumps, pass its
    /// one-sided value to get the matching one-sided derivative.
    pub fn classical_derivative(&self, q_value: T) -> T {
        self.u1 + q_value * self.u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Sixth-order Magnus exponential integrator, embedded fourth-order estimate.
    #[default]
    Magnus6,
    /// Explicit Dormand–Prince 5(4) pair.
    DormandPrince54,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
    pub breakpoint_splitting: bool,
    pub scheme: Scheme,
    /// Accepted deviation of `det M` from 1.
    pub det_tol: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_steps: 1_000_000,
            breakpoint_splitting: true,
            scheme: Scheme::Magnus6,
            det_tol: T::lit(1e-9),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<(), PropagationError> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.rel_tol) || !positive(self.abs_tol) || !positive(self.det_tol) {
            return Err(PropagationError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(PropagationError::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }
}

/// Right-hand side of the centered system at `state`; `lambda` is the
/// spectral parameter of `−d² + Q'` (no mean shift applied).
pub fn system_rhs<T: Real>(profile: &PrimitiveProfile<T>, lambda: T, state: &PropState<T>) -> (T, T) {
    let q = profile.value(state.x);
    (q * state.u + state.u1, (-lambda - q * q) * state.u - q * state.u1)
}

/// Transports the columns from `x0` to `x1` at centered parameter `lambda_c`.
fn transport<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda_c: T,
    x0: T,
    x1: T,
    columns: &mut Vec<Column<T>>,
    cfg: &IntegratorConfig<T>,
) -> Result<usize, PropagationError> {
    cfg.validate()?;
    if !(lambda_c.is_finite() && x0.is_finite() && x1.is_finite()) {
        return Err(PropagationError::NonFiniteInput);
    }
    if x1 < x0 {
        return Err(PropagationError::BackwardInterval {
            start: x0.to_f64().unwrap_or(f64::NAN),
            target: x1.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut knots = vec![x0];
    if cfg.breakpoint_splitting {
        knots.extend(profile.breakpoints_between(x0, x1));
    }
    knots.push(x1);

    let scale = T::one() + lambda_c.abs().sqrt() + profile.sup_bound();
    let mut h = T::lit(0.25) / scale;
    let mut steps = 0;
    for pair in knots.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if cfg.breakpoint_splitting {
            let formula = profile.piece(a, b);
            integrate_piece(&formula, lambda_c, a, b, columns, &mut h, &mut steps, cfg)?;
        } else {
            let formula = global_formula(profile);
            integrate_piece(&formula, lambda_c, a, b, columns, &mut h, &mut steps, cfg)?;
        }
    }
    Ok(steps)
}

/// Without splitting the solver samples `Q` pointwise and has to resolve
/// jumps by step rejection, at the cost of order and many steps.
fn global_formula<T: Real>(profile: &PrimitiveProfile<T>) -> PieceFormula<'_, T> {
    match profile.kind() {
        crate::potential::ProfileKind::TrigSum { coefficients } => PieceFormula::Trig(coefficients),
        _ => PieceFormula::Pointwise(profile),
    }
}

/// Solution of the system with initial data `state`, evaluated at `x1`.
pub fn propagate<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda: T,
    state: &PropState<T>,
    x1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<PropState<T>, PropagationError> {
    let mut columns = vec![[state.u, state.u1]];
    transport(profile, lambda - profile.mean_shift(), state.x, x1, &mut columns, cfg)?;
    Ok(PropState::new(columns[0][0], columns[0][1], x1))
}

/// Several solutions transported together on one step sequence, so the
/// discrete flow applied to each is the same unimodular map.
pub fn propagate_many<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda: T,
    states: &[PropState<T>],
    x1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Vec<PropState<T>>, PropagationError> {
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = states.iter().find(|s| s.x != first.x) {
        return Err(PropagationError::PositionMismatch {
            a: first.x.to_f64().unwrap_or(f64::NAN),
            b: other.x.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut columns: Vec<Column<T>> = states.iter().map(|s| [s.u, s.u1]).collect();
    transport(profile, lambda - profile.mean_shift(), first.x, x1, &mut columns, cfg)?;
    Ok(columns.into_iter().map(|c| PropState::new(c[0], c[1], x1)).collect())
}

/// Fundamental matrix transporting `(u, u^[1])` from `x0` to `x1`.
pub fn transfer_matrix<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda: T,
    x0: T,
    x1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Mat2<T>, PropagationError> {
    let mut columns = vec![[T::one(), T::zero()], [T::zero(), T::one()]];
    transport(profile, lambda - profile.mean_shift(), x0, x1, &mut columns, cfg)?;
    Ok(Mat2::new(columns[0][0], columns[1][0], columns[0][1], columns[1][1]))
}

/// Period map `M(λ)` in quasi-derivative coordinates, based at `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy<T> {
    pub entries: Mat2<T>,
    pub lambda: T,
    pub base_point: T,
}

impl<T: Real> Monodromy<T> {
    /// Floquet discriminant `Δ(λ) = tr M(λ)`.
    pub fn trace(&self) -> T {
        self.entries.trace()
    }

    pub fn det(&self) -> T {
        self.entries.det()
    }

    pub fn is_unimodular(&self, tol: T) -> bool {
        (self.det() - T::one()).abs() <= tol
    }
}

pub fn monodromy<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda: T,
    x0: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Monodromy<T>, PropagationError> {
    let entries = transfer_matrix(profile, lambda, x0, x0 + T::one(), cfg)?;
    Ok(Monodromy { entries, lambda, base_point: x0 })
}

/// `Δ(λ)`: the monodromy trace at base point 0.
pub fn discriminant<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda: T,
    cfg: &IntegratorConfig<T>,
) -> Result<T, PropagationError> {
    monodromy(profile, lambda, T::zero(), cfg).map(|m| m.trace())
}

/// Real Lagrange bracket `[a, b]_x = a.u · b.u^[1] − a.u^[1] · b.u`.
pub fn lagrange_bracket<T: Real>(a: &PropState<T>, b: &PropState<T>) -> Result<T, PropagationError> {
    let slack = T::epsilon() * T::lit(4.0) * (T::one() + a.x.abs().max(b.x.abs()));
    if (a.x - b.x).abs() > slack {
        return Err(PropagationError::PositionMismatch {
            a: a.x.to_f64().unwrap_or(f64::NAN),
            b: b.x.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(a.u * b.u1 - a.u1 * b.u)
}
