use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FourierPotential, PotentialError};
use crate::scalar::Real;

/// One piece `Q(x) = value + slope · (x − start)` of a piecewise-linear primitive,
/// valid from `start` up to the next segment's start (or 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSegment<T> {
    pub start: T,
    pub value: T,
    pub slope: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind<T> {
    /// `Q(x) = Σ_{m≥1} 2 Re(Q̂(m) e^{2πimx})`; entry `i` holds `Q̂(i + 1)`.
    TrigSum { coefficients: Vec<Complex<T>> },
    /// `Q(x) = α(1/2 − x)` on `(0, 1)`, extended periodically.
    SawtoothComb { alpha: T },
    /// Zero-mean piecewise-linear `Q` on `[0, 1)`, jumps allowed at segment starts.
    PiecewiseLinear { segments: Vec<LinearSegment<T>> },
}

/// Evaluable 1-periodic real primitive `Q` with `q = C + Q'`.
///
/// `mean_shift` carries `C`; it is never folded into `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveProfile<T> {
    kind: ProfileKind<T>,
    mean_shift: T,
}

/// Formula for `Q` used by the integrator on one interval.
#[derive(Debug, Clone, Copy)]
pub enum PieceFormula<'a, T> {
    Trig(&'a [Complex<T>]),
    /// Closed form on an interval free of interior breakpoints.
    Linear { origin: T, value: T, slope: T },
    /// Pointwise values of the whole profile, jumps included.
    Pointwise(&'a PrimitiveProfile<T>),
}

impl<T: Real> PieceFormula<'_, T> {
    #[inline]
    pub fn eval(&self, x: T) -> T {
        match *self {
            PieceFormula::Trig(coefficients) => trig_value(coefficients, x),
            PieceFormula::Linear { origin, value, slope } => value + slope * (x - origin),
            PieceFormula::Pointwise(profile) => profile.value(x),
        }
    }
}

fn trig_value<T: Real>(coefficients: &[Complex<T>], x: T) -> T {
    let phase = T::two_pi() * fractional(x);
    let (s, c) = phase.sin_cos();
    let rotor = Complex::new(c, s);
    let mut wave = rotor;
    let mut total = T::zero();
    for &coefficient in coefficients {
        let term = coefficient * wave;
        total += term.re;
        wave *= rotor;
    }
    T::two() * total
}

#[inline]
fn fractional<T: Real>(x: T) -> T {
    let f = x - x.floor();
    // floor can round x - floor(x) up to exactly 1 for tiny negative x
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}

impl<T: Real> PrimitiveProfile<T> {
    /// Termwise antiderivative of the oscillatory part: `Q̂(m) = q̂(2m)/(2πim)`.
    pub fn from_potential(p: &FourierPotential<T>) -> Self {
        let k = p.max_harmonic() as usize;
        let mut coefficients = vec![Complex::new(T::zero(), T::zero()); k];
        for (m, value) in p.harmonics().filter(|(m, _)| *m > 0) {
            let denominator = Complex::new(T::zero(), T::two_pi() * T::from_i64(m).unwrap());
            coefficients[(m - 1) as usize] = value / denominator;
        }
        while coefficients.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            coefficients.pop();
        }
        Self { kind: ProfileKind::TrigSum { coefficients }, mean_shift: p.mean() }
    }

    /// Exact primitive of `α Σ δ(x − n)`; mean shift `α`.
    pub fn sawtooth_comb(alpha: T) -> Self {
        Self { kind: ProfileKind::SawtoothComb { alpha }, mean_shift: alpha }
    }

    /// Piecewise-linear primitive, re-centered to zero mean.
    ///
    /// Segments must start at 0 with strictly increasing starts below 1.
    pub fn piecewise_linear(segments: Vec<LinearSegment<T>>, mean_shift: T) -> Result<Self, PotentialError> {
        let invalid = |msg: &str| Err(PotentialError::InvalidProfile(msg.to_owned()));
        let Some(first) = segments.first() else {
            return invalid("at least one segment required");
        };
        if first.start != T::zero() {
            return invalid("first segment must start at 0");
        }
        if segments.iter().any(|s| !(s.start.is_finite() && s.value.is_finite() && s.slope.is_finite())) {
            return invalid("non-finite segment data");
        }
        if !mean_shift.is_finite() {
            return invalid("non-finite mean shift");
        }
        if segments.windows(2).any(|w| w[1].start <= w[0].start) || segments.last().unwrap().start >= T::one() {
            return invalid("segment starts must increase strictly within [0, 1)");
        }

        let mut mean = T::zero();
        for (i, segment) in segments.iter().enumerate() {
            let end = segments.get(i + 1).map_or(T::one(), |s| s.start);
            let length = end - segment.start;
            mean += segment.value * length + segment.slope * length * length * T::half();
        }
        let segments = segments.into_iter().map(|s| LinearSegment { value: s.value - mean, ..s }).collect();
        Ok(Self { kind: ProfileKind::PiecewiseLinear { segments }, mean_shift })
    }

    pub fn kind(&self) -> &ProfileKind<T> {
        &self.kind
    }

    pub fn mean_shift(&self) -> T {
        self.mean_shift
    }

    /// Same `Q`, mean shift increased by `c`.
    pub fn shifted(&self, c: T) -> Self {
        Self { kind: self.kind.clone(), mean_shift: self.mean_shift + c }
    }

    /// `Q(x)`, 1-periodic. Jump points of discontinuous kinds take the
    /// value 0 (sawtooth) or the right limit (piecewise).
    pub fn value(&self, x: T) -> T {
        match &self.kind {
            ProfileKind::TrigSum { coefficients } => trig_value(coefficients, x),
            ProfileKind::SawtoothComb { alpha } => {
                let f = fractional(x);
                if f == T::zero() {
                    T::zero()
                } else {
                    *alpha * (T::half() - f)
                }
            }
            ProfileKind::PiecewiseLinear { segments } => {
                let f = fractional(x);
                let segment = segments.iter().rev().find(|s| s.start <= f).unwrap_or(&segments[0]);
                segment.value + segment.slope * (f - segment.start)
            }
        }
    }

    /// Discontinuity positions within `[0, 1)`; empty for smooth profiles.
    pub fn breakpoints(&self) -> Vec<T> {
        match &self.kind {
            ProfileKind::TrigSum { .. } => Vec::new(),
            ProfileKind::SawtoothComb { .. } => vec![T::zero()],
            ProfileKind::PiecewiseLinear { segments } => segments.iter().map(|s| s.start).collect(),
        }
    }

    /// Breakpoints in the open interval `(lo, hi)`, ascending.
    pub fn breakpoints_between(&self, lo: T, hi: T) -> Vec<T> {
        let cell_points = self.breakpoints();
        if cell_points.is_empty() || hi <= lo {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cell = lo.floor();
        while cell < hi {
            for &b in &cell_points {
                let x = cell + b;
                if x > lo && x < hi {
                    out.push(x);
                }
            }
            cell += T::one();
        }
        out
    }

    /// Formula for `Q` valid on `[lo, hi]`, which must contain no interior breakpoint.
    pub fn piece(&self, lo: T, hi: T) -> PieceFormula<'_, T> {
        let mid = (lo + hi) * T::half();
        let cell = mid.floor();
        match &self.kind {
            ProfileKind::TrigSum { coefficients } => PieceFormula::Trig(coefficients),
            ProfileKind::SawtoothComb { alpha } => PieceFormula::Linear {
                origin: cell,
                value: *alpha * T::half(),
                slope: -*alpha,
            },
            ProfileKind::PiecewiseLinear { segments } => {
                let f = mid - cell;
                let segment = segments.iter().rev().find(|s| s.start <= f).unwrap_or(&segments[0]);
                PieceFormula::Linear { origin: cell + segment.start, value: segment.value, slope: segment.slope }
            }
        }
    }

    /// Upper bound on `sup |Q|`.
    pub fn sup_bound(&self) -> T {
        match &self.kind {
            ProfileKind::TrigSum { coefficients } => {
                coefficients.iter().fold(T::zero(), |acc, c| acc + T::two() * c.norm())
            }
            ProfileKind::SawtoothComb { alpha } => alpha.abs() * T::half(),
            ProfileKind::PiecewiseLinear { segments } => {
                let mut bound = T::zero();
                for (i, s) in segments.iter().enumerate() {
                    let end = segments.get(i + 1).map_or(T::one(), |n| n.start);
                    let tail = s.value + s.slope * (end - s.start);
                    bound = bound.max(s.value.abs()).max(tail.abs());
                }
                bound
            }
        }
    }

    /// Lower bound for the spectrum of the centered operator `−d² + Q'`.
    ///
    /// The form bound gives `≥ −sup|Q|²`; the factor 4 leaves ample margin.
    pub fn centered_floor(&self) -> T {
        let q = self.sup_bound();
        -T::lit(4.0) * (T::one() + q * q)
    }

    /// Whether the profile is identically zero.
    pub fn is_free(&self) -> bool {
        match &self.kind {
            ProfileKind::TrigSum { coefficients } => coefficients.is_empty(),
            ProfileKind::SawtoothComb { alpha } => *alpha == T::zero(),
            ProfileKind::PiecewiseLinear { segments } => {
                segments.iter().all(|s| s.value == T::zero() && s.slope == T::zero())
            }
        }
    }
}
