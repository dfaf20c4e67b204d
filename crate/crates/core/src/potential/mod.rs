//! Distributional periodic potentials and their square-integrable primitives.
//!
//! A potential `q ∈ H⁻¹_per` is described by its Fourier table on the basis
//! `e^{2πimx}`. The coefficient stored under index `m` is the amplitude of
//! that harmonic; it corresponds to the even-index coefficient `q̂(2m)` of
//! the `e^{ikπx}, k ∈ 2ℤ` convention, which only shows up in the norm weight
//! `⟨2m⟩ = 1 + 2|m|`.
//!
//! Every `q` in the class splits as `q = C + Q'` with `C` the mean and `Q` a
//! real, zero-mean, 1-periodic `L²` function. The engine never integrates `q`
//! itself; it integrates the first-order system built from `Q`, and shifts
//! spectral results by `C` at the end.

mod file;
mod profile;

use std::collections::BTreeMap;
use std::ops::Sub;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub use file::{HarmonicEntry, PotentialFile, PotentialSource};
pub use profile::{LinearSegment, PieceFormula, PrimitiveProfile, ProfileKind};

/// Failures constructing potentials or profiles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("hermitian symmetry violated at harmonic {m}: coefficient of -m is not the conjugate of +m")]
    SymmetryViolation { m: i64 },
    #[error("duplicate harmonic index {m}")]
    DuplicateIndex { m: i64 },
    #[error("harmonic index 0 is reserved for the mean; pass it separately")]
    ZeroIndex,
    #[error("non-finite coefficient at harmonic {m}")]
    NonFinite { m: i64 },
    #[error("invalid primitive profile: {0}")]
    InvalidProfile(String),
    #[error("invalid potential description: {0}")]
    InvalidDescription(String),
}

/// Finite, Hermitian-symmetric Fourier table of a real periodic distribution.
///
/// The mean `C = q̂(0)` is held apart from the oscillatory harmonics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct FourierPotential<T> {
    harmonics: BTreeMap<i64, Complex<T>>,
    mean: T,
    max_harmonic: u32,
}

impl<T: Real> FourierPotential<T> {
    /// The constant potential `q ≡ c`.
    pub fn constant(c: T) -> Self {
        Self { harmonics: BTreeMap::new(), mean: c, max_harmonic: 0 }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Builds a potential from `(m, q̂(2m))` entries.
    ///
    /// Entries with `m < 0` may be omitted; they are synthesized as conjugates.
    /// When both `m` and `-m` are supplied they must be exact conjugates.
    pub fn from_harmonics<I>(entries: I, mean: T) -> Result<Self, PotentialError>
    where
        I: IntoIterator<Item = (i64, Complex<T>)>,
    {
        let mut given: BTreeMap<i64, Complex<T>> = BTreeMap::new();
        for (m, value) in entries {
            if m == 0 {
                return Err(PotentialError::ZeroIndex);
            }
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(PotentialError::NonFinite { m });
            }
            if given.insert(m, value).is_some() {
                return Err(PotentialError::DuplicateIndex { m });
            }
        }
        if !mean.is_finite() {
            return Err(PotentialError::NonFinite { m: 0 });
        }

        let mut harmonics = BTreeMap::new();
        for (&m, &value) in &given {
            match given.get(&-m) {
                Some(&partner) if partner != value.conj() => {
                    return Err(PotentialError::SymmetryViolation { m: m.abs() });
                }
                Some(_) => {}
                None => {
                    harmonics.insert(-m, value.conj());
                }
            }
            harmonics.insert(m, value);
        }
        let max_harmonic = harmonics.keys().map(|m| m.unsigned_abs() as u32).max().unwrap_or(0);
        Ok(Self { harmonics, mean, max_harmonic })
    }

    /// Fourier table of `α Σ_n δ(x − n)` truncated to `|m| ≤ k`.
    pub fn delta_comb(alpha: T, k: u32) -> Self {
        let mut harmonics = BTreeMap::new();
        for m in 1..=i64::from(k) {
            harmonics.insert(m, Complex::new(alpha, T::zero()));
            harmonics.insert(-m, Complex::new(alpha, T::zero()));
        }
        Self { harmonics, mean: alpha, max_harmonic: k }
    }

    /// Seeded random potential: `q̂(2m) = amplitude · |m|^{-decay} · ζ_m`
    /// with `ζ_m` uniform in the unit disk, conjugate-symmetrized, mean zero.
    pub fn random(seed: u64, k: u32, amplitude: T, decay: T) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut harmonics = BTreeMap::new();
        for m in 1..=i64::from(k) {
            let radius = rng.random::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.random::<f64>();
            let zeta = Complex::new(T::lit(radius * angle.cos()), T::lit(radius * angle.sin()));
            let weight = amplitude * T::from_i64(m).unwrap().powf(-decay);
            let value = zeta * weight;
            harmonics.insert(m, value);
            harmonics.insert(-m, value.conj());
        }
        Self { harmonics, mean: T::zero(), max_harmonic: k }
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// Upper bound `K` on the stored harmonic indices.
    pub fn max_harmonic(&self) -> u32 {
        self.max_harmonic
    }

    /// Coefficient of `e^{2πimx}`; index 0 returns the mean.
    pub fn coefficient(&self, m: i64) -> Complex<T> {
        if m == 0 {
            return Complex::new(self.mean, T::zero());
        }
        self.harmonics.get(&m).copied().unwrap_or_else(Complex::zero)
    }

    /// Stored harmonics (both signs, `m ≠ 0`) in increasing index order.
    pub fn harmonics(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.harmonics.iter().map(|(&m, &v)| (m, v))
    }

    /// Same harmonics, mean replaced by `mean + c`.
    pub fn shifted(&self, c: T) -> Self {
        Self { mean: self.mean + c, ..self.clone() }
    }

    /// Drops all harmonics with `|m| > n`.
    pub fn truncate(&self, n: u32) -> Self {
        let harmonics: BTreeMap<_, _> = self
            .harmonics
            .iter()
            .filter(|(m, _)| m.unsigned_abs() <= u64::from(n))
            .map(|(&m, &v)| (m, v))
            .collect();
        Self { harmonics, mean: self.mean, max_harmonic: self.max_harmonic.min(n) }
    }

    /// `(Σ_{k∈2ℤ} ⟨k⟩⁻² |q̂(k)|²)^{1/2}` with `⟨k⟩ = 1 + |k|`.
    pub fn hminus1_norm(&self) -> T {
        let mut sum = self.mean * self.mean;
        for (&m, v) in &self.harmonics {
            let weight = T::one() + T::two() * T::from_i64(m.abs()).unwrap();
            sum += v.norm_sqr() / (weight * weight);
        }
        sum.sqrt()
    }

    /// `q(x)` as a trigonometric polynomial, mean included.
    pub fn value(&self, x: T) -> T {
        let mut total = self.mean;
        for (&m, &v) in self.harmonics.range(1..) {
            let phase = T::two_pi() * T::from_i64(m).unwrap() * x;
            let (s, c) = phase.sin_cos();
            total += T::two() * (v.re * c - v.im * s);
        }
        total
    }

    /// Hermitian symmetry check over every stored index.
    pub fn is_hermitian(&self) -> bool {
        self.harmonics.iter().all(|(&m, &v)| self.harmonics.get(&-m) == Some(&v.conj()))
    }

    /// L² primitive `Q` with `q = C + Q'`; `Q̂(m) = q̂(2m) / (2πim)`.
    pub fn primitive(&self) -> PrimitiveProfile<T> {
        PrimitiveProfile::from_potential(self)
    }
}

impl<T: Real> Sub for &FourierPotential<T> {
    type Output = FourierPotential<T>;

    fn sub(self, rhs: Self) -> FourierPotential<T> {
        let mut harmonics = self.harmonics.clone();
        for (&m, &v) in &rhs.harmonics {
            let entry = harmonics.entry(m).or_insert_with(Complex::zero);
            *entry -= v;
        }
        harmonics.retain(|_, v| *v != Complex::zero());
        FourierPotential {
            harmonics,
            mean: self.mean - rhs.mean,
            max_harmonic: self.max_harmonic.max(rhs.max_harmonic),
        }
    }
}

/// `(Fourier table truncated at k, exact sawtooth primitive)` for `α Σ δ(x − n)`.
pub fn delta_comb<T: Real>(alpha: T, k: u32) -> (FourierPotential<T>, PrimitiveProfile<T>) {
    (FourierPotential::delta_comb(alpha, k), PrimitiveProfile::sawtooth_comb(alpha))
}

pub fn build_primitive<T: Real>(p: &FourierPotential<T>) -> PrimitiveProfile<T> {
    p.primitive()
}

pub fn hminus1_norm<T: Real>(p: &FourierPotential<T>) -> T {
    p.hminus1_norm()
}

pub fn truncate<T: Real>(p: &FourierPotential<T>, n: u32) -> FourierPotential<T> {
    p.truncate(n)
}

pub fn random_potential<T: Real>(seed: u64, k: u32, amplitude: T, decay: T) -> FourierPotential<T> {
    FourierPotential::random(seed, k, amplitude, decay)
}

/// Decay exponent putting random potentials in `H⁻¹` but outside `L²`.
pub const DEFAULT_RANDOM_DECAY: f64 = 0.6;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn positive_entries_synthesize_conjugates() {
        let p = FourierPotential::from_harmonics([(1, c(1.0, 0.0))], 0.0).unwrap();
        assert_eq!(p.coefficient(-1), c(1.0, 0.0));
        assert_eq!(p.max_harmonic(), 1);
        assert_relative_eq!(p.value(0.0), 2.0);
        assert_relative_eq!(p.value(0.25), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn matching_conjugate_pair_is_accepted() {
        let a = FourierPotential::from_harmonics([(1, c(1.0, 0.0)), (-1, c(1.0, -0.0))], 0.0).unwrap();
        let b = FourierPotential::from_harmonics([(1, c(1.0, 0.0))], 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conflicting_pair_is_rejected() {
        let err = FourierPotential::from_harmonics([(2, c(1.0, 0.5)), (-2, c(1.0, 0.5))], 0.0).unwrap_err();
        assert_eq!(err, PotentialError::SymmetryViolation { m: 2 });
    }

    #[test]
    fn duplicate_and_zero_indices_are_format_errors() {
        let dup = FourierPotential::from_harmonics([(1, c(1.0, 0.0)), (1, c(2.0, 0.0))], 0.0);
        assert_eq!(dup.unwrap_err(), PotentialError::DuplicateIndex { m: 1 });
        let zero = FourierPotential::from_harmonics([(0, c(1.0, 0.0))], 0.0);
        assert_eq!(zero.unwrap_err(), PotentialError::ZeroIndex);
    }

    #[test]
    fn empty_table_is_constant() {
        let p = FourierPotential::<f64>::from_harmonics([], 3.5).unwrap();
        assert_eq!(p.harmonics().count(), 0);
        assert_eq!(p.value(0.123), 3.5);
    }

    #[test]
    fn hminus1_norm_values() {
        let p = FourierPotential::from_harmonics([(1, c(1.0, 0.0))], 0.0).unwrap();
        assert_relative_eq!(p.hminus1_norm(), 2f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_eq!(FourierPotential::<f64>::zero().hminus1_norm(), 0.0);
        assert_eq!(FourierPotential::<f64>::constant(1.0).hminus1_norm(), 1.0);
    }

    #[test]
    fn truncate_drops_high_harmonics() {
        let p = FourierPotential::<f64>::delta_comb(1.0, 8);
        let t = p.truncate(2);
        let kept: Vec<_> = t.harmonics().collect();
        assert_eq!(kept.len(), 4);
        assert!(kept.iter().all(|(m, v)| m.abs() <= 2 && *v == c(1.0, 0.0)));
        assert_eq!(t.mean(), 1.0);
        assert_eq!(p.truncate(8), p);
        assert_eq!(p.truncate(20), p);
        let flat = p.truncate(0);
        assert_eq!(flat.harmonics().count(), 0);
        assert_eq!(flat.mean(), 1.0);
    }

    #[test]
    fn random_potential_is_deterministic_and_hermitian() {
        let a = FourierPotential::<f64>::random(7, 16, 5.0, 0.6);
        let b = FourierPotential::<f64>::random(7, 16, 5.0, 0.6);
        assert_eq!(a, b);
        assert!(a.is_hermitian());
        assert_eq!(a.mean(), 0.0);
        let other = FourierPotential::<f64>::random(8, 16, 5.0, 0.6);
        assert_ne!(a, other);
        let silent = FourierPotential::<f64>::random(7, 16, 0.0, 0.6);
        assert!(silent.harmonics().all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn random_coefficients_respect_envelope() {
        let p = FourierPotential::<f64>::random(3, 32, 2.0, 0.6);
        for (m, v) in p.harmonics() {
            assert!(v.norm() <= 2.0 * (m.abs() as f64).powf(-0.6) + 1e-15);
        }
    }

    #[test]
    fn difference_vanishes_at_full_truncation() {
        let p = FourierPotential::<f64>::random(11, 12, 3.0, 0.6);
        assert_eq!((&p - &p.truncate(12)).hminus1_norm(), 0.0);
        assert!((&p - &p.truncate(6)).hminus1_norm() > 0.0);
    }
}
