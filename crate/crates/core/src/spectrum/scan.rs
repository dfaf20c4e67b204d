use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SearchConfig, SpectrumError};
use crate::potential::PrimitiveProfile;
use crate::propagator::{discriminant, IntegratorConfig};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample<T> {
    pub lambda: T,
    /// `None` where integration failed.
    pub delta: Option<T>,
}

/// Signed square-root coordinate `s = sgn(λ − f)·√|λ − f|` about the floor `f`.
pub(crate) fn to_s<T: Real>(floor: T, lambda: T) -> T {
    let d = lambda - floor;
    d.abs().sqrt().copysign(d)
}

pub(crate) fn from_s<T: Real>(floor: T, s: T) -> T {
    floor + s * s.abs()
}

/// Physical scan floor for `profile`.
pub(crate) fn physical_floor<T: Real>(profile: &PrimitiveProfile<T>, cfg: &SearchConfig<T>) -> T {
    cfg.lambda_floor.unwrap_or_else(|| profile.mean_shift() + profile.centered_floor())
}

/// `Δ` at each λ, evaluated in parallel; failures become `None`.
pub(crate) fn evaluate<T: Real>(profile: &PrimitiveProfile<T>, lambdas: &[T], cfg: &IntegratorConfig<T>) -> Vec<Option<T>> {
    lambdas
        .par_iter()
        .map(|&lambda| match discriminant(profile, lambda, cfg) {
            Ok(d) => Some(d),
            Err(err) => {
                log::debug!("discriminant failed at λ = {lambda}: {err}");
                None
            }
        })
        .collect()
}

/// `n` samples of `Δ` on `[lambda_lo, lambda_hi]`, uniform in the signed
/// square-root coordinate about the scan floor, so uniform in `√λ` above it.
pub fn sample_discriminant<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda_lo: T,
    lambda_hi: T,
    n: usize,
    cfg: &SearchConfig<T>,
) -> Result<Vec<DiscriminantSample<T>>, SpectrumError> {
    if !(lambda_lo < lambda_hi) || !lambda_lo.is_finite() || !lambda_hi.is_finite() {
        return Err(SpectrumError::InvalidConfig("sampling needs finite lambda_lo < lambda_hi".into()));
    }
    if n < 2 {
        return Err(SpectrumError::InvalidConfig("sampling needs at least 2 points".into()));
    }
    cfg.integrator.validate()?;
    let floor = physical_floor(profile, cfg);
    let (s_lo, s_hi) = (to_s(floor, lambda_lo), to_s(floor, lambda_hi));
    let last = T::from_count(n - 1);
    let mut lambdas: Vec<T> = (0..n)
        .map(|i| from_s(floor, s_lo + (s_hi - s_lo) * T::from_count(i) / last))
        .collect();
    lambdas[0] = lambda_lo;
    lambdas[n - 1] = lambda_hi;
    let deltas = evaluate(profile, &lambdas, &cfg.integrator);
    Ok(lambdas.into_iter().zip(deltas).map(|(lambda, delta)| DiscriminantSample { lambda, delta }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::FourierPotential;

    #[test]
    fn signed_root_coordinates_invert() {
        for &l in &[-50.0f64, -1.0, 0.0, 3.0, 400.0] {
            let s = to_s(-4.0, l);
            assert!((from_s(-4.0, s) - l).abs() < 1e-12);
        }
        assert!(to_s(0.0, -9.0) == -3.0);
    }

    #[test]
    fn free_samples_match_cosine() {
        let free = FourierPotential::<f64>::zero().primitive();
        let samples = sample_discriminant(&free, 0.0, 50.0, 6, &SearchConfig::default()).unwrap();
        assert_eq!(samples.len(), 6);
        for w in samples.windows(2) {
            assert!(w[1].lambda > w[0].lambda);
        }
        for s in &samples {
            let expected = 2.0 * s.lambda.sqrt().cos();
            assert!((s.delta.unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn samples_strictly_increase_across_floor() {
        let q = FourierPotential::<f64>::random(2, 8, 3.0, 0.6).primitive();
        let samples = sample_discriminant(&q, -80.0, 30.0, 40, &SearchConfig::default()).unwrap();
        assert!(samples.windows(2).all(|w| w[1].lambda > w[0].lambda));
        assert_eq!(samples[0].lambda, -80.0);
        assert_eq!(samples[39].lambda, 30.0);
    }

    #[test]
    fn rejects_bad_ranges() {
        let free = FourierPotential::<f64>::zero().primitive();
        let cfg = SearchConfig::default();
        assert!(sample_discriminant(&free, 1.0, 1.0, 5, &cfg).is_err());
        assert!(sample_discriminant(&free, 0.0, 1.0, 1, &cfg).is_err());
    }

    #[test]
    fn failures_are_missing_samples() {
        let free = FourierPotential::<f64>::zero().primitive();
        let mut cfg = SearchConfig::default();
        cfg.integrator.max_steps = 4;
        let samples = sample_discriminant(&free, 0.0, 2000.0, 3, &cfg).unwrap();
        assert!(samples[0].delta.is_some());
        assert!(samples[2].delta.is_none());
    }
}
