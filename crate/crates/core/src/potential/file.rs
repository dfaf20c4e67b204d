//! JSON description of a potential, as read by the command-line tool.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FourierPotential, PotentialError, PrimitiveProfile, DEFAULT_RANDOM_DECAY};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicEntry {
    pub m: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn default_truncation() -> u32 {
    32
}

fn default_decay() -> f64 {
    DEFAULT_RANDOM_DECAY
}

/// On-disk potential description.
///
/// ```json
/// {"type":"fourier","mean":0.0,"harmonics":[{"m":1,"re":1.0,"im":0.0}]}
/// {"type":"delta_comb","alpha":1.0,"truncation":16}
/// {"type":"random","seed":7,"K":32,"amplitude":5.0,"decay":0.6}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialFile {
    Fourier {
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        harmonics: Vec<HarmonicEntry>,
    },
    DeltaComb {
        alpha: f64,
        #[serde(default = "default_truncation")]
        truncation: u32,
    },
    Random {
        seed: u64,
        #[serde(rename = "K")]
        k: u32,
        amplitude: f64,
        #[serde(default = "default_decay")]
        decay: f64,
    },
}

/// A resolved potential: its Fourier table and the primitive the engine integrates.
///
/// For the δ-comb the primitive is the exact sawtooth while the table is
/// the finite truncation; convergence studies work from the table.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSource<T> {
    pub potential: FourierPotential<T>,
    pub profile: PrimitiveProfile<T>,
}

impl PotentialFile {
    pub fn from_json(text: &str) -> Result<Self, PotentialError> {
        serde_json::from_str(text).map_err(|e| PotentialError::InvalidDescription(e.to_string()))
    }

    pub fn resolve<T: Real>(&self) -> Result<PotentialSource<T>, PotentialError> {
        match self {
            PotentialFile::Fourier { mean, harmonics } => {
                if let Some(bad) = harmonics.iter().find(|h| h.m <= 0) {
                    return Err(PotentialError::InvalidDescription(format!(
                        "harmonic index {} not positive; list m > 0 only, conjugates are synthesized",
                        bad.m
                    )));
                }
                let entries = harmonics.iter().map(|h| (h.m, Complex::new(T::lit(h.re), T::lit(h.im))));
                let potential = FourierPotential::from_harmonics(entries, T::lit(*mean))?;
                let profile = potential.primitive();
                Ok(PotentialSource { potential, profile })
            }
            PotentialFile::DeltaComb { alpha, truncation } => {
                if !alpha.is_finite() {
                    return Err(PotentialError::InvalidDescription("alpha must be finite".into()));
                }
                let (potential, profile) = super::delta_comb(T::lit(*alpha), *truncation);
                Ok(PotentialSource { potential, profile })
            }
            PotentialFile::Random { seed, k, amplitude, decay } => {
                if *k < 1 {
                    return Err(PotentialError::InvalidDescription("K must be at least 1".into()));
                }
                if !(*decay >= 0.0) || !amplitude.is_finite() {
                    return Err(PotentialError::InvalidDescription(
                        "decay must be non-negative and amplitude finite".into(),
                    ));
                }
                let potential = FourierPotential::random(*seed, *k, T::lit(*amplitude), T::lit(*decay));
                let profile = potential.primitive();
                Ok(PotentialSource { potential, profile })
            }
        }
    }
}
