use serde::{Deserialize, Serialize};

use super::{band_structure, BandStructure, SearchConfig, SpectrumError};
use crate::potential::FourierPotential;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow<T> {
    pub n: u32,
    pub structure: BandStructure<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy<T> {
    pub rows: Vec<ConvergenceRow<T>>,
    /// `differences[j][i] = |λ_i(q_{n_{j+1}}) − λ_i(q_{n_j})|`.
    pub differences: Vec<Vec<T>>,
}

impl<T: Real> ConvergenceStudy<T> {
    /// Largest endpoint change between each pair of successive truncations.
    pub fn max_differences(&self) -> Vec<T> {
        self.differences.iter().map(|d| d.iter().fold(T::zero(), |m, &x| m.max(x))).collect()
    }
}

/// Band structure of each truncation `q_n`, `n` in `n_list`, with the
/// endpoint changes between successive rows.
pub fn convergence_study<T: Real>(
    q: &FourierPotential<T>,
    n_list: &[u32],
    cfg: &SearchConfig<T>,
) -> Result<ConvergenceStudy<T>, SpectrumError> {
    if n_list.is_empty() {
        return Err(SpectrumError::InvalidConfig("n_list must not be empty".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectrumError::InvalidConfig("n_list must be strictly increasing".into()));
    }
    let rows = n_list
        .iter()
        .map(|&n| band_structure(&q.truncate(n).primitive(), cfg).map(|structure| ConvergenceRow { n, structure }))
        .collect::<Result<Vec<_>, _>>()?;
    let differences = rows
        .windows(2)
        .map(|w| {
            w[0].structure
                .endpoints
                .iter()
                .zip(&w[1].structure.endpoints)
                .map(|(a, b)| (b.lambda - a.lambda).abs())
                .collect()
        })
        .collect();
    Ok(ConvergenceStudy { rows, differences })
}
