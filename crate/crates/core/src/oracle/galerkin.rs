//! Dense Fourier–Galerkin discretisation of `−u'' + qu` on one period.
//!
//! Periodic problems use `e^{2πimx}`, semiperiodic ones `e^{iπ(2m+1)x}`. In
//! both bases the potential couples `m` and `m'` through the coefficient of
//! `e^{2πi(m−m')x}`, so the matrix is Hermitian by construction.

use nalgebra::{DMatrix, RealField, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::potential::FourierPotential;
use crate::scalar::Real;
use crate::spectrum::Parity;

pub const DEFAULT_GALERKIN_SIZE: usize = 256;
const MIN_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GalerkinError {
    #[error("basis size {0} is below the minimum of {MIN_SIZE}")]
    TooSmall(usize),
    #[error("requested {count} eigenvalues from a basis of {size}")]
    CountExceedsSize { count: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct GalerkinProblem<T> {
    pub potential: FourierPotential<T>,
    pub parity: Parity,
    pub size: usize,
}

impl<T: Real> GalerkinProblem<T> {
    pub fn new(potential: FourierPotential<T>, parity: Parity, size: usize) -> Result<Self, GalerkinError> {
        if size < MIN_SIZE {
            return Err(GalerkinError::TooSmall(size));
        }
        Ok(Self { potential, parity, size })
    }

    /// Basis indices `m` in increasing order, as symmetric about the
    /// spectrum's zero frequency as the parity of `N` allows.
    pub fn indices(&self) -> Vec<i64> {
        basis_indices(self.parity, self.size)
    }
}

fn basis_indices(parity: Parity, size: usize) -> Vec<i64> {
    let n = size as i64;
    let first = match parity {
        Parity::Periodic => -(n - 1) / 2,
        Parity::Semiperiodic => -n / 2,
    };
    (first..first + n).collect()
}

fn frequency<T: Real>(parity: Parity, m: i64) -> T {
    let m = T::from_i64(m).expect("index representable");
    match parity {
        Parity::Periodic => T::two_pi() * m,
        Parity::Semiperiodic => T::PI() * (T::two() * m + T::one()),
    }
}

fn assemble<T: Real>(potential: &FourierPotential<T>, parity: Parity, size: usize) -> DMatrix<Complex<T>> {
    let indices = basis_indices(parity, size);
    DMatrix::from_fn(size, size, |i, j| {
        let coupling = potential.coefficient(indices[i] - indices[j]);
        if i == j {
            let w: T = frequency(parity, indices[i]);
            coupling + Complex::new(w * w, T::zero())
        } else {
            coupling
        }
    })
}

/// Stiffness-plus-potential matrix on the basis of [`GalerkinProblem::indices`].
pub fn galerkin_matrix<T: Real>(gp: &GalerkinProblem<T>) -> DMatrix<Complex<T>> {
    assemble(&gp.potential, gp.parity, gp.size)
}

/// Lowest `count` eigenvalues, ascending.
pub fn galerkin_eigenvalues<T: Real + RealField>(gp: &GalerkinProblem<T>, count: usize) -> Result<Vec<T>, GalerkinError> {
    if count > gp.size {
        return Err(GalerkinError::CountExceedsSize { count, size: gp.size });
    }
    let eigen = SymmetricEigen::new(galerkin_matrix(gp));
    let mut values: Vec<T> = eigen.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    values.truncate(count);
    Ok(values)
}
