//! Adaptive one-step integrators for `Y' = A(x) Y` with
//! `A = [[Q, 1], [−λ − Q², −Q]]`, acting on a set of state columns.

use super::matrix::Mat2;
use super::{IntegratorConfig, PropagationError, Scheme};
use crate::potential::PieceFormula;
use crate::scalar::Real;

pub(crate) type Column<T> = [T; 2];

#[inline]
pub(crate) fn coefficient_matrix<T: Real>(q: T, lambda: T) -> Mat2<T> {
    Mat2::new(q, T::one(), -lambda - q * q, -q)
}

/// One trial step: the proposed columns and the scaled error norm.
struct Trial<T> {
    columns: Vec<Column<T>>,
    error: T,
}

fn scaled_error<T: Real>(old: &[Column<T>], high: &[Column<T>], low: &[Column<T>], cfg: &IntegratorConfig<T>) -> T {
    let mut worst = T::zero();
    for ((y, hi), lo) in old.iter().zip(high).zip(low) {
        // columns are scaled as a whole so a vanishing component cannot force tiny steps
        let size = y[0].abs().max(y[1].abs()).max(hi[0].abs()).max(hi[1].abs());
        let scale = cfg.abs_tol + cfg.rel_tol * size;
        for i in 0..2 {
            let e = (hi[i] - lo[i]).abs() / scale;
            if e > worst || e.is_nan() {
                worst = e;
            }
        }
    }
    worst
}

/// Sixth-order Magnus step on three Gauss nodes, with the fourth-order
/// truncation of the same expansion as error estimate. Each step applies
/// `exp(Ω)` of a trace-free `Ω`, so the propagator is unimodular.
fn magnus_step<T: Real>(
    q: &PieceFormula<'_, T>,
    lambda: T,
    x: T,
    h: T,
    columns: &[Column<T>],
    cfg: &IntegratorConfig<T>,
) -> Trial<T> {
    let offset = T::lit(15.0).sqrt() / T::lit(10.0);
    let a1 = coefficient_matrix(q.eval(x + (T::half() - offset) * h), lambda);
    let a2 = coefficient_matrix(q.eval(x + T::half() * h), lambda);
    let a3 = coefficient_matrix(q.eval(x + (T::half() + offset) * h), lambda);

    let alpha1 = a2.scale(h);
    let alpha2 = (a3 - a1).scale(T::lit(15.0).sqrt() * h / T::lit(3.0));
    let alpha3 = (a3 - a2.scale(T::two()) + a1).scale(T::lit(10.0) * h / T::lit(3.0));

    let c1 = alpha1.commutator(&alpha2);
    let c2 = alpha1.commutator(&(alpha3.scale(T::two()) + c1)).scale(-T::one() / T::lit(60.0));
    let base = alpha1 + alpha3.scale(T::one() / T::lit(12.0));
    let left = alpha3.scale(-T::one()) - alpha1.scale(T::lit(20.0)) + c1;
    let omega6 = base + left.commutator(&(alpha2 + c2)).scale(T::one() / T::lit(240.0));
    let omega4 = base - c1.scale(T::one() / T::lit(12.0));

    let e6 = omega6.exp_traceless();
    let e4 = omega4.exp_traceless();
    let high: Vec<_> = columns.iter().map(|y| e6.apply(*y)).collect();
    let low: Vec<_> = columns.iter().map(|y| e4.apply(*y)).collect();
    let error = scaled_error(columns, &high, &low, cfg);
    Trial { columns: high, error }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dormand_prince_step<T: Real>(
    q: &PieceFormula<'_, T>,
    lambda: T,
    x: T,
    h: T,
    columns: &[Column<T>],
    cfg: &IntegratorConfig<T>,
) -> Trial<T> {
    let stage_matrices: Vec<Mat2<T>> =
        DP_C.iter().map(|&c| coefficient_matrix(q.eval(x + T::lit(c) * h), lambda)).collect();
    let mut high = Vec::with_capacity(columns.len());
    let mut low = Vec::with_capacity(columns.len());
    for y in columns {
        let mut k = [[T::zero(); 2]; 7];
        for s in 0..7 {
            let mut arg = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = T::lit(DP_A[s][j]) * h;
                arg[0] += a * kj[0];
                arg[1] += a * kj[1];
            }
            k[s] = stage_matrices[s].apply(arg);
        }
        let mut y5 = *y;
        let mut y4 = *y;
        for s in 0..7 {
            for i in 0..2 {
                y5[i] += h * T::lit(DP_B5[s]) * k[s][i];
                y4[i] += h * T::lit(DP_B4[s]) * k[s][i];
            }
        }
        high.push(y5);
        low.push(y4);
    }
    let error = scaled_error(columns, &high, &low, cfg);
    Trial { columns: high, error }
}

/// Integrates `columns` across `[a, b]` where `q` is a single closed formula.
/// `steps` counts every attempted step against `cfg.max_steps`.
pub(crate) fn integrate_piece<T: Real>(
    q: &PieceFormula<'_, T>,
    lambda: T,
    a: T,
    b: T,
    columns: &mut Vec<Column<T>>,
    h_guess: &mut T,
    steps: &mut usize,
    cfg: &IntegratorConfig<T>,
) -> Result<(), PropagationError> {
    let length = b - a;
    if length <= T::zero() {
        return Ok(());
    }
    let exponent = T::one() / T::lit(5.0);
    let safety = T::lit(0.9);
    let min_factor = T::lit(0.2);
    let max_factor = T::lit(5.0);
    let h_floor = T::epsilon() * T::lit(16.0) * (T::one() + a.abs().max(b.abs()));

    let mut x = a;
    let mut h = h_guess.min(length);
    while x < b {
        if *steps >= cfg.max_steps {
            return Err(PropagationError::StepLimit { x: x.to_f64().unwrap_or(f64::NAN), steps: *steps });
        }
        *steps += 1;
        let last = x + h >= b || b - (x + h) < h_floor;
        let step = if last { b - x } else { h };
        let trial = match cfg.scheme {
            Scheme::Magnus6 => magnus_step(q, lambda, x, step, columns, cfg),
            Scheme::DormandPrince54 => dormand_prince_step(q, lambda, x, step, columns, cfg),
        };
        if !trial.error.is_finite() || trial.columns.iter().any(|c| !(c[0].is_finite() && c[1].is_finite())) {
            return Err(PropagationError::Blowup { x: x.to_f64().unwrap_or(f64::NAN) });
        }
        if trial.error <= T::one() {
            *columns = trial.columns;
            x = if last { b } else { x + step };
            let grow = if trial.error == T::zero() {
                max_factor
            } else {
                (safety * trial.error.powf(-exponent)).min(max_factor).max(T::one())
            };
            // a truncated final step says nothing about the natural step size
            if !last || step >= h {
                h = step * grow;
            }
        } else {
            let shrink = (safety * trial.error.powf(-exponent)).max(min_factor);
            h = step * shrink;
            if h < h_floor {
                return Err(PropagationError::StepLimit { x: x.to_f64().unwrap_or(f64::NAN), steps: *steps });
            }
        }
    }
    *h_guess = h;
    Ok(())
}
