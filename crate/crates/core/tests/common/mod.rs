//! Reference values computed without the propagator.

#![allow(dead_code)]

use hillband::oracle::{galerkin_eigenvalues, kp_discriminant, GalerkinProblem};
use hillband::roots::brent_root;
use hillband::{FourierPotential, Parity};
use num_complex::Complex;
use std::convert::Infallible;

/// `q = 2cos(2πx)`.
pub fn cosine_potential() -> FourierPotential<f64> {
    FourierPotential::from_harmonics([(1, Complex::new(1.0, 0.0))], 0.0).unwrap()
}

/// `λ₀, λ₁⁻, λ₁⁺, …` for the delta comb of strength `alpha`, from sign
/// changes of the closed-form discriminant on a fine grid in `√λ`.
/// Collapsed gaps cannot occur for `alpha ≠ 0`.
pub fn kp_endpoints(alpha: f64, gaps: usize) -> Vec<f64> {
    assert!(alpha != 0.0);
    let needed = 1 + 2 * gaps;
    let floor = -(alpha.abs() + 2.0).powi(2);
    let to_lambda = |s: f64| floor + s * s;
    let mut roots = Vec::new();
    let step = 1e-3;
    let mut s = 0.0;
    let mut prev = (to_lambda(s), kp_discriminant(alpha, to_lambda(s)));
    assert!(prev.1 > 2.0);
    while roots.len() < needed {
        s += step;
        let lambda = to_lambda(s);
        let next = (lambda, kp_discriminant(alpha, lambda));
        for target in [2.0, -2.0] {
            let (ga, gb) = (prev.1 - target, next.1 - target);
            if (ga > 0.0) != (gb > 0.0) {
                let f = |l: f64| Ok::<_, Infallible>(kp_discriminant(alpha, l) - target);
                let root = brent_root(f, prev.0, next.0, ga, gb, 1e-14 * lambda.abs().max(1.0), 200).unwrap();
                roots.push(root.x);
            }
        }
        prev = next;
    }
    roots.sort_by(f64::total_cmp);
    roots.truncate(needed);
    roots
}

/// Gap endpoints from the Galerkin matrices, merged in increasing order:
/// the periodic list supplies `λ₀` and even gaps, the semiperiodic list odd gaps.
pub fn galerkin_endpoints(q: &FourierPotential<f64>, gaps: usize, size: usize) -> Vec<f64> {
    let periodic_count = 1 + 2 * (gaps / 2);
    let semi_count = 2 * gaps.div_ceil(2);
    let periodic = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), Parity::Periodic, size).unwrap(), periodic_count).unwrap();
    let semi = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), Parity::Semiperiodic, size).unwrap(), semi_count).unwrap();
    let mut all: Vec<f64> = periodic.into_iter().chain(semi).collect();
    all.sort_by(f64::total_cmp);
    all
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Prints the one-line verdict and fails the test on a miss.
pub fn report(criterion: u32, title: &str, passed: bool, detail: &str) {
    println!("criterion {criterion} [{}] {title}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {criterion} failed: {detail}");
}
