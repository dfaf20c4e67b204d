mod common;

use common::{cosine_potential, galerkin_endpoints};
use hillband::oracle::{free_transfer, galerkin_eigenvalues, kp_discriminant, kp_quasi_transfer, kp_transfer, GalerkinProblem};
use hillband::propagator::{monodromy, transfer_matrix};
use hillband::spectrum::{band_structure, sample_discriminant, semiperiodic_eigenvalues};
use hillband::{FourierPotential, IntegratorConfig, Mat2, Parity, PrimitiveProfile, SearchConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn close(a: &Mat2<f64>, b: &Mat2<f64>, tol: f64) -> bool {
    (*a - *b).max_abs() <= tol
}

#[test]
fn sawtooth_transfer_matches_kronig_penney() {
    let cfg = IntegratorConfig::default();
    for &(alpha, lambda) in &[(1.0, 1.0), (4.0, 30.0), (-2.0, -3.0), (1.0, 250.0)] {
        let profile = PrimitiveProfile::<f64>::sawtooth_comb(alpha);
        let engine = transfer_matrix(&profile, lambda, 0.0, 1.0, &cfg).unwrap();
        assert!(close(&engine, &kp_quasi_transfer(alpha, lambda), 1e-8), "α={alpha} λ={lambda}");
        // back in (u, u') coordinates at x = 0⁺ the map is J·F
        let s = Mat2::new(1.0, 0.0, alpha / 2.0, 1.0);
        let classical = s * engine * s.inverse_unimodular();
        assert!(close(&classical, &kp_transfer(alpha, lambda), 1e-8));
    }
}

#[test]
fn kp_trace_is_discriminant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let alpha: f64 = rng.random_range(-6.0..6.0);
        let lambda: f64 = rng.random_range(-40.0..400.0);
        let m = kp_transfer(alpha, lambda);
        let d = kp_discriminant(alpha, lambda);
        assert!((m.trace() - d).abs() <= 1e-12 * d.abs().max(1.0));
        assert!((m.det() - 1.0).abs() < 1e-9 * m.max_abs().powi(2).max(1.0));
    }
    for lambda in [0.5, 3.0, 40.0, 1e3] {
        assert_eq!(kp_discriminant(0.0, lambda), 2.0 * f64::sqrt(lambda).cos());
        assert_eq!(free_transfer(lambda).trace(), kp_transfer(0.0, lambda).trace());
    }
}

#[test]
fn sampled_sawtooth_discriminant_matches_closed_form() {
    let samples = sample_discriminant(&PrimitiveProfile::<f64>::sawtooth_comb(1.0), 0.0, 50.0, 120, &SearchConfig::default()).unwrap();
    for s in samples {
        assert!((s.delta.unwrap() - kp_discriminant(1.0, s.lambda)).abs() < 1e-8);
    }
}

#[test]
fn galerkin_is_self_consistent_in_size() {
    let q = cosine_potential();
    for parity in [Parity::Periodic, Parity::Semiperiodic] {
        let coarse = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), parity, 128).unwrap(), 6).unwrap();
        let fine = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), parity, 256).unwrap(), 6).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            assert!((c - f).abs() < 1e-8);
            assert!(*f <= c + 1e-8);
        }
    }
}

#[test]
fn galerkin_is_variationally_monotone_for_rough_potential() {
    let q = FourierPotential::random(3, 16, 5.0, 0.6);
    for parity in [Parity::Periodic, Parity::Semiperiodic] {
        let coarse = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), parity, 128).unwrap(), 6).unwrap();
        let fine = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), parity, 256).unwrap(), 6).unwrap();
        assert!(fine.iter().zip(&coarse).all(|(f, c)| *f <= c + 1e-8));
    }
}

#[test]
fn cosine_first_gap_matches_galerkin() {
    let q = cosine_potential();
    let cfg = SearchConfig::with_gaps(1);
    let engine = semiperiodic_eigenvalues(&q.primitive(), 2, &cfg).unwrap();
    let oracle = galerkin_eigenvalues(&GalerkinProblem::new(q.clone(), Parity::Semiperiodic, 256).unwrap(), 2).unwrap();
    for (e, o) in engine.iter().zip(&oracle) {
        assert!((e - o).abs() < 1e-6 * o.abs());
    }
    assert!(engine[0] < PI * PI && engine[1] > PI * PI);
    // first-order perturbation theory: π² ∓ 1
    assert!((engine[0] - (PI * PI - 1.0)).abs() < 0.05 && (engine[1] - (PI * PI + 1.0)).abs() < 0.05);
}

#[test]
fn random_potential_endpoints_match_galerkin() {
    let q = FourierPotential::random(4, 8, 3.0, 0.6);
    let engine = band_structure(&q.primitive(), &SearchConfig::with_gaps(3)).unwrap().lambdas();
    let oracle = galerkin_endpoints(&q, 3, 256);
    for (e, o) in engine.iter().zip(&oracle) {
        assert!((e - o).abs() < 1e-6 * o.abs().max(1.0), "{e} vs {o}");
    }
}

#[test]
fn monodromy_trace_is_base_point_free_for_comb() {
    let cfg = IntegratorConfig::default();
    let profile = PrimitiveProfile::<f64>::sawtooth_comb(4.0);
    for lambda in [-10.0, 5.0, 60.0] {
        let at_zero = monodromy(&profile, lambda, 0.0, &cfg).unwrap().trace();
        let at_half = monodromy(&profile, lambda, 0.5, &cfg).unwrap().trace();
        assert!((at_zero - at_half).abs() < 1e-8);
        assert!((at_zero - kp_discriminant(4.0, lambda)).abs() < 1e-8);
    }
}
