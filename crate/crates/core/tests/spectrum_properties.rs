mod common;

use common::{cosine_potential, kp_endpoints};
use hillband::propagator::discriminant;
use hillband::spectrum::{
    band_structure, classify_and_validate, convergence_study, detect_tangency, periodic_eigenvalues,
    semiperiodic_eigenvalues, validate_against_discriminant, Target, Verdict,
};
use hillband::{BandStructure, FourierPotential, Parity, PrimitiveProfile, SearchConfig, Side};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn comb_structure_matches_closed_form() {
    for alpha in [1.0, 4.0, -2.0] {
        let bs = band_structure(&PrimitiveProfile::sawtooth_comb(alpha), &SearchConfig::with_gaps(3)).unwrap();
        for (e, x) in bs.lambdas().iter().zip(kp_endpoints(alpha, 3)) {
            assert!((e - x).abs() < 1e-8 * x.abs().max(1.0), "α = {alpha}: {e} vs {x}");
        }
        assert!(bs.endpoints.iter().all(|e| !e.collapsed));
        assert!(classify_and_validate(&bs).all_passed());
    }
}

#[test]
fn comb_with_alpha_four_has_semiperiodic_first_gap() {
    let bs = band_structure(&PrimitiveProfile::sawtooth_comb(4.0), &SearchConfig::with_gaps(2)).unwrap();
    for ep in &bs.endpoints[1..3] {
        assert_eq!(ep.parity, Parity::Semiperiodic);
        let d: f64 = discriminant(&PrimitiveProfile::sawtooth_comb(4.0), ep.lambda, &Default::default()).unwrap();
        assert!((d + 2.0).abs() < 1e-9);
    }
    // the left edge of every comb gap is a free eigenvalue
    assert!((bs.endpoints[1].lambda - PI * PI).abs() < 1e-8);
    assert!((bs.endpoints[3].lambda - 4.0 * PI * PI).abs() < 1e-8);
}

#[test]
fn tangency_verdicts() {
    let cfg = SearchConfig::default();
    let free = FourierPotential::<f64>::zero().primitive();
    assert_eq!(detect_tangency(&free, PI * PI, Target::Minus, &cfg).unwrap().verdict, Verdict::Tangent);
    assert_eq!(detect_tangency(&free, 4.0 * PI * PI + 0.1, Target::Plus, &cfg).unwrap().verdict, Verdict::Tangent);
    let cosine = cosine_potential().primitive();
    let report = detect_tangency(&cosine, PI * PI, Target::Minus, &cfg).unwrap();
    assert_eq!(report.verdict, Verdict::Crossing);
    assert!(report.extremum < -2.0 - 1e-3);
}

#[test]
fn narrow_open_gap_is_not_collapsed() {
    // third gap of 2cos(2πx) is about 3.2e-4 wide; Δ leaves [−2, 2] by only ~1e-10 there
    let bs = band_structure(&cosine_potential().primitive(), &SearchConfig::with_gaps(3)).unwrap();
    let (lo, hi) = bs.gap_edges(3).unwrap();
    assert!(!bs.endpoints[5].collapsed);
    assert!((hi - lo - 3.2e-4).abs() < 1e-5, "width {}", hi - lo);
}

#[test]
fn eigenvalue_lists_for_cosine() {
    let cfg = SearchConfig::with_gaps(2);
    let q = cosine_potential().primitive();
    let bs = band_structure(&q, &cfg).unwrap();
    let periodic = periodic_eigenvalues(&q, 3, &cfg).unwrap();
    let semi = semiperiodic_eigenvalues(&q, 2, &cfg).unwrap();
    assert_eq!(periodic, vec![bs.endpoints[0].lambda, bs.endpoints[3].lambda, bs.endpoints[4].lambda]);
    assert_eq!(semi, vec![bs.endpoints[1].lambda, bs.endpoints[2].lambda]);
}

#[test]
fn convergence_study_for_comb() {
    let comb = FourierPotential::delta_comb(1.0, 32);
    let study = convergence_study(&comb, &[2, 4, 8, 16, 32], &SearchConfig::with_gaps(3)).unwrap();
    let maxima = study.max_differences();
    assert!(maxima[1..].windows(2).all(|w| w[1] < w[0]), "{maxima:?}");
    let exact = kp_endpoints(1.0, 3);
    let last = study.rows.last().unwrap().structure.lambdas();
    let first = study.rows[1].structure.lambdas();
    for ((l, f), x) in last.iter().zip(&first).zip(&exact) {
        assert!((l - x).abs() <= (f - x).abs());
    }
}

#[test]
fn convergence_study_for_random_potential_is_cauchy() {
    let q = FourierPotential::random(7, 16, 5.0, 0.6);
    let study = convergence_study(&q, &[4, 8, 16], &SearchConfig::with_gaps(3)).unwrap();
    let maxima = study.max_differences();
    assert!(maxima[1] < maxima[0], "{maxima:?}");
}

#[test]
fn validation_passes_for_random_structures() {
    let cfg = SearchConfig::with_gaps(3);
    for seed in [2, 5, 8] {
        let q = FourierPotential::random(seed, 16, 5.0, 0.6).primitive();
        let bs = band_structure(&q, &cfg).unwrap();
        let report = validate_against_discriminant(&q, &bs, &cfg).unwrap();
        assert!(report.all_passed(), "seed {seed}: {:?}", report.failures().collect::<Vec<_>>());
    }
}

#[test]
fn json_round_trip_is_exact() {
    let bs = band_structure(&FourierPotential::random(3, 16, 5.0, 0.6).primitive(), &SearchConfig::with_gaps(3)).unwrap();
    let back = BandStructure::<f64>::from_json(&bs.to_json().unwrap()).unwrap();
    assert_eq!(back, bs);
    assert!(back.lambdas().iter().zip(bs.lambdas()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn labels_follow_position() {
    let bs = band_structure(&FourierPotential::random(6, 16, 5.0, 0.6).primitive(), &SearchConfig::with_gaps(3)).unwrap();
    assert_eq!(bs.endpoints[0].side, Side::Bottom);
    for k in 1..=3 {
        assert_eq!((bs.endpoints[2 * k - 1].k, bs.endpoints[2 * k - 1].side), (k, Side::Minus));
        assert_eq!((bs.endpoints[2 * k].k, bs.endpoints[2 * k].side), (k, Side::Plus));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shift_equivariance(seed in 0u64..500, c in -20.0f64..20.0) {
        let cfg = SearchConfig::with_gaps(2);
        let q = FourierPotential::random(seed, 8, 3.0, 0.6);
        let base = band_structure(&q.primitive(), &cfg).unwrap();
        let moved = band_structure(&q.shifted(c).primitive(), &cfg).unwrap();
        for (a, b) in base.endpoints.iter().zip(&moved.endpoints) {
            prop_assert!((b.lambda - a.lambda - c).abs() < 1e-8);
            prop_assert_eq!((a.k, a.side, a.parity, a.collapsed), (b.k, b.side, b.parity, b.collapsed));
        }
    }

    #[test]
    fn structures_interlace_and_satisfy_parity(seed in 0u64..500, amplitude in 0.5f64..6.0) {
        let cfg = SearchConfig::with_gaps(3);
        let q = FourierPotential::random(seed, 12, amplitude, 0.6).primitive();
        let bs = band_structure(&q, &cfg).unwrap();
        let report = classify_and_validate(&bs);
        prop_assert!(report.all_passed(), "{:?}", report);
        for ep in &bs.endpoints {
            let d = discriminant(&q, ep.lambda, &cfg.integrator).unwrap();
            let target = ep.parity.discriminant_value::<f64>();
            let allowed = if ep.collapsed { cfg.tangency_tol } else { 1e-8 };
            prop_assert!((d - target).abs() < allowed);
        }
    }
}
