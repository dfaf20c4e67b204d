use hillband::potential::{hminus1_norm, truncate};
use hillband::{FourierPotential, PotentialFile};
use proptest::prelude::*;

fn arb_potential() -> impl Strategy<Value = FourierPotential<f64>> {
    (0u64..10_000, 1u32..20, 0.1f64..8.0, 0.0f64..2.0, -5.0f64..5.0)
        .prop_map(|(seed, k, amp, decay, mean)| FourierPotential::random(seed, k, amp, decay).shifted(mean))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tables_stay_hermitian(q in arb_potential(), n in 0u32..25) {
        prop_assert!(q.is_hermitian());
        prop_assert!(q.truncate(n).is_hermitian());
        let x = 0.37;
        // the full complex sum must come out real
        let direct: num_complex::Complex<f64> = q
            .harmonics()
            .map(|(m, c)| c * num_complex::Complex::from_polar(1.0, std::f64::consts::TAU * m as f64 * x))
            .sum::<num_complex::Complex<f64>>()
            + q.mean();
        prop_assert!(direct.im.abs() < 1e-12);
        prop_assert!((direct.re - q.value(x)).abs() < 1e-10);
    }

    #[test]
    fn primitive_has_zero_mean(q in arb_potential()) {
        let profile = q.primitive();
        let n = 2048;
        let mean: f64 = (0..n).map(|i| profile.value(i as f64 / n as f64)).sum::<f64>() / n as f64;
        prop_assert!(mean.abs() < 1e-10);
        prop_assert_eq!(profile.mean_shift(), q.mean());
    }

    #[test]
    fn primitive_derivative_is_oscillatory_part(q in arb_potential(), x in 0.0f64..1.0) {
        let profile = q.primitive();
        let h = 1e-4;
        let derivative = (profile.value(x + h) - profile.value(x - h)) / (2.0 * h);
        let scale = q.harmonics().map(|(m, c)| c.norm() * (m as f64).powi(2)).sum::<f64>().max(1.0);
        prop_assert!((derivative - (q.value(x) - q.mean())).abs() < 1e-6 * scale);
    }

    #[test]
    fn truncation_shrinks_distance(q in arb_potential(), a in 0u32..10, b in 0u32..10) {
        let (lo, hi) = (a.min(b), a.max(b));
        let far = hminus1_norm(&(&q - &truncate(&q, lo)));
        let near = hminus1_norm(&(&q - &truncate(&q, hi)));
        prop_assert!(near <= far + 1e-15);
        prop_assert!(q.truncate(hi).hminus1_norm() <= q.hminus1_norm() + 1e-15);
    }

    #[test]
    fn seeded_generation_is_reproducible(seed in any::<u64>()) {
        prop_assert_eq!(FourierPotential::<f64>::random(seed, 8, 2.0, 0.6), FourierPotential::random(seed, 8, 2.0, 0.6));
    }
}

#[test]
fn file_formats_resolve() {
    let fourier = r#"{"type": "fourier", "mean": 1.5, "harmonics": [{"m": 1, "re": 1.0}, {"m": 3, "re": 0.2, "im": -0.1}]}"#;
    let source = PotentialFile::from_json(fourier).unwrap().resolve::<f64>().unwrap();
    assert_eq!(source.potential.coefficient(-3), num_complex::Complex::new(0.2, 0.1));
    assert_eq!(source.profile.mean_shift(), 1.5);

    let comb = r#"{"type": "delta_comb", "alpha": 2.0}"#;
    let source = PotentialFile::from_json(comb).unwrap().resolve::<f64>().unwrap();
    assert_eq!(source.potential.max_harmonic(), 32);
    assert_eq!(source.profile.mean_shift(), 2.0);

    let random = r#"{"type": "random", "seed": 7, "K": 16, "amplitude": 5.0}"#;
    let source = PotentialFile::from_json(random).unwrap().resolve::<f64>().unwrap();
    assert_eq!(source.potential, FourierPotential::random(7, 16, 5.0, 0.6));

    for bad in [
        r#"{"type": "fourier", "harmonics": [{"m": 0, "re": 1.0}]}"#,
        r#"{"type": "random", "seed": 1, "K": 0, "amplitude": 1.0}"#,
        r#"{"type": "wavelet"}"#,
        r#"{"type": "delta_comb", "alpha": 1.0, "extra": 3}"#,
        "not json",
    ] {
        let result = PotentialFile::from_json(bad).and_then(|s| s.resolve::<f64>());
        assert!(result.is_err(), "{bad}");
    }
}
