//! Built-in invariant suite for `hillband verify`.

use std::f64::consts::PI;

use hillband::oracle::{galerkin_eigenvalues, kp_discriminant, GalerkinProblem};
use hillband::potential::HarmonicEntry;
use hillband::propagator::{discriminant, monodromy};
use hillband::spectrum::{band_structure, periodic_eigenvalues, validate_against_discriminant, Check, ValidationReport};
use hillband::{FourierPotential, Parity, PotentialFile, PrimitiveProfile, SearchConfig};

fn check(name: &str, failures: Vec<String>) -> Check {
    let passed = failures.is_empty();
    let detail = if passed { "ok".to_string() } else { failures.join("; ") };
    Check { name: name.to_string(), passed, detail }
}

fn failed(name: &str, err: impl std::fmt::Display) -> Check {
    check(name, vec![err.to_string()])
}

fn prefixed(prefix: &str, report: ValidationReport) -> impl Iterator<Item = Check> + '_ {
    report.checks.into_iter().map(move |mut c| {
        c.name = format!("{prefix}: {}", c.name);
        c
    })
}

fn cosine() -> FourierPotential<f64> {
    let file = PotentialFile::Fourier { mean: 0.0, harmonics: vec![HarmonicEntry { m: 1, re: 1.0, im: 0.0 }] };
    file.resolve().expect("valid cosine description").potential
}

fn free_levels(cfg: &SearchConfig<f64>) -> Check {
    let name = "free potential levels";
    let bs = match band_structure(&FourierPotential::zero().primitive(), cfg) {
        Ok(bs) => bs,
        Err(err) => return failed(name, err),
    };
    let tol = 10.0 * cfg.root_tol;
    let mut failures = Vec::new();
    for e in &bs.endpoints {
        let exact = (e.k as f64 * PI).powi(2);
        if (e.lambda - exact).abs() > tol * exact.max(1.0) {
            failures.push(format!("k = {} {}: {} vs {exact}", e.k, e.side.as_str(), e.lambda));
        }
        if e.k > 0 && !e.collapsed {
            failures.push(format!("gap {} not collapsed", e.k));
        }
    }
    check(name, failures)
}

fn kronig_penney(cfg: &SearchConfig<f64>) -> Check {
    let name = "delta comb discriminant";
    let alpha = 3.0;
    let profile = PrimitiveProfile::sawtooth_comb(alpha);
    let mut failures = Vec::new();
    for lambda in [-10.0, 0.5, 9.0, 25.0, 60.0, 150.0] {
        match discriminant(&profile, lambda, &cfg.integrator) {
            Ok(d) => {
                let exact = kp_discriminant(alpha, lambda);
                if (d - exact).abs() > 1e-8 * exact.abs().max(1.0) {
                    failures.push(format!("λ = {lambda}: {d} vs {exact}"));
                }
            }
            Err(err) => failures.push(format!("λ = {lambda}: {err}")),
        }
    }
    check(name, failures)
}

fn galerkin_agreement(cfg: &SearchConfig<f64>) -> Check {
    let name = "periodic eigenvalues vs Galerkin";
    let q = cosine();
    let count = 3;
    let engine = match periodic_eigenvalues(&q.primitive(), count, cfg) {
        Ok(v) => v,
        Err(err) => return failed(name, err),
    };
    let reference = GalerkinProblem::new(q, Parity::Periodic, 64)
        .and_then(|gp| galerkin_eigenvalues(&gp, count));
    let reference = match reference {
        Ok(v) => v,
        Err(err) => return failed(name, err),
    };
    let failures = engine
        .iter()
        .zip(&reference)
        .filter(|(a, b)| (*a - *b).abs() > 1e-8 * b.abs().max(1.0))
        .map(|(a, b)| format!("{a} vs {b}"))
        .collect();
    check(name, failures)
}

fn unimodularity(cfg: &SearchConfig<f64>) -> Check {
    let name = "monodromy determinant";
    let profile = FourierPotential::random(7, 16, 5.0, 0.6).primitive();
    let mut failures = Vec::new();
    for lambda in [-20.0, 0.0, 40.0, 300.0] {
        match monodromy(&profile, lambda, 0.0, &cfg.integrator) {
            Ok(m) if m.is_unimodular(1e-8) => {}
            Ok(m) => failures.push(format!("λ = {lambda}: det = {}", m.det())),
            Err(err) => failures.push(format!("λ = {lambda}: {err}")),
        }
    }
    check(name, failures)
}

fn structure_checks(label: &str, profile: &PrimitiveProfile<f64>, cfg: &SearchConfig<f64>) -> Vec<Check> {
    let result = band_structure(profile, cfg).and_then(|bs| validate_against_discriminant(profile, &bs, cfg));
    match result {
        Ok(report) => prefixed(label, report).collect(),
        Err(err) => vec![failed(&format!("{label}: band structure"), err)],
    }
}

/// Runs the fixed suite, then the structural and discriminant checks on
/// `extra` when a potential was supplied.
pub fn run_suite(extra: Option<&PrimitiveProfile<f64>>, cfg: &SearchConfig<f64>) -> ValidationReport {
    let mut checks = vec![free_levels(cfg), kronig_penney(cfg), galerkin_agreement(cfg), unimodularity(cfg)];
    checks.extend(structure_checks("cosine", &cosine().primitive(), cfg));
    checks.extend(structure_checks("delta comb", &PrimitiveProfile::sawtooth_comb(2.0), cfg));
    if let Some(profile) = extra {
        checks.extend(structure_checks("potential", profile, cfg));
    }
    ValidationReport { checks }
}
