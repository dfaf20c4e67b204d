//! Structural and discriminant-based checks on a computed band structure.

use serde::{Deserialize, Serialize};

use super::{BandStructure, Parity, SearchConfig, Side, SpectrumError};
use crate::potential::PrimitiveProfile;
use crate::propagator::discriminant;
use crate::roots::scaled_tolerance;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = if passed { "ok".to_string() } else { failures.join("; ") };
        Self { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

/// Checks the parity rule, the interlacing inequalities, side labels and
/// collapse flags. Needs no evaluation of `Δ`.
pub fn classify_and_validate<T: Real>(bs: &BandStructure<T>) -> ValidationReport {
    let tol = |x: T| scaled_tolerance(bs.root_tol, x);
    let e = &bs.endpoints;

    let mut labels = Vec::new();
    if e.is_empty() || e.len() % 2 == 0 {
        labels.push(format!("{} endpoints, expected 1 + 2g", e.len()));
    }
    for (i, ep) in e.iter().enumerate() {
        let (k, side) = match i {
            0 => (0, Side::Bottom),
            i => (i.div_ceil(2), if i % 2 == 1 { Side::Minus } else { Side::Plus }),
        };
        if ep.k != k || ep.side != side {
            labels.push(format!("endpoint {i} labelled ({}, {}), expected ({k}, {})", ep.k, ep.side.as_str(), side.as_str()));
        }
    }

    let parity = e
        .iter()
        .filter(|ep| ep.parity != Parity::expected_for_gap(ep.k))
        .map(|ep| format!("k = {} {} at λ = {} is {}", ep.k, ep.side.as_str(), ep.lambda, ep.parity.as_str()))
        .collect();

    let mut interlacing = Vec::new();
    for (i, pair) in e.windows(2).enumerate() {
        let (a, b) = (pair[0].lambda, pair[1].lambda);
        // odd i: the pair is (λ_k⁻, λ_k⁺) inside one gap; even i: a band
        if i % 2 == 1 {
            if b < a - tol(a) {
                interlacing.push(format!("gap {}: λ⁻ = {a} > λ⁺ = {b}", pair[0].k));
            }
        } else if !(b - a > tol(a)) {
            interlacing.push(format!("band {}: [{a}, {b}] is not a proper interval", i / 2));
        }
    }

    let mut collapse = Vec::new();
    for k in 1..=bs.num_gaps() {
        let (lo, hi) = (&e[2 * k - 1], &e[2 * k]);
        let closed = (hi.lambda - lo.lambda).abs() <= tol(lo.lambda);
        if lo.collapsed != hi.collapsed {
            collapse.push(format!("gap {k}: collapse flags disagree"));
        } else if closed && !lo.collapsed {
            collapse.push(format!("gap {k}: zero width but not flagged collapsed"));
        } else if lo.collapsed && !closed {
            collapse.push(format!("gap {k}: flagged collapsed, width {}", hi.lambda - lo.lambda));
        }
    }
    if e.first().is_some_and(|b| b.collapsed) {
        collapse.push("λ₀ flagged collapsed".into());
    }

    ValidationReport {
        checks: vec![
            Check::new("endpoint labels", labels),
            Check::new("parity rule", parity),
            Check::new("interlacing", interlacing),
            Check::new("collapse flags", collapse),
        ],
    }
}

/// Re-evaluates `Δ` against a structure computed for `profile`.
///
/// Includes the structural checks of [`classify_and_validate`], plus:
/// endpoint residuals, `|Δ| ≤ 2` at band midpoints, `|Δ| > 2` at open-gap
/// midpoints, and for collapsed gaps that `|Δ| ≤ 2` on both sides of the
/// doubled point, so it is interior to the spectrum rather than isolated.
pub fn validate_against_discriminant<T: Real>(
    profile: &PrimitiveProfile<T>,
    bs: &BandStructure<T>,
    cfg: &SearchConfig<T>,
) -> Result<ValidationReport, SpectrumError> {
    let mut report = classify_and_validate(bs);
    let delta = |lambda: T| discriminant(profile, lambda, &cfg.integrator);
    let two = T::two();

    let mut residuals = Vec::new();
    for ep in &bs.endpoints {
        let target = ep.parity.discriminant_value::<T>();
        let r = (delta(ep.lambda)? - target).abs();
        let allowed = if ep.collapsed { cfg.tangency_tol } else { T::lit(10.0) * bs.root_tol };
        if r > allowed {
            residuals.push(format!("k = {} {}: |Δ − ({target})| = {r:e}", ep.k, ep.side.as_str()));
        }
    }

    let mut bands = Vec::new();
    for (j, band) in bs.bands().iter().enumerate() {
        let mid = T::half() * (band.lo + band.hi);
        let d = delta(mid)?;
        if d.abs() > two + T::lit(1e-6) {
            bands.push(format!("band {j}: |Δ({mid})| = {}", d.abs()));
        }
    }

    let mut gaps = Vec::new();
    let mut isolated = Vec::new();
    for k in 1..=bs.num_gaps() {
        let (lo, hi) = (&bs.endpoints[2 * k - 1], &bs.endpoints[2 * k]);
        if lo.collapsed {
            let centre = T::half() * (lo.lambda + hi.lambda);
            let near = T::lit(10.0) * scaled_tolerance(bs.root_tol, centre);
            for offset in [-near, near] {
                let d = delta(centre + offset)?;
                if d.abs() > two + cfg.tangency_tol {
                    isolated.push(format!("gap {k}: |Δ| = {} at offset {offset:e}", d.abs()));
                }
            }
            // far enough out that rounding in Δ cannot mask leaving the band
            let far = T::lit(1e-3) * T::one().max(centre.abs().sqrt());
            for offset in [-far, far] {
                let d = delta(centre + offset)?;
                if !(d.abs() < two) {
                    isolated.push(format!("gap {k}: |Δ| = {} at offset {offset:e}", d.abs()));
                }
            }
        } else {
            let mid = T::half() * (lo.lambda + hi.lambda);
            let d = delta(mid)?;
            // narrow open gaps overshoot ±2 by far less than tangency_tol
            if !(d.abs() > two) {
                gaps.push(format!("gap {k}: |Δ({mid})| = {}", d.abs()));
            }
        }
    }

    report.checks.push(Check::new("endpoint residuals", residuals));
    report.checks.push(Check::new("band midpoints", bands));
    report.checks.push(Check::new("open gap midpoints", gaps));
    report.checks.push(Check::new("no isolated points", isolated));
    Ok(report)
}
