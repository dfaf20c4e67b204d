//! Locating gap endpoints: grid scan in `s = √(λ − floor)`, Brent refinement
//! of every sign change of `Δ ∓ 2`, and tangency analysis at every grid
//! extremum of `Δ` so collapsed gaps are found even though `Δ ∓ 2` keeps
//! its sign there.
//!
//! All work happens on the centered profile (`C = 0`); results are shifted
//! by `C` on the way out.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{evaluate, from_s, to_s};
use super::{BandStructure, GapEndpoint, Parity, SearchConfig, Side, SpectrumError};
use crate::potential::PrimitiveProfile;
use crate::propagator::{discriminant, IntegratorConfig};
use crate::roots::{brent_minimize, brent_root, scaled_tolerance, BracketError};
use crate::scalar::Real;

const MAX_ITER: usize = 200;
const FLOOR_RETRIES: usize = 8;

/// Level a gap endpoint is a root of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `Δ = +2`
    Plus,
    /// `Δ = −2`
    Minus,
}

impl Target {
    pub fn value<T: Real>(&self) -> T {
        match self {
            Target::Plus => T::two(),
            Target::Minus => -T::two(),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            Target::Plus => Parity::Periodic,
            Target::Minus => Parity::Semiperiodic,
        }
    }

    pub fn from_parity(parity: Parity) -> Self {
        match parity {
            Parity::Periodic => Target::Plus,
            Parity::Semiperiodic => Target::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Crossing,
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport<T> {
    pub verdict: Verdict,
    /// Refined location of the extremum of `Δ`.
    pub lambda: T,
    /// `Δ` evaluated at `lambda`.
    pub extremum: T,
    /// Vertex value of the 5-point quadratic fit.
    pub fitted_value: T,
    /// Fitted `Δ''`.
    pub curvature: T,
    pub low_confidence: bool,
}

fn bracket_error<T: Real>(err: BracketError<crate::propagator::PropagationError>, target: Target, lo: T, hi: T) -> SpectrumError {
    match err {
        BracketError::NoSignChange { .. } => SpectrumError::NoSignChange {
            target: target.value::<f64>(),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        },
        BracketError::IterationLimit => SpectrumError::IterationLimit,
        BracketError::Objective(e) => SpectrumError::Propagation(e),
    }
}

/// Brent refinement of a root of `Δ − target` inside `(lo, hi)`, centered coordinates.
/// The tolerance is scaled by the physical magnitude `|λ + shift|`.
fn refine_centered<T: Real>(
    profile: &PrimitiveProfile<T>,
    target: Target,
    lo: (T, T),
    hi: (T, T),
    shift: T,
    cfg: &SearchConfig<T>,
) -> Result<T, SpectrumError> {
    let t = target.value::<T>();
    let scale = (lo.0 + shift).abs().min((hi.0 + shift).abs());
    let xtol = scaled_tolerance(cfg.root_tol, scale);
    let f = |lambda: T| discriminant(profile, lambda, &cfg.integrator).map(|d| d - t);
    brent_root(f, lo.0, hi.0, lo.1 - t, hi.1 - t, xtol, MAX_ITER)
        .map(|r| r.x)
        .map_err(|e| bracket_error(e, target, lo.0 + shift, hi.0 + shift))
}

/// λ in `(lo, hi)` with `Δ(λ) = target`, refined to `root_tol`.
///
/// A bracket without a sign change is accepted when `Δ` touches the target
/// inside it; the touching point is returned.
pub fn refine_endpoint<T: Real>(
    profile: &PrimitiveProfile<T>,
    target: Target,
    bracket: (T, T),
    cfg: &SearchConfig<T>,
) -> Result<T, SpectrumError> {
    cfg.validate()?;
    let shift = profile.mean_shift();
    let centered = profile.shifted(-shift);
    let (lo, hi) = (bracket.0.min(bracket.1) - shift, bracket.0.max(bracket.1) - shift);
    let d_lo = discriminant(&centered, lo, &cfg.integrator)?;
    let d_hi = discriminant(&centered, hi, &cfg.integrator)?;
    let t = target.value::<T>();
    if (d_lo - t > T::zero()) == (d_hi - t > T::zero()) {
        // no crossing: accept the bracket only if Δ touches the target inside it
        let mid = T::half() * (lo + hi);
        let d_mid = discriminant(&centered, mid, &cfg.integrator)?;
        let report = analyse_extremum(&centered, lo, hi, mid, d_mid, target, cfg)?;
        if report.verdict == Verdict::Tangent {
            return Ok(report.lambda + shift);
        }
    }
    refine_centered(&centered, target, (lo, d_lo), (hi, d_hi), shift, cfg).map(|x| x + shift)
}

/// Least-squares quadratic through `Δ(λ + j·h)`, `j = −2..2`; returns
/// `(vertex offset in units of h, vertex value, second coefficient)`.
fn five_point_fit<T: Real>(y: [T; 5]) -> (T, T, T) {
    let c0 = (T::lit(-3.0) * y[0] + T::lit(12.0) * y[1] + T::lit(17.0) * y[2] + T::lit(12.0) * y[3]
        - T::lit(3.0) * y[4])
        / T::lit(35.0);
    let c1 = (T::lit(-2.0) * y[0] - y[1] + y[3] + T::lit(2.0) * y[4]) / T::lit(10.0);
    let c2 = (T::lit(2.0) * y[0] - y[1] - T::lit(2.0) * y[2] - y[3] + T::lit(2.0) * y[4]) / T::lit(14.0);
    if c2 == T::zero() {
        return (T::infinity(), c0, c2);
    }
    let vertex = -c1 / (T::two() * c2);
    (vertex, c0 - c1 * c1 / (T::lit(4.0) * c2), c2)
}

/// Sharpens the location of an extremum of `Δ` as a root of the
/// fourth-order central difference of `Δ`. Value-based minimization alone
/// only resolves the location to about `√ε` relative.
fn polish_extremum<T: Real>(
    profile: &PrimitiveProfile<T>,
    lo: T,
    hi: T,
    lambda: T,
    extremum: T,
    cfg: &SearchConfig<T>,
) -> Result<(T, T), SpectrumError> {
    let delta = |x: T| discriminant(profile, x, &cfg.integrator);
    let h = T::lit(1e-3) * T::one().max(lambda.abs().sqrt());
    let slope = |x: T| -> Result<T, crate::propagator::PropagationError> {
        let (m2, m1, p1, p2) = (delta(x - h - h)?, delta(x - h)?, delta(x + h)?, delta(x + h + h)?);
        Ok((m2 - T::lit(8.0) * m1 + T::lit(8.0) * p1 - p2) / (T::lit(12.0) * h))
    };
    let mut width = h;
    while width < hi - lo {
        let (a, b) = ((lambda - width).max(lo), (lambda + width).min(hi));
        let (ga, gb) = (slope(a)?, slope(b)?);
        if (ga > T::zero()) != (gb > T::zero()) {
            let xtol = scaled_tolerance(cfg.root_tol * T::lit(1e-2), lambda);
            return match brent_root(slope, a, b, ga, gb, xtol, MAX_ITER) {
                Ok(root) => Ok((root.x, delta(root.x)?)),
                Err(BracketError::Objective(e)) => Err(e.into()),
                Err(_) => Ok((lambda, extremum)),
            };
        }
        width *= T::lit(4.0);
    }
    Ok((lambda, extremum))
}

/// Whether `Δ(λ)` passes beyond `t` by more than its evaluation error, which
/// is estimated by re-evaluating at tolerances a hundred times tighter.
/// A narrow open gap can overshoot by far less than `tangency_tol`.
fn crossing_resolved<T: Real>(profile: &PrimitiveProfile<T>, lambda: T, value: T, t: T, sign: T, cfg: &SearchConfig<T>) -> bool {
    let hundredth = T::lit(1e-2);
    let tight = IntegratorConfig {
        rel_tol: cfg.integrator.rel_tol * hundredth,
        abs_tol: cfg.integrator.abs_tol * hundredth,
        ..cfg.integrator
    };
    let Ok(refined) = discriminant(profile, lambda, &tight) else {
        return false;
    };
    let noise = T::lit(10.0) * (refined - value).abs() + T::lit(512.0) * T::epsilon();
    (refined - t) * -sign > noise
}

/// Tangency analysis in centered coordinates around a grid extremum at
/// `(x0, f0)` with neighbours `lo`, `hi`.
fn analyse_extremum<T: Real>(
    profile: &PrimitiveProfile<T>,
    lo: T,
    hi: T,
    x0: T,
    f0: T,
    target: Target,
    cfg: &SearchConfig<T>,
) -> Result<TangencyReport<T>, SpectrumError> {
    let is_max = target == Target::Plus;
    let sign = if is_max { -T::one() } else { T::one() };
    let t = target.value::<T>();
    let objective = |lambda: T| discriminant(profile, lambda, &cfg.integrator).map(|d| sign * d);
    let xtol = T::lit(1e-9) * T::one().max(x0.abs());
    let found = brent_minimize(objective, lo, hi, x0, sign * f0, xtol, MAX_ITER)?;
    let (lambda, extremum) = (found.x, sign * found.value);

    let overshoot = (extremum - t) * -sign;
    if overshoot.abs() > T::lit(1e3) * cfg.tangency_tol {
        return Ok(TangencyReport {
            verdict: Verdict::Crossing,
            lambda,
            extremum,
            fitted_value: extremum,
            curvature: T::nan(),
            low_confidence: false,
        });
    }

    let (lambda, extremum) = polish_extremum(profile, lo, hi, lambda, extremum, cfg)?;
    let h = (hi - lo) * T::lit(0.01);
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|j| lambda + T::lit(j) * h);
    let mut y = [T::zero(); 5];
    for (slot, &x) in y.iter_mut().zip(&offsets) {
        *slot = if x == lambda { extremum } else { discriminant(profile, x, &cfg.integrator)? };
    }
    let (vertex, fitted_value, c2) = five_point_fit(y);
    let curvature = T::two() * c2 / (h * h);
    let curvature_consistent = if is_max { c2 < T::zero() } else { c2 > T::zero() };
    let vertex_inside = vertex.abs() <= T::two();
    let within = (fitted_value - t).abs() <= cfg.tangency_tol;
    let touches = within && curvature_consistent && vertex_inside;
    let overshoot = (extremum - t) * -sign;
    let verdict = if touches && !(overshoot > T::zero() && crossing_resolved(profile, lambda, extremum, t, sign, cfg)) {
        Verdict::Tangent
    } else {
        Verdict::Crossing
    };
    let margin = ((fitted_value - t).abs() - cfg.tangency_tol).abs();
    let low_confidence = !curvature_consistent || !vertex_inside || margin < T::lit(0.1) * cfg.tangency_tol;
    Ok(TangencyReport { verdict, lambda, extremum, fitted_value, curvature, low_confidence })
}

/// Decides whether `Δ` touches `target` near `lambda_star` without crossing.
///
/// The extremum is refined within one grid cell on either side of
/// `lambda_star`, then classified by a 5-point quadratic fit. Ambiguous
/// cases fall back to crossing with `low_confidence` set.
pub fn detect_tangency<T: Real>(
    profile: &PrimitiveProfile<T>,
    lambda_star: T,
    target: Target,
    cfg: &SearchConfig<T>,
) -> Result<TangencyReport<T>, SpectrumError> {
    cfg.validate()?;
    let shift = profile.mean_shift();
    let centered = profile.shifted(-shift);
    let floor = centered_floor(&centered, cfg, shift);
    let x0 = lambda_star - shift;
    let s = to_s(floor, x0);
    let lo = from_s(floor, s - cfg.s_step);
    let hi = from_s(floor, s + cfg.s_step);
    let f0 = discriminant(&centered, x0, &cfg.integrator)?;
    let mut report = analyse_extremum(&centered, lo, hi, x0, f0, target, cfg)?;
    report.lambda += shift;
    Ok(report)
}

fn centered_floor<T: Real>(centered: &PrimitiveProfile<T>, cfg: &SearchConfig<T>, shift: T) -> T {
    cfg.lambda_floor.map_or_else(|| centered.centered_floor(), |f| f - shift)
}

/// A located root of `Δ ∓ 2` in centered coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RootRecord<T> {
    lambda: T,
    target: Target,
    tangent: bool,
}

#[derive(Debug, Clone, Copy)]
struct Knot<T> {
    lambda: T,
    delta: T,
    tangent: Option<Target>,
}

/// Incremental grid scan of the centered discriminant.
struct Scan<'a, T> {
    profile: &'a PrimitiveProfile<T>,
    cfg: &'a SearchConfig<T>,
    shift: T,
    floor: T,
    next_index: usize,
    samples: Vec<(T, T)>,
}

impl<'a, T: Real> Scan<'a, T> {
    fn new(profile: &'a PrimitiveProfile<T>, cfg: &'a SearchConfig<T>, shift: T) -> Result<Self, SpectrumError> {
        let mut floor = centered_floor(profile, cfg, shift);
        let mut ok = false;
        for attempt in 0..FLOOR_RETRIES {
            match discriminant(profile, floor, &cfg.integrator) {
                Ok(d) if d > T::two() => {
                    ok = true;
                    break;
                }
                outcome => {
                    log::warn!(
                        "scan floor λ = {} is not below the spectrum (Δ = {:?}); lowering it (attempt {})",
                        floor + shift,
                        outcome,
                        attempt + 1
                    );
                    floor = T::two() * floor - T::one();
                }
            }
        }
        if !ok {
            return Err(SpectrumError::BracketingIncomplete {
                found: 0,
                needed: 1,
                lambda_max: (floor + shift).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { profile, cfg, shift, floor, next_index: 0, samples: Vec::new() })
    }

    fn lambda_at(&self, index: usize) -> T {
        from_s(self.floor, self.cfg.s_step * T::from_count(index))
    }

    /// Extends the grid so it covers `lambda_hi`.
    fn cover(&mut self, lambda_hi: T) {
        let s_hi = to_s(self.floor, lambda_hi);
        let last = (s_hi / self.cfg.s_step).ceil().to_usize().unwrap_or(0) + 1;
        if last <= self.next_index {
            return;
        }
        let lambdas: Vec<T> = (self.next_index..=last).map(|i| self.lambda_at(i)).collect();
        let deltas = evaluate(self.profile, &lambdas, &self.cfg.integrator);
        for (lambda, delta) in lambdas.into_iter().zip(deltas) {
            match delta {
                Some(d) => self.samples.push((lambda, d)),
                None => log::warn!("skipping grid point λ = {} after integration failure", lambda + self.shift),
            }
        }
        self.next_index = last + 1;
    }

    fn lambda_max(&self) -> T {
        self.samples.last().map_or(self.floor, |s| s.0)
    }

    /// Every root of `Δ ∓ 2` visible on the current grid, ascending,
    /// tangent roots listed twice.
    fn roots(&self) -> Result<Vec<RootRecord<T>>, SpectrumError> {
        let samples = &self.samples;
        let critical: Vec<(usize, Target)> = (1..samples.len().saturating_sub(1))
            .filter_map(|i| {
                let left = samples[i].1 - samples[i - 1].1;
                let right = samples[i + 1].1 - samples[i].1;
                if left * right < T::zero() {
                    Some((i, if left > T::zero() { Target::Plus } else { Target::Minus }))
                } else {
                    None
                }
            })
            .collect();

        let reports: Vec<(Target, TangencyReport<T>)> = critical
            .par_iter()
            .map(|&(i, target)| {
                analyse_extremum(
                    self.profile,
                    samples[i - 1].0,
                    samples[i + 1].0,
                    samples[i].0,
                    samples[i].1,
                    target,
                    self.cfg,
                )
                .map(|r| (target, r))
            })
            .collect::<Result<_, _>>()?;

        let mut knots: Vec<Knot<T>> = samples.iter().map(|&(lambda, delta)| Knot { lambda, delta, tangent: None }).collect();
        let mut records = Vec::new();
        for (target, report) in &reports {
            if report.low_confidence && report.verdict == Verdict::Crossing {
                log::debug!("low-confidence tangency verdict near λ = {}", report.lambda + self.shift);
            }
            let tangent = (report.verdict == Verdict::Tangent).then_some(*target);
            if tangent.is_some() {
                let record = RootRecord { lambda: report.lambda, target: *target, tangent: true };
                records.push(record);
                records.push(record);
            }
            let knot = Knot { lambda: report.lambda, delta: report.extremum, tangent };
            match knots.binary_search_by(|k| k.lambda.partial_cmp(&report.lambda).unwrap_or(Ordering::Less)) {
                Ok(pos) => knots[pos] = knot,
                Err(pos) => knots.insert(pos, knot),
            }
        }

        let mut brackets = Vec::new();
        for pair in knots.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for target in [Target::Plus, Target::Minus] {
                if a.tangent == Some(target) || b.tangent == Some(target) {
                    continue;
                }
                let t = target.value::<T>();
                if (a.delta - t > T::zero()) != (b.delta - t > T::zero()) {
                    brackets.push((target, a, b));
                }
            }
        }
        let crossings: Vec<RootRecord<T>> = brackets
            .par_iter()
            .map(|&(target, a, b)| {
                refine_centered(self.profile, target, (a.lambda, a.delta), (b.lambda, b.delta), self.shift, self.cfg)
                    .map(|lambda| RootRecord { lambda, target, tangent: false })
            })
            .collect::<Result<_, _>>()?;
        records.extend(crossings);
        records.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap_or(Ordering::Equal));
        Ok(records)
    }
}

/// First scan ceiling in centered λ able to hold the endpoints of gap `k_max`.
fn initial_ceiling<T: Real>(k_max: usize, floor: T) -> T {
    let reach = (T::from_count(k_max) + T::lit(0.75)) * T::PI();
    reach * reach + floor.abs()
}

/// Scans until `enough` accepts the root list, enlarging the range up to
/// `cfg.max_extensions` times.
fn collect_roots<T, F>(
    centered: &PrimitiveProfile<T>,
    cfg: &SearchConfig<T>,
    shift: T,
    k_max: usize,
    needed: usize,
    enough: F,
) -> Result<Vec<RootRecord<T>>, SpectrumError>
where
    T: Real,
    F: Fn(&[RootRecord<T>]) -> bool,
{
    let mut scan = Scan::new(centered, cfg, shift)?;
    let mut ceiling = initial_ceiling(k_max, scan.floor);
    let mut found = 0;
    for attempt in 0..=cfg.max_extensions {
        scan.cover(ceiling);
        let roots = scan.roots()?;
        if enough(&roots) {
            return Ok(roots);
        }
        found = roots.len();
        if attempt < cfg.max_extensions {
            // grow s = √(λ − floor) by half
            let s = to_s(scan.floor, ceiling) * T::lit(1.5);
            ceiling = from_s(scan.floor, s);
            log::info!("extending scan to λ = {}", ceiling + shift);
        }
    }
    Err(SpectrumError::BracketingIncomplete {
        found,
        needed,
        lambda_max: (scan.lambda_max() + shift).to_f64().unwrap_or(f64::NAN),
    })
}

/// `λ₀` and the endpoints of the first `cfg.num_gaps` gaps.
pub fn band_structure<T: Real>(profile: &PrimitiveProfile<T>, cfg: &SearchConfig<T>) -> Result<BandStructure<T>, SpectrumError> {
    cfg.validate()?;
    let shift = profile.mean_shift();
    let centered = profile.shifted(-shift);
    let needed = 1 + 2 * cfg.num_gaps;
    let roots = collect_roots(&centered, cfg, shift, cfg.num_gaps, needed, |r| r.len() >= needed)?;

    let mut endpoints: Vec<GapEndpoint<T>> = roots
        .iter()
        .take(needed)
        .enumerate()
        .map(|(position, record)| {
            let k = position.div_ceil(2);
            let side = match position {
                0 => Side::Bottom,
                p if p % 2 == 1 => Side::Minus,
                _ => Side::Plus,
            };
            GapEndpoint {
                lambda: record.lambda + shift,
                k,
                side,
                parity: record.target.parity(),
                collapsed: record.tangent,
            }
        })
        .collect();
    for k in 1..=cfg.num_gaps {
        let (lo, hi) = (endpoints[2 * k - 1].lambda, endpoints[2 * k].lambda);
        if (hi - lo).abs() <= scaled_tolerance(cfg.root_tol, lo) {
            endpoints[2 * k - 1].collapsed = true;
            endpoints[2 * k].collapsed = true;
        }
    }
    Ok(BandStructure { endpoints, mean_shift_applied: shift, root_tol: cfg.root_tol })
}

fn eigenvalues<T: Real>(
    profile: &PrimitiveProfile<T>,
    target: Target,
    count: usize,
    cfg: &SearchConfig<T>,
) -> Result<Vec<T>, SpectrumError> {
    cfg.validate()?;
    if count == 0 {
        return Err(SpectrumError::InvalidConfig("count must be at least 1".into()));
    }
    let shift = profile.mean_shift();
    let centered = profile.shifted(-shift);
    // highest gap index whose endpoints can hold the count-th root of this target
    let k_max = match target {
        Target::Plus => 2 * (count / 2),
        Target::Minus => 2 * count.div_ceil(2) - 1,
    };
    let matching = |roots: &[RootRecord<T>]| roots.iter().filter(|r| r.target == target).count();
    let roots = collect_roots(&centered, cfg, shift, k_max, count, |r| matching(r) >= count)?;
    Ok(roots.iter().filter(|r| r.target == target).take(count).map(|r| r.lambda + shift).collect())
}

/// Lowest `count` eigenvalues of the problem with `u, u^[1]` periodic on
/// `[0, 1]`, i.e. roots of `Δ = 2`, doubled at collapsed gaps.
pub fn periodic_eigenvalues<T: Real>(profile: &PrimitiveProfile<T>, count: usize, cfg: &SearchConfig<T>) -> Result<Vec<T>, SpectrumError> {
    eigenvalues(profile, Target::Plus, count, cfg)
}

/// Lowest `count` roots of `Δ = −2` (antiperiodic `u, u^[1]`).
pub fn semiperiodic_eigenvalues<T: Real>(
    profile: &PrimitiveProfile<T>,
    count: usize,
    cfg: &SearchConfig<T>,
) -> Result<Vec<T>, SpectrumError> {
    eigenvalues(profile, Target::Minus, count, cfg)
}
