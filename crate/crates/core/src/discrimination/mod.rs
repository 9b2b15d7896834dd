//! Success probabilities, enhancement metrics, the early-advantage
//! conditions and the Chernoff quantity.
//!
//! Two unitary references are tracked. `p_unitary` evolves the scenario's own
//! probe without noise. `p_unitary_ceiling` is the best success any pure probe
//! can reach without noise by time `t`: for `W = U0†U1` the smallest overlap
//! `min_ψ |⟨ψ|W|ψ⟩|` equals `|tr W|/2`, so the pointwise bound is
//! `½(1 + √(1 − q0·q1·|tr W|²))`, and the ceiling is its running maximum.

mod chernoff;
mod conditions;
mod probe;

pub use chernoff::{chernoff, golden_section_min, ChernoffResult, CHERNOFF_ZERO};
pub use conditions::{check_conditions, dissipator_on, ConditionReport, CONDITION_SLACK};
pub use probe::{difference_basis, probe_ket, probe_state, DifferenceBasis, ProbeSpec};

use crate::error::Result;
use crate::linalg::{trace_norm_hermitian, unitary_2x2, ComplexMatrix, DensityMatrix};
use crate::propagator::{evolve_grid, evolve_unitary};
use crate::scenario::{uniform_grid, validate_priors, Scenario};

/// Margin by which the noisy curve must beat the unitary ceiling.
pub const EXCEEDS_TOL: f64 = 1e-9;
const UNITARY_MAX_TOL: f64 = 1e-6;
const UNITARY_MAX_POINT_CAP: usize = 1 << 22;

/// `‖q0ρ0 − q1ρ1‖_tr`, clamped to `[0, 1]` against rounding.
pub fn weighted_trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix, q0: f64, q1: f64) -> Result<f64> {
    validate_priors(q0, q1)?;
    let d = *rho0.matrix() * q0 - *rho1.matrix() * q1;
    Ok(trace_norm_hermitian(&d)?.min(1.0))
}

/// Helstrom success probability `(1 + ‖q0ρ0 − q1ρ1‖_tr)/2`.
pub fn success_probability(rho0: &DensityMatrix, rho1: &DensityMatrix, q0: f64, q1: f64) -> Result<f64> {
    Ok(0.5 * (1.0 + weighted_trace_distance(rho0, rho1, q0, q1)?))
}

/// Best noiseless success over all pure probes at time `t`.
pub fn unitary_ceiling_at(h0: &ComplexMatrix, h1: &ComplexMatrix, t: f64, q0: f64, q1: f64) -> Result<f64> {
    validate_priors(q0, q1)?;
    let w = unitary_2x2(h0, t)?.adjoint() * unitary_2x2(h1, t)?;
    let overlap_sq = (w.trace().norm_sqr() / 4.0).min(1.0);
    Ok(0.5 * (1.0 + (1.0 - 4.0 * q0 * q1 * overlap_sq).max(0.0).sqrt()))
}

/// Success-probability curves on the scenario's time grid. The trace
/// distances are the weighted ones, so `p = (1 + D)/2` holds entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub p_noisy: Vec<f64>,
    pub p_unitary: Vec<f64>,
    /// Running maximum of the probe-optimised noiseless bound.
    pub p_unitary_ceiling: Vec<f64>,
    pub trace_distance_noisy: Vec<f64>,
    pub trace_distance_unitary: Vec<f64>,
    pub fingerprint: String,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Index and value of the first maximum.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) },
    )
}

pub fn success_curve(scenario: &Scenario) -> Result<TimeSeries> {
    let (hyp0, hyp1) = scenario.hypotheses()?;
    let (h0, h1) = (hyp0.hamiltonian, hyp1.hamiltonian);
    let (q0, q1) = (scenario.q0, scenario.q1);
    let probe = probe_state(&scenario.probe, &h0, &h1)?;
    let times = scenario.times();
    let noisy0 = evolve_grid(&probe, &h0, &hyp0.lindblad_ops, &times, &scenario.settings)?;
    let noisy1 = evolve_grid(&probe, &h1, &hyp1.lindblad_ops, &times, &scenario.settings)?;

    let n = times.len();
    let mut series = TimeSeries {
        times: Vec::with_capacity(n),
        p_noisy: Vec::with_capacity(n),
        p_unitary: Vec::with_capacity(n),
        p_unitary_ceiling: Vec::with_capacity(n),
        trace_distance_noisy: Vec::with_capacity(n),
        trace_distance_unitary: Vec::with_capacity(n),
        fingerprint: scenario.fingerprint(),
    };
    let mut ceiling = f64::NEG_INFINITY;
    for (i, &t) in times.iter().enumerate() {
        let d_noisy = weighted_trace_distance(&noisy0[i], &noisy1[i], q0, q1)?;
        let u0 = evolve_unitary(&probe, &h0, t)?;
        let u1 = evolve_unitary(&probe, &h1, t)?;
        let d_unitary = weighted_trace_distance(&u0, &u1, q0, q1)?;
        ceiling = ceiling.max(unitary_ceiling_at(&h0, &h1, t, q0, q1)?);

        series.times.push(t);
        series.trace_distance_noisy.push(d_noisy);
        series.trace_distance_unitary.push(d_unitary);
        series.p_noisy.push(0.5 * (1.0 + d_noisy));
        series.p_unitary.push(0.5 * (1.0 + d_unitary));
        series.p_unitary_ceiling.push(ceiling);
    }
    Ok(series)
}

fn unitary_p(probe: &DensityMatrix, h0: &ComplexMatrix, h1: &ComplexMatrix, s: &Scenario, t: f64) -> Result<f64> {
    let u0 = evolve_unitary(probe, h0, t)?;
    let u1 = evolve_unitary(probe, h1, t)?;
    success_probability(&u0, &u1, s.q0, s.q1)
}

/// Grid maximum polished by golden-section search between the neighbours of
/// the best grid point.
fn unitary_max_on_grid(
    probe: &DensityMatrix,
    h0: &ComplexMatrix,
    h1: &ComplexMatrix,
    s: &Scenario,
    times: &[f64],
) -> Result<f64> {
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        values.push(unitary_p(probe, h0, h1, s, t)?);
    }
    let (i, best) = argmax(values.iter().copied());
    let lo = times[i.saturating_sub(1)];
    let hi = times[(i + 1).min(times.len() - 1)];
    let (_, neg) = golden_section_min(
        |t| unitary_p(probe, h0, h1, s, t).map(|p| -p).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-9 * s.horizon.max(1.0),
    );
    Ok(best.max(-neg))
}

/// Largest noiseless success with the scenario's own probe over
/// `[0, horizon]`. The grid is doubled until the polished maximum moves by
/// less than `1e-6`.
pub fn unitary_max(scenario: &Scenario, horizon: f64, grid_points: usize) -> Result<f64> {
    let probe_scenario = Scenario {
        horizon,
        grid_points,
        ..*scenario
    };
    let (hyp0, hyp1) = probe_scenario.hypotheses()?;
    let (h0, h1) = (hyp0.hamiltonian, hyp1.hamiltonian);
    let probe = probe_state(&scenario.probe, &h0, &h1)?;
    let mut points = grid_points;
    let mut best = unitary_max_on_grid(&probe, &h0, &h1, &probe_scenario, &uniform_grid(horizon, points))?;
    while points < UNITARY_MAX_POINT_CAP {
        points = 2 * (points - 1) + 1;
        let refined = unitary_max_on_grid(&probe, &h0, &h1, &probe_scenario, &uniform_grid(horizon, points))?;
        let change = (refined - best).abs();
        best = best.max(refined);
        if change < UNITARY_MAX_TOL {
            break;
        }
    }
    Ok(best)
}

/// Noise-induced enhancement over a time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancementReport {
    /// `max_t (p_noisy − p_unitary_ceiling)`.
    pub eta: f64,
    /// Grid time attaining `eta`.
    pub t_star: f64,
    /// `p_noisy(t) > p_unitary_ceiling(t) + 1e-9` somewhere on the grid.
    pub exceeds_unitary_max: bool,
    /// `max_t (p_noisy − p_unitary)` with the scenario's own probe.
    pub eta_same_probe: f64,
    pub t_star_same_probe: f64,
    pub p_noisy_max: f64,
    pub t_noisy_max: f64,
    /// Dense-grid maximum of `p_unitary`.
    pub unitary_max: f64,
    /// Maximum of the probe-optimised ceiling over the horizon.
    pub unitary_ceiling_max: f64,
    /// `p_noisy_max > unitary_max + 1e-9`.
    pub exceeds_same_probe_max: bool,
}

pub fn enhancement_from_series(series: &TimeSeries, unitary_max: f64) -> EnhancementReport {
    let gap = series.p_noisy.iter().zip(&series.p_unitary_ceiling).map(|(p, c)| p - c);
    let (i_eta, eta) = argmax(gap);
    let exceeds = series
        .p_noisy
        .iter()
        .zip(&series.p_unitary_ceiling)
        .any(|(p, c)| *p > c + EXCEEDS_TOL);
    let (i_same, eta_same) = argmax(series.p_noisy.iter().zip(&series.p_unitary).map(|(p, u)| p - u));
    let (i_max, p_max) = argmax(series.p_noisy.iter().copied());
    EnhancementReport {
        eta,
        t_star: series.times[i_eta],
        exceeds_unitary_max: exceeds,
        eta_same_probe: eta_same,
        t_star_same_probe: series.times[i_same],
        p_noisy_max: p_max,
        t_noisy_max: series.times[i_max],
        unitary_max,
        unitary_ceiling_max: series.p_unitary_ceiling.last().copied().unwrap_or(f64::NAN),
        exceeds_same_probe_max: p_max > unitary_max + EXCEEDS_TOL,
    }
}

/// Runs the scenario and summarises the enhancement on its grid.
pub fn enhancement_eta(scenario: &Scenario) -> Result<(EnhancementReport, TimeSeries)> {
    let series = success_curve(scenario)?;
    let umax = unitary_max(scenario, scenario.horizon, scenario.grid_points)?;
    Ok((enhancement_from_series(&series, umax), series))
}

/// Plateau of the success probability when dephasing dominates:
/// `½ + ¼|sin(θ0 − θ1)|`.
pub fn strong_dephasing_limit(theta0_deg: f64, theta1_deg: f64) -> f64 {
    0.5 + 0.25 * (theta0_deg - theta1_deg).to_radians().sin().abs()
}
