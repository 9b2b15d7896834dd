//! Canned scenarios for the two reference geometries and parameter sweeps
//! over them.
//!
//! The tilted geometry has two 1.86 nT fields at 75° and 30°, T1 = 5.5 s and a
//! `|0⟩` probe. The control geometry has 0.2 nT and 2.79 nT fields along z,
//! T1 = 7.4 s, a control field along x and a `|+⟩` probe. Both use locked
//! noise with p = ½.

use rayon::prelude::*;

use crate::discrimination::{enhancement_eta, EnhancementReport, ProbeSpec, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{AxisBinding, FieldSpec, NoiseSpec};
use crate::scenario::Scenario;

pub const TILTED_B_NT: f64 = 1.86;
pub const TILTED_THETA0_DEG: f64 = 75.0;
pub const TILTED_THETA1_DEG: f64 = 30.0;
pub const TILTED_T1: f64 = 5.5;
pub const TILTED_HORIZON: f64 = 20.0;
pub const TILTED_POINTS: usize = 400;

pub const CONTROL_B0_NT: f64 = 0.2;
pub const CONTROL_B1_NT: f64 = 2.79;
pub const CONTROL_T1: f64 = 7.4;
pub const CONTROL_BC_NT: f64 = 0.75;
pub const CONTROL_HORIZON: f64 = 15.0;
pub const CONTROL_POINTS: usize = 300;

pub const GROUND_POPULATION: f64 = 0.5;

/// Grid size that keeps the spacing at or below `T2/2`, so the fast
/// dephasing transient is sampled even when T2 is much shorter than the
/// horizon.
pub fn resolved_points(horizon: f64, default_points: usize, t2: f64) -> usize {
    let needed = (horizon / (t2 / 2.0)).ceil();
    if needed.is_finite() && needed > 0.0 {
        default_points.max(needed as usize + 1)
    } else {
        default_points
    }
}

/// Tilted geometry with an arbitrary `(T1, T2)`.
pub fn scenario_tilted(t1: f64, t2: f64) -> Result<Scenario> {
    let noise = NoiseSpec::from_times(t1, t2, GROUND_POPULATION, AxisBinding::HamiltonianLocked)?;
    let mut s = Scenario::new(
        FieldSpec::new(TILTED_B_NT, TILTED_THETA0_DEG)?,
        FieldSpec::new(TILTED_B_NT, TILTED_THETA1_DEG)?,
    );
    s.noise = noise;
    s.probe = ProbeSpec::Ket0;
    s.horizon = TILTED_HORIZON;
    s.grid_points = resolved_points(TILTED_HORIZON, TILTED_POINTS, t2);
    Ok(s)
}

/// Tilted geometry at T1 = 5.5 s.
pub fn scenario_fig3(t2: f64) -> Result<Scenario> {
    scenario_tilted(TILTED_T1, t2)
}

/// Control geometry at T1 = 7.4 s with control field `bc_nt`.
pub fn scenario_fig4(t2: f64, bc_nt: f64) -> Result<Scenario> {
    if !bc_nt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "control field must be finite, got {bc_nt}"
        )));
    }
    let noise = NoiseSpec::from_times(CONTROL_T1, t2, GROUND_POPULATION, AxisBinding::HamiltonianLocked)?;
    let mut s = Scenario::new(
        FieldSpec::new(CONTROL_B0_NT, 90.0)?,
        FieldSpec::new(CONTROL_B1_NT, 90.0)?,
    );
    s.control_bc_nt = bc_nt;
    s.noise = noise;
    s.probe = ProbeSpec::AlongX;
    s.horizon = CONTROL_HORIZON;
    s.grid_points = resolved_points(CONTROL_HORIZON, CONTROL_POINTS, t2);
    Ok(s)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * (i as f64 / (n - 1) as f64)).collect(),
    }
}

/// Default inset grid: 25 values of log10(T1/T2) from 0 to 3.
pub fn default_ratio_grid() -> Vec<f64> {
    linspace(0.0, 3.0, 25)
}

/// Default inset grid: 21 control fields from 0 to 3 nT.
pub fn default_control_grid() -> Vec<f64> {
    linspace(0.0, 3.0, 21)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    T2,
    Log10Ratio,
    ControlField,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::T2 => "t2_s",
            SweepParameter::Log10Ratio => "log10_t1_over_t2",
            SweepParameter::ControlField => "bc_nt",
        }
    }
}

/// Which relaxation time stays put while the ratio T1/T2 varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    FixT1,
    FixT2,
}

impl RatioMode {
    /// `(T1, T2)` for a given `log10(T1/T2)`.
    pub fn times(&self, fixed: f64, log10_ratio: f64) -> (f64, f64) {
        let ratio = 10f64.powf(log10_ratio);
        match self {
            RatioMode::FixT1 => (fixed, fixed / ratio),
            RatioMode::FixT2 => (fixed * ratio, fixed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Keep every point's full time series.
    pub keep_series: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<EnhancementReport>,
    pub series: Option<TimeSeries>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    /// In input order.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// η per point, `None` where the point failed.
    pub fn etas(&self) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.outcome.as_ref().ok().map(|r| r.eta))
            .collect()
    }

    /// Index of the largest η among successful points (first on ties).
    pub fn argmax_eta(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, eta) in self.etas().into_iter().enumerate() {
            if let Some(e) = eta {
                if best.map_or(true, |(_, b)| e > b) {
                    best = Some((i, e));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// η never decreases along the grid by more than `tol` (failed points
    /// are skipped).
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        let etas: Vec<f64> = self.etas().into_iter().flatten().collect();
        etas.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

fn run_point(value: f64, scenario: Result<Scenario>, keep_series: bool) -> SweepPoint {
    match scenario.and_then(|s| enhancement_eta(&s)) {
        Ok((report, series)) => SweepPoint {
            value,
            outcome: Ok(report),
            series: keep_series.then_some(series),
        },
        Err(e) => SweepPoint {
            value,
            outcome: Err(e),
            series: None,
        },
    }
}

/// Evaluates `build(v)` for each value, possibly in parallel. Failures are
/// recorded per point; the result keeps the input order.
pub fn run_sweep<F>(parameter: SweepParameter, values: &[f64], build: F, options: &SweepOptions) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<Scenario> + Sync,
{
    let work = || -> Vec<SweepPoint> {
        values
            .par_iter()
            .map(|&v| run_point(v, build(v), options.keep_series))
            .collect()
    };
    let points = match options.threads {
        Some(n) => {
            if n == 0 {
                return Err(Error::InvalidArgument("thread count must be ≥ 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?
                .install(work)
        }
        None => work(),
    };
    Ok(SweepResult { parameter, points })
}

/// Tilted geometry at T1 = 5.5 s for each T2.
pub fn sweep_t2(t2_values: &[f64], options: &SweepOptions) -> Result<SweepResult> {
    run_sweep(SweepParameter::T2, t2_values, scenario_fig3, options)
}

/// Tilted geometry over `log10(T1/T2)`, holding T1 or T2 at `fixed_time`.
pub fn sweep_ratio(
    fixed_time: f64,
    log10_ratios: &[f64],
    mode: RatioMode,
    options: &SweepOptions,
) -> Result<SweepResult> {
    run_sweep(
        SweepParameter::Log10Ratio,
        log10_ratios,
        |r| {
            let (t1, t2) = mode.times(fixed_time, r);
            scenario_tilted(t1, t2)
        },
        options,
    )
}

/// Control geometry at the given T2 for each control field (nT, ≥ 0).
pub fn sweep_control(t2: f64, bc_values: &[f64], options: &SweepOptions) -> Result<SweepResult> {
    run_sweep(
        SweepParameter::ControlField,
        bc_values,
        |bc| {
            if !(bc >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "control field must be ≥ 0 nT, got {bc}"
                )));
            }
            scenario_fig4(t2, bc)
        },
        options,
    )
}
