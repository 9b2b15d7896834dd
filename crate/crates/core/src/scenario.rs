//! A complete discrimination problem: priors, the two hypotheses, noise,
//! probe, time grid and integrator settings.

use sha2::{Digest, Sha256};

use crate::discrimination::ProbeSpec;
use crate::error::{Error, Result};
use crate::model::{FieldSpec, Hypothesis, NoiseSpec, PROTON_GYROMAGNETIC_RATIO};
use crate::propagator::PropagationSettings;

const PRIOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub q0: f64,
    pub q1: f64,
    /// Gyromagnetic ratio, rad/s/T.
    pub gamma: f64,
    pub field0: FieldSpec,
    pub field1: FieldSpec,
    /// Control field along x added to both hypotheses, nT.
    pub control_bc_nt: f64,
    pub noise: NoiseSpec,
    pub probe: ProbeSpec,
    /// End of the uniform time grid, s.
    pub horizon: f64,
    pub grid_points: usize,
    pub settings: PropagationSettings,
}

pub fn validate_priors(q0: f64, q1: f64) -> Result<()> {
    if !(q0 >= 0.0 && q1 >= 0.0) || !(q0 + q1 - 1.0).abs().le(&PRIOR_TOL) {
        return Err(Error::InvalidArgument(format!(
            "priors must be ≥ 0 and sum to 1, got q0 = {q0}, q1 = {q1}"
        )));
    }
    Ok(())
}

impl Scenario {
    /// Equal priors, proton γ, no control, no noise, `|0⟩` probe, 20 s × 400.
    pub fn new(field0: FieldSpec, field1: FieldSpec) -> Self {
        Self {
            q0: 0.5,
            q1: 0.5,
            gamma: PROTON_GYROMAGNETIC_RATIO,
            field0,
            field1,
            control_bc_nt: 0.0,
            noise: NoiseSpec::noiseless(),
            probe: ProbeSpec::Ket0,
            horizon: 20.0,
            grid_points: 400,
            settings: PropagationSettings::default(),
        }
    }

    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        self.violation_errors().iter().map(|e| e.to_string()).collect()
    }

    pub fn violation_errors(&self) -> Vec<Error> {
        let mut out = Vec::new();
        let mut push = |r: Result<()>| {
            if let Err(e) = r {
                out.push(e);
            }
        };
        push(validate_priors(self.q0, self.q1));
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            push(Err(Error::InvalidArgument(format!(
                "gyromagnetic ratio must be > 0, got {}",
                self.gamma
            ))));
        }
        push(self.field0.validate());
        push(self.field1.validate());
        if !self.control_bc_nt.is_finite() {
            push(Err(Error::InvalidArgument("control field must be finite".into())));
        }
        push(self.noise.validate());
        push(self.probe.validate());
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            push(Err(Error::InvalidArgument(format!(
                "horizon must be > 0 s, got {}",
                self.horizon
            ))));
        }
        if self.grid_points < 2 {
            push(Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {}",
                self.grid_points
            ))));
        }
        push(self.settings.validate());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = self.violation_errors();
        match v.len() {
            0 => Ok(()),
            1 => Err(v.remove(0)),
            _ => Err(Error::Config(v.iter().map(|e| e.to_string()).collect())),
        }
    }

    pub fn hypotheses(&self) -> Result<(Hypothesis, Hypothesis)> {
        self.validate()?;
        Ok((
            Hypothesis::build(self.field0, self.control_bc_nt, self.gamma, &self.noise)?,
            Hypothesis::build(self.field1, self.control_bc_nt, self.gamma, &self.noise)?,
        ))
    }

    /// Uniform grid `t_i = horizon · i/(n−1)`, starting at exactly 0.
    pub fn times(&self) -> Vec<f64> {
        uniform_grid(self.horizon, self.grid_points)
    }

    /// SHA-256 of the scenario's canonical text form. `f64` debug output is
    /// the shortest round-trip representation, so equal scenarios hash equal.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        format!("{digest:x}")
    }
}

pub fn uniform_grid(horizon: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![0.0; points];
    }
    let last = (points - 1) as f64;
    (0..points).map(|i| horizon * (i as f64 / last)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Scenario {
        Scenario::new(FieldSpec::new(1.0, 0.0).unwrap(), FieldSpec::new(1.0, 30.0).unwrap())
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(20.0, 400);
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[399], 20.0);
    }

    #[test]
    fn collects_every_violation() {
        let mut s = base();
        s.q0 = 0.7;
        s.horizon = -1.0;
        s.grid_points = 1;
        assert_eq!(s.violations().len(), 3);
        assert!(matches!(s.validate(), Err(Error::Config(v)) if v.len() == 3));
        assert!(base().validate().is_ok());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = base();
        let mut b = base();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
        b.horizon = 20.000000000000004;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
