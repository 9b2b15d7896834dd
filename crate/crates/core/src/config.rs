//! Run configuration: a TOML document whose keys all have defaults, overlaid
//! by command-line flags and resolved into a validated [`Scenario`].
//!
//! ```toml
//! [scenario]
//! preset = "fig3"        # fig3 | fig4 | custom
//! q0 = 0.5
//! q1 = 0.5
//! gamma = 2.6752218744e8 # rad/s/T
//! output = "curve.csv"
//!
//! [hypothesis0]
//! b_nt = 1.86
//! theta_deg = 75.0
//!
//! [hypothesis1]
//! b_nt = 1.86
//! theta_deg = 30.0
//!
//! [control]
//! bc_nt = 0.0
//!
//! [noise]
//! t1 = 5.5               # or kappa1 / kappa2, never both
//! t2 = 1.0
//! p_ground = 0.5
//! axis_theta_deg = 90.0  # omit to lock each axis to its own field
//!
//! [probe]
//! kind = "ket0"          # ket0 | x | optimal | bloch
//! theta_deg = 0.0        # bloch only
//! phi_deg = 0.0          # bloch only
//!
//! [time]
//! horizon_s = 20.0
//! points = 400
//!
//! [integrator]
//! method = "exact"       # exact | rk4
//! dt_max = 0.01
//! richardson_check = false
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use toml::{Table, Value};

use crate::discrimination::ProbeSpec;
use crate::error::{Error, Result};
use crate::experiments::{
    resolved_points, CONTROL_B0_NT, CONTROL_B1_NT, CONTROL_BC_NT, CONTROL_HORIZON, CONTROL_POINTS, CONTROL_T1,
    GROUND_POPULATION, TILTED_B_NT, TILTED_HORIZON, TILTED_POINTS, TILTED_T1, TILTED_THETA0_DEG, TILTED_THETA1_DEG,
};
use crate::model::{AxisBinding, FieldSpec, NoiseSpec};
use crate::propagator::Method;
use crate::scenario::Scenario;

/// T2 used by the presets when none is given.
pub const DEFAULT_T2: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    /// Tilted geometry, T1 = 5.5 s, `|0⟩` probe.
    #[default]
    Fig3,
    /// Control geometry, T1 = 7.4 s, Bc = 0.75 nT, `|+⟩` probe.
    Fig4,
    /// Tilted fields without noise; every key may be overridden.
    Custom,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Custom => "custom",
        }
    }

    /// Default T1 of the preset's noise, if it has any.
    pub fn default_t1(&self) -> Option<f64> {
        match self {
            Preset::Fig3 => Some(TILTED_T1),
            Preset::Fig4 => Some(CONTROL_T1),
            Preset::Custom => None,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "custom" => Ok(Preset::Custom),
            _ => Err(Error::InvalidArgument(format!(
                "unknown preset '{s}' (expected fig3, fig4 or custom)"
            ))),
        }
    }
}

/// Probe selection as written in a config file or on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Ket0,
    AlongX,
    Optimal,
    Bloch,
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ket0" => Ok(ProbeKind::Ket0),
            "x" => Ok(ProbeKind::AlongX),
            "optimal" => Ok(ProbeKind::Optimal),
            "bloch" => Ok(ProbeKind::Bloch),
            _ => Err(Error::InvalidArgument(format!(
                "unknown probe '{s}' (expected ket0, x, optimal or bloch)"
            ))),
        }
    }
}

pub fn parse_method(s: &str) -> Result<Method> {
    match s {
        "exact" => Ok(Method::SuperopExact),
        "rk4" => Ok(Method::Rk4),
        _ => Err(Error::InvalidArgument(format!(
            "unknown method '{s}' (expected exact or rk4)"
        ))),
    }
}

/// Every setting as optionally given by the user, before defaults apply.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigValues {
    pub preset: Option<Preset>,
    pub q0: Option<f64>,
    pub q1: Option<f64>,
    pub gamma: Option<f64>,
    pub output: Option<PathBuf>,
    pub b0_nt: Option<f64>,
    pub theta0_deg: Option<f64>,
    pub b1_nt: Option<f64>,
    pub theta1_deg: Option<f64>,
    pub bc_nt: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub p_ground: Option<f64>,
    pub axis_theta_deg: Option<f64>,
    pub probe: Option<ProbeKind>,
    pub probe_theta_deg: Option<f64>,
    pub probe_phi_deg: Option<f64>,
    pub horizon_s: Option<f64>,
    pub points: Option<usize>,
    pub method: Option<Method>,
    pub dt_max: Option<f64>,
    pub richardson_check: Option<bool>,
}

/// A fully validated run: the resolved scenario and where to write output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub scenario: Scenario,
    pub output: Option<PathBuf>,
}

/// Parses and resolves a config file. All violations are reported together.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    ConfigValues::parse(text)?.resolve()
}

/// Accumulates violations so that one pass reports all of them.
#[derive(Default)]
struct Violations(Vec<Error>);

impl Violations {
    fn push(&mut self, e: Error) {
        self.0.push(e);
    }

    fn check<T>(&mut self, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.push(e)).ok()
    }

    fn finish<T>(mut self, value: T) -> Result<T> {
        match self.0.len() {
            0 => Ok(value),
            1 => Err(self.0.remove(0)),
            _ => Err(Error::Config(self.0.iter().map(|e| e.to_string()).collect())),
        }
    }
}

fn get_f64(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::InvalidArgument(format!("'{key}' must be a number"))),
    }
}

fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::InvalidArgument(format!("'{key}' must be a string")))
}

impl ConfigValues {
    /// Reads the TOML text. Syntax errors, unknown sections or keys and
    /// wrongly typed values are collected and reported together.
    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![format!("TOML syntax: {}", e.message())]))?;
        let mut out = ConfigValues::default();
        let mut errs = Violations::default();
        for (section, body) in &table {
            let Some(body) = body.as_table() else {
                errs.push(Error::InvalidArgument(format!(
                    "top-level key '{section}' is not a section"
                )));
                continue;
            };
            for (key, v) in body {
                let name = format!("{section}.{key}");
                if let Err(e) = out.set(section, key, v, &name) {
                    errs.push(e);
                }
            }
        }
        errs.finish(out)
    }

    fn set(&mut self, section: &str, key: &str, v: &Value, name: &str) -> Result<()> {
        let num = || get_f64(v, name);
        match (section, key) {
            ("scenario", "preset") => self.preset = Some(get_str(v, name)?.parse()?),
            ("scenario", "q0") => self.q0 = Some(num()?),
            ("scenario", "q1") => self.q1 = Some(num()?),
            ("scenario", "gamma") => self.gamma = Some(num()?),
            ("scenario", "output") => self.output = Some(PathBuf::from(get_str(v, name)?)),
            ("hypothesis0", "b_nt") => self.b0_nt = Some(num()?),
            ("hypothesis0", "theta_deg") => self.theta0_deg = Some(num()?),
            ("hypothesis1", "b_nt") => self.b1_nt = Some(num()?),
            ("hypothesis1", "theta_deg") => self.theta1_deg = Some(num()?),
            ("control", "bc_nt") => self.bc_nt = Some(num()?),
            ("noise", "t1") => self.t1 = Some(num()?),
            ("noise", "t2") => self.t2 = Some(num()?),
            ("noise", "kappa1") => self.kappa1 = Some(num()?),
            ("noise", "kappa2") => self.kappa2 = Some(num()?),
            ("noise", "p_ground") => self.p_ground = Some(num()?),
            ("noise", "axis_theta_deg") => self.axis_theta_deg = Some(num()?),
            ("probe", "kind") => self.probe = Some(get_str(v, name)?.parse()?),
            ("probe", "theta_deg") => self.probe_theta_deg = Some(num()?),
            ("probe", "phi_deg") => self.probe_phi_deg = Some(num()?),
            ("time", "horizon_s") => self.horizon_s = Some(num()?),
            ("time", "points") => {
                let n = v
                    .as_integer()
                    .filter(|&n| n >= 0)
                    .ok_or_else(|| Error::InvalidArgument(format!("'{name}' must be a non-negative integer")))?;
                self.points = Some(n as usize);
            }
            ("integrator", "method") => self.method = Some(parse_method(get_str(v, name)?)?),
            ("integrator", "dt_max") => self.dt_max = Some(num()?),
            ("integrator", "richardson_check") => {
                self.richardson_check = Some(
                    v.as_bool()
                        .ok_or_else(|| Error::InvalidArgument(format!("'{name}' must be true or false")))?,
                )
            }
            ("scenario" | "hypothesis0" | "hypothesis1" | "control" | "noise" | "probe" | "time" | "integrator", _) => {
                return Err(Error::InvalidArgument(format!("unknown key '{name}'")))
            }
            _ => return Err(Error::InvalidArgument(format!("unknown section '[{section}]'"))),
        }
        Ok(())
    }

    /// Applies every value set in `other` on top of `self`. Giving relaxation
    /// times discards rates from `self` and vice versa.
    pub fn overlay(&mut self, other: &ConfigValues) {
        if other.t1.is_some() || other.t2.is_some() {
            self.kappa1 = None;
            self.kappa2 = None;
        }
        if other.kappa1.is_some() || other.kappa2.is_some() {
            self.t1 = None;
            self.t2 = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            preset,
            q0,
            q1,
            gamma,
            output,
            b0_nt,
            theta0_deg,
            b1_nt,
            theta1_deg,
            bc_nt,
            t1,
            t2,
            kappa1,
            kappa2,
            p_ground,
            axis_theta_deg,
            probe,
            probe_theta_deg,
            probe_phi_deg,
            horizon_s,
            points,
            method,
            dt_max,
            richardson_check
        );
    }

    /// Effective T2 after defaults, used for grid resolution and sweeps.
    fn effective_t2(&self, preset: Preset) -> Option<f64> {
        if self.kappa1.is_some() || self.kappa2.is_some() {
            let k1 = self.kappa1.unwrap_or(0.0);
            let k2 = self.kappa2.unwrap_or(0.0);
            return Some(2.0 / (4.0 * k1 + k2)).filter(|t| t.is_finite() && *t > 0.0);
        }
        match preset {
            Preset::Custom => self.t2,
            _ => Some(self.t2.unwrap_or(DEFAULT_T2)),
        }
    }

    /// Fills defaults from the preset and validates the result.
    pub fn resolve(&self) -> Result<RunConfig> {
        let preset = self.preset.unwrap_or_default();
        let mut errs = Violations::default();

        let (b0, th0, b1, th1, bc, probe, horizon, points) = match preset {
            Preset::Fig3 | Preset::Custom => (
                TILTED_B_NT,
                TILTED_THETA0_DEG,
                TILTED_B_NT,
                TILTED_THETA1_DEG,
                0.0,
                ProbeKind::Ket0,
                TILTED_HORIZON,
                TILTED_POINTS,
            ),
            Preset::Fig4 => (
                CONTROL_B0_NT,
                90.0,
                CONTROL_B1_NT,
                90.0,
                CONTROL_BC_NT,
                ProbeKind::AlongX,
                CONTROL_HORIZON,
                CONTROL_POINTS,
            ),
        };
        let field0 = errs.check(FieldSpec::new(self.b0_nt.unwrap_or(b0), self.theta0_deg.unwrap_or(th0)));
        let field1 = errs.check(FieldSpec::new(self.b1_nt.unwrap_or(b1), self.theta1_deg.unwrap_or(th1)));
        let mut scenario = Scenario::new(
            field0.unwrap_or(FieldSpec {
                magnitude_nt: b0,
                theta_deg: th0,
            }),
            field1.unwrap_or(FieldSpec {
                magnitude_nt: b1,
                theta_deg: th1,
            }),
        );
        scenario.control_bc_nt = self.bc_nt.unwrap_or(bc);

        match (self.q0, self.q1) {
            (Some(q0), Some(q1)) => (scenario.q0, scenario.q1) = (q0, q1),
            (Some(q0), None) => (scenario.q0, scenario.q1) = (q0, 1.0 - q0),
            (None, Some(q1)) => (scenario.q0, scenario.q1) = (1.0 - q1, q1),
            (None, None) => {}
        }
        if let Some(g) = self.gamma {
            scenario.gamma = g;
        }

        if let Some(noise) = self.resolve_noise(preset, &mut errs) {
            scenario.noise = noise;
        }

        scenario.probe = match self.probe.unwrap_or(probe) {
            ProbeKind::Ket0 => ProbeSpec::Ket0,
            ProbeKind::AlongX => ProbeSpec::AlongX,
            ProbeKind::Optimal => ProbeSpec::OptimalSuperposition,
            ProbeKind::Bloch => ProbeSpec::Bloch {
                theta_deg: self.probe_theta_deg.unwrap_or(0.0),
                phi_deg: self.probe_phi_deg.unwrap_or(0.0),
            },
        };
        if self.probe.unwrap_or(probe) != ProbeKind::Bloch
            && (self.probe_theta_deg.is_some() || self.probe_phi_deg.is_some())
        {
            errs.push(Error::InvalidArgument(
                "probe angles only apply to probe kind 'bloch'".into(),
            ));
        }

        scenario.horizon = self.horizon_s.unwrap_or(horizon);
        scenario.grid_points = match (self.points, self.effective_t2(preset)) {
            (Some(n), _) => n,
            (None, Some(t2)) if scenario.horizon > 0.0 => resolved_points(scenario.horizon, points, t2),
            (None, _) => points,
        };
        if let Some(m) = self.method {
            scenario.settings.method = m;
        }
        if let Some(dt) = self.dt_max {
            scenario.settings.dt_max = dt;
        }
        if let Some(r) = self.richardson_check {
            scenario.settings.richardson_check = r;
        }

        // Bad fields and noise were recorded above and replaced by valid
        // stand-ins, so these are the remaining scenario-level problems.
        for e in scenario.violation_errors() {
            errs.push(e);
        }
        errs.finish(RunConfig {
            preset,
            scenario,
            output: self.output.clone(),
        })
    }

    fn resolve_noise(&self, preset: Preset, errs: &mut Violations) -> Option<NoiseSpec> {
        let has_times = self.t1.is_some() || self.t2.is_some();
        let has_rates = self.kappa1.is_some() || self.kappa2.is_some();
        let p = self.p_ground.unwrap_or(GROUND_POPULATION);
        let binding = match self.axis_theta_deg {
            Some(theta_deg) => AxisBinding::FixedAxis { theta_deg },
            None => AxisBinding::HamiltonianLocked,
        };
        if has_times && has_rates {
            errs.push(Error::InvalidArgument(
                "give noise either as t1/t2 or as kappa1/kappa2, not both".into(),
            ));
            return None;
        }
        let noise = if has_rates {
            NoiseSpec::new(self.kappa1.unwrap_or(0.0), self.kappa2.unwrap_or(0.0), p, binding)
        } else {
            match (preset.default_t1(), self.t1, self.t2) {
                (None, None, None) => NoiseSpec::new(0.0, 0.0, p, binding),
                (None, Some(t1), Some(t2)) | (Some(_), Some(t1), Some(t2)) => NoiseSpec::from_times(t1, t2, p, binding),
                (Some(d1), t1, t2) => NoiseSpec::from_times(t1.unwrap_or(d1), t2.unwrap_or(DEFAULT_T2), p, binding),
                (None, _, _) => Err(Error::InvalidArgument(
                    "the custom preset needs both t1 and t2 to define noise".into(),
                )),
            }
        };
        errs.check(noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{scenario_fig3, scenario_fig4};

    #[test]
    fn fig3_preset_matches_builder() {
        let cfg = parse_config("[scenario]\npreset = \"fig3\"\n[noise]\nt2 = 0.6\n").unwrap();
        assert_eq!(cfg.scenario, scenario_fig3(0.6).unwrap());
        assert_eq!(cfg.preset, Preset::Fig3);
    }

    #[test]
    fn fig4_preset_matches_builder() {
        let cfg = parse_config("[scenario]\npreset = \"fig4\"\n[control]\nbc_nt = 1.5\n").unwrap();
        assert_eq!(cfg.scenario, scenario_fig4(1.0, 1.5).unwrap());
    }

    #[test]
    fn short_t2_refines_the_grid_like_the_builder() {
        let cfg = parse_config("[noise]\nt2 = 0.0055\n").unwrap();
        assert_eq!(cfg.scenario, scenario_fig3(0.0055).unwrap());
        assert!(cfg.scenario.grid_points > 400);
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.preset, Preset::Fig3);
        assert_eq!(cfg.scenario, scenario_fig3(DEFAULT_T2).unwrap());
        assert_eq!(cfg.output, None);
    }

    #[test]
    fn unphysical_t2_names_the_bound() {
        let err = parse_config("[noise]\nt1 = 5.5\nt2 = 12\n").unwrap_err();
        match err {
            Error::UnphysicalNoise(msg) => assert!(msg.contains("T2 ≤ 2·T1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "[scenario]\nq0 = 0.7\nq1 = 0.7\ncolour = \"red\"\n[time]\nhorizon_s = -1\n[bogus]\nx = 1\n";
        let values = ConfigValues::parse(text);
        match values {
            Err(Error::Config(list)) => {
                assert_eq!(list.len(), 2, "{list:?}");
                assert!(list.iter().any(|m| m.contains("scenario.colour")));
                assert!(list.iter().any(|m| m.contains("[bogus]")));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "[scenario]\nq0 = 0.7\nq1 = 0.7\n[time]\nhorizon_s = -1\n[noise]\nt1 = 1\nt2 = 3\n";
        match parse_config(text) {
            Err(Error::Config(list)) => {
                assert_eq!(list.len(), 3, "{list:?}");
                assert!(list.iter().any(|m| m.contains("priors")));
                assert!(list.iter().any(|m| m.contains("horizon")));
                assert!(list.iter().any(|m| m.contains("T2")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn times_and_rates_conflict() {
        let err = parse_config("[noise]\nt1 = 5.5\nkappa1 = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("not both"));
    }

    #[test]
    fn rates_are_accepted() {
        let cfg = parse_config("[noise]\nkappa1 = 300\nkappa2 = 0.2\n").unwrap();
        assert_eq!(cfg.scenario.noise.kappa1, 300.0);
        assert_eq!(cfg.scenario.noise.kappa2, 0.2);
    }

    #[test]
    fn custom_preset_is_noiseless_by_default() {
        let cfg = parse_config("[scenario]\npreset = \"custom\"\n[probe]\nkind = \"bloch\"\ntheta_deg = 90\n").unwrap();
        assert!(cfg.scenario.noise.is_noiseless());
        assert_eq!(
            cfg.scenario.probe,
            ProbeSpec::Bloch {
                theta_deg: 90.0,
                phi_deg: 0.0
            }
        );
        assert!(parse_config("[scenario]\npreset = \"custom\"\n[noise]\nt1 = 2\n").is_err());
    }

    #[test]
    fn single_prior_implies_the_other() {
        let cfg = parse_config("[scenario]\nq0 = 0.3\n").unwrap();
        assert_eq!((cfg.scenario.q0, cfg.scenario.q1), (0.3, 0.7));
    }

    #[test]
    fn wrong_types_are_rejected() {
        assert!(parse_config("[time]\npoints = 1.5\n").is_err());
        assert!(parse_config("[noise]\nt2 = \"short\"\n").is_err());
        assert!(parse_config("[integrator]\nmethod = \"euler\"\n").is_err());
        assert!(parse_config("preset = \"fig3\"\n").is_err());
        assert!(parse_config("[scenario\n").is_err());
    }

    #[test]
    fn overlay_replaces_and_switches_noise_form() {
        let mut base = ConfigValues::parse("[noise]\nkappa1 = 1\nkappa2 = 0.1\n[time]\npoints = 50\n").unwrap();
        let flags = ConfigValues {
            t2: Some(0.6),
            ..Default::default()
        };
        base.overlay(&flags);
        assert_eq!(base.kappa1, None);
        assert_eq!(base.points, Some(50));
        let cfg = base.resolve().unwrap();
        let mut want = scenario_fig3(0.6).unwrap();
        want.grid_points = 50;
        assert_eq!(cfg.scenario, want);
    }

    #[test]
    fn integrator_keys() {
        let cfg = parse_config("[integrator]\nmethod = \"rk4\"\ndt_max = 0.002\nrichardson_check = true\n").unwrap();
        assert_eq!(cfg.scenario.settings.method, Method::Rk4);
        assert_eq!(cfg.scenario.settings.dt_max, 0.002);
        assert!(cfg.scenario.settings.richardson_check);
    }
}
