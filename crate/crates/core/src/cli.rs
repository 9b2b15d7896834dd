//! The `qht` command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] from an optional config file
//! overlaid by flags, runs the numerics and writes CSV (to `--out` or
//! standard output) plus a short plain-text report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_method, ConfigValues, RunConfig, DEFAULT_T2};
use crate::discrimination::{
    check_conditions, chernoff, enhancement_eta, probe_state, success_curve, ChernoffResult, EnhancementReport,
    TimeSeries,
};
use crate::error::{Error, Result};
use crate::experiments::{
    default_control_grid, default_ratio_grid, run_sweep, scenario_fig3, scenario_fig4, sweep_control, sweep_ratio,
    RatioMode, SweepOptions, SweepParameter, SweepResult, CONTROL_T1, TILTED_T1,
};
use crate::propagator::evolve_grid;
use crate::scenario::Scenario;

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "QHT_THREADS";

pub const CURVE_HEADER: &str = "t_s,p_noisy,p_unitary,trace_distance_noisy,trace_distance_unitary";
pub const SWEEP_HEADER: &str = "param_value,eta,t_star_s,exceeds_unitary_max,p_noisy_max";
pub const CHERNOFF_HEADER: &str = "t_s,s_star,q_star,exponent";

/// T2 values of the tilted-field bundle: two that beat the unitary bound,
/// one that does not, and the boundary `T2 = 2·T1`.
const FIG3_T2: [f64; 4] = [5.4, 1.0, 0.6, 2.0 * TILTED_T1];
/// `(T2, Bc)` pairs of the control-field bundle.
const FIG4_CASES: [(f64, f64); 3] = [(1.0, 0.0), (1.0, 0.75), (CONTROL_T1, 0.75)];

#[derive(Parser, Debug)]
#[command(
    name = "qht",
    version,
    about = "Noise-assisted quantum hypothesis testing on a relaxing spin-1/2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Success-probability curves for one scenario.
    Simulate(ScenarioArgs),
    /// Matrix elements and the two early-advantage conditions.
    Conditions(ScenarioArgs),
    /// Enhancement of the noisy curve over the unitary bound.
    Eta(ScenarioArgs),
    /// Enhancement over a grid of T2, log10(T1/T2) or control-field values.
    Sweep(SweepArgs),
    /// Quantum Chernoff quantity of the two noisy states along the grid.
    Chernoff(ScenarioArgs),
    /// Tilted-field bundle: curves for several T2 and the ratio inset sweep.
    Fig3(BundleArgs),
    /// Control-field bundle: curves with and without control and the Bc inset sweep.
    Fig4(BundleArgs),
}

#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig3, fig4 or custom.
    #[arg(long)]
    preset: Option<String>,
    /// Longitudinal relaxation time, s.
    #[arg(long, allow_negative_numbers = true)]
    t1: Option<f64>,
    /// Transverse relaxation time, s.
    #[arg(long, allow_negative_numbers = true)]
    t2: Option<f64>,
    /// Dephasing rate, 1/s.
    #[arg(long, allow_negative_numbers = true)]
    kappa1: Option<f64>,
    /// Damping rate, 1/s.
    #[arg(long, allow_negative_numbers = true)]
    kappa2: Option<f64>,
    /// Control field along x, nT.
    #[arg(long, allow_negative_numbers = true)]
    bc: Option<f64>,
    /// Steady-state ground population.
    #[arg(long, allow_negative_numbers = true)]
    p_ground: Option<f64>,
    /// ket0, x, optimal or bloch.
    #[arg(long)]
    probe: Option<String>,
    /// End of the time grid, s.
    #[arg(long, allow_negative_numbers = true)]
    horizon: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// exact or rk4.
    #[arg(long)]
    method: Option<String>,
    /// Largest RK4 step, s.
    #[arg(long, allow_negative_numbers = true)]
    dt_max: Option<f64>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ParamArg {
    T2,
    Ratio,
    Bc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    FixT1,
    FixT2,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    param: ParamArg,
    /// Comma-separated values; a default grid per parameter when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Vec<f64>,
    /// Which relaxation time a ratio sweep holds fixed.
    #[arg(long, value_enum, default_value = "fix-t1")]
    mode: ModeArg,
    /// Value of the fixed relaxation time for a ratio sweep, s.
    #[arg(long)]
    fixed_time: Option<f64>,
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Args, Debug)]
struct BundleArgs {
    /// Directory receiving the CSV files; created if missing.
    #[arg(long)]
    out_dir: PathBuf,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code: 0 success, 1 I/O failure, 2 configuration or usage
/// error, 3 numerical failure.
pub fn run_command<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(&a, stdout),
        Command::Conditions(a) => conditions(&a, stdout),
        Command::Eta(a) => eta(&a, stdout),
        Command::Sweep(a) => sweep(&a, stdout, stderr),
        Command::Chernoff(a) => chernoff_curve(&a, stdout),
        Command::Fig3(a) => fig3(&a, stdout, stderr),
        Command::Fig4(a) => fig4(&a, stdout, stderr),
    }
}

impl ScenarioArgs {
    /// Config-file values with the flags laid over them.
    fn values(&self) -> Result<ConfigValues> {
        let mut values = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
                ConfigValues::parse(&text)?
            }
            None => ConfigValues::default(),
        };
        let flags = ConfigValues {
            preset: self.preset.as_deref().map(str::parse).transpose()?,
            t1: self.t1,
            t2: self.t2,
            kappa1: self.kappa1,
            kappa2: self.kappa2,
            bc_nt: self.bc,
            p_ground: self.p_ground,
            probe: self.probe.as_deref().map(str::parse).transpose()?,
            horizon_s: self.horizon,
            points: self.points,
            method: self.method.as_deref().map(parse_method).transpose()?,
            dt_max: self.dt_max,
            output: self.out.clone(),
            ..Default::default()
        };
        values.overlay(&flags);
        Ok(values)
    }

    fn resolve(&self) -> Result<RunConfig> {
        self.values()?.resolve()
    }
}

fn sweep_options() -> Result<SweepOptions> {
    Ok(SweepOptions {
        threads: parse_threads(std::env::var(THREADS_ENV).ok().as_deref())?,
        keep_series: false,
    })
}

/// Thread cap from the environment value, `None` when unset.
fn parse_threads(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

/// Fixed 17-significant-digit scientific notation.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curve_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(96 * (series.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for i in 0..series.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(series.times[i]),
            num(series.p_noisy[i]),
            num(series.p_unitary[i]),
            num(series.trace_distance_noisy[i]),
            num(series.trace_distance_unitary[i])
        );
    }
    out
}

/// One row per point; failed points carry `NaN` values.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = match &p.outcome {
            Ok(r) => writeln!(
                out,
                "{},{},{},{},{}",
                num(p.value),
                num(r.eta),
                num(r.t_star),
                r.exceeds_unitary_max,
                num(r.p_noisy_max)
            ),
            Err(_) => writeln!(out, "{},NaN,NaN,false,NaN", num(p.value)),
        };
    }
    out
}

pub fn chernoff_csv(rows: &[(f64, ChernoffResult)]) -> String {
    let mut out = String::from(CHERNOFF_HEADER);
    out.push('\n');
    for (t, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(*t),
            num(r.s_star),
            num(r.q_star),
            num(r.exponent)
        );
    }
    out
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::Io(format!("cannot create a file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Sends CSV to `--out` when given, otherwise to standard output.
fn emit(csv: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, csv)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => stdout.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn describe(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let s = &cfg.scenario;
    let noise = match s.noise.times() {
        Some((t1, t2)) => format!("T1 = {t1} s, T2 = {t2} s"),
        None if s.noise.is_noiseless() => "noiseless".to_string(),
        None => format!("κ₁ = {} /s, κ₂ = {} /s", s.noise.kappa1, s.noise.kappa2),
    };
    writeln!(
        stdout,
        "# preset {}, {noise}, Bc = {} nT, horizon {} s × {} points, fingerprint {}",
        cfg.preset.name(),
        s.control_bc_nt,
        s.horizon,
        s.grid_points,
        &s.fingerprint()[..16]
    )?;
    Ok(())
}

fn simulate(args: &ScenarioArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.resolve()?;
    let series = success_curve(&cfg.scenario)?;
    let csv = curve_csv(&series);
    if cfg.output.is_some() {
        describe(&cfg, stdout)?;
        let (i, p) = series
            .p_noisy
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, (i, &p)| if p > b.1 { (i, p) } else { b });
        writeln!(stdout, "max p_noisy = {p:.6} at t = {:.4} s", series.times[i])?;
    }
    emit(&csv, &cfg.output, stdout)
}

fn conditions(args: &ScenarioArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.resolve()?;
    let r = check_conditions(&cfg.scenario)?;
    describe(&cfg, stdout)?;
    let mut text = String::new();
    let _ = writeln!(text, "lambda_max = {:.9e} rad/s", r.lambda_max);
    let _ = writeln!(text, "lambda_min = {:.9e} rad/s", r.lambda_min);
    let _ = writeln!(text, "x1 = {:.9e} /s", r.x1);
    let _ = writeln!(text, "y1 = {:.9e} /s", r.y1);
    let _ = writeln!(text, "z1 = {:.9e} /s", r.z1);
    let _ = writeln!(text, "w1 = {:.9e} /s", r.w1);
    let _ = writeln!(text, "cond1 = {}", r.cond1);
    let _ = writeln!(text, "cond2 = {}", r.cond2);
    let _ = writeln!(text, "degenerate = {}", r.degenerate);
    let _ = writeln!(text, "near_boundary = {}", r.near_boundary);
    match &cfg.output {
        Some(path) => {
            write_atomic(path, &text)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn eta_report(r: &EnhancementReport) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "eta = {:.9} at t = {:.6} s", r.eta, r.t_star);
    let _ = writeln!(text, "exceeds_unitary_max = {}", r.exceeds_unitary_max);
    let _ = writeln!(text, "p_noisy_max = {:.9} at t = {:.6} s", r.p_noisy_max, r.t_noisy_max);
    let _ = writeln!(text, "unitary_ceiling_max = {:.9}", r.unitary_ceiling_max);
    let _ = writeln!(
        text,
        "eta_same_probe = {:.9} at t = {:.6} s",
        r.eta_same_probe, r.t_star_same_probe
    );
    let _ = writeln!(text, "unitary_max_same_probe = {:.9}", r.unitary_max);
    let _ = writeln!(text, "exceeds_same_probe_max = {}", r.exceeds_same_probe_max);
    text
}

fn eta(args: &ScenarioArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.resolve()?;
    let (report, series) = enhancement_eta(&cfg.scenario)?;
    describe(&cfg, stdout)?;
    stdout.write_all(eta_report(&report).as_bytes())?;
    if let Some(path) = &cfg.output {
        write_atomic(path, &curve_csv(&series))?;
        writeln!(stdout, "wrote {}", path.display())?;
    }
    Ok(())
}

fn warn_failures(result: &SweepResult, stderr: &mut dyn Write) {
    for p in &result.points {
        if let Err(e) = &p.outcome {
            let _ = writeln!(stderr, "warning: {} = {}: {e}", result.parameter.name(), p.value);
        }
    }
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let base = args.scenario.values()?;
    // Resolve once so that errors in the base configuration surface directly.
    let cfg = base.resolve()?;
    let options = sweep_options()?;
    let (parameter, default_values) = match args.param {
        ParamArg::T2 => (SweepParameter::T2, vec![5.4, 1.0, 0.6]),
        ParamArg::Ratio => (SweepParameter::Log10Ratio, default_ratio_grid()),
        ParamArg::Bc => (SweepParameter::ControlField, default_control_grid()),
    };
    let values = if args.values.is_empty() {
        default_values
    } else {
        args.values.clone()
    };
    let mode = match args.mode {
        ModeArg::FixT1 => RatioMode::FixT1,
        ModeArg::FixT2 => RatioMode::FixT2,
    };
    let fixed = match (args.param, args.fixed_time, mode) {
        (_, Some(t), _) => Some(t),
        (ParamArg::Ratio, None, RatioMode::FixT1) => base.t1.or(cfg.scenario.noise.times().map(|t| t.0)),
        (ParamArg::Ratio, None, RatioMode::FixT2) => base.t2.or(cfg.scenario.noise.times().map(|t| t.1)),
        _ => None,
    };
    if args.param == ParamArg::Ratio && fixed.is_none() {
        return Err(Error::InvalidArgument(
            "a ratio sweep needs --fixed-time when the scenario has no relaxation times".into(),
        ));
    }
    let build = |v: f64| -> Result<Scenario> {
        let mut point = base.clone();
        point.kappa1 = None;
        point.kappa2 = None;
        match args.param {
            ParamArg::T2 => {
                point.t1 = point.t1.or(cfg.scenario.noise.times().map(|t| t.0));
                point.t2 = Some(v);
            }
            ParamArg::Ratio => {
                let (t1, t2) = mode.times(fixed.unwrap_or(f64::NAN), v);
                (point.t1, point.t2) = (Some(t1), Some(t2));
            }
            ParamArg::Bc => {
                if !(v >= 0.0) {
                    return Err(Error::InvalidArgument(format!("control field must be ≥ 0 nT, got {v}")));
                }
                point.kappa1 = base.kappa1;
                point.kappa2 = base.kappa2;
                point.bc_nt = Some(v);
            }
        }
        Ok(point.resolve()?.scenario)
    };
    let result = run_sweep(parameter, &values, build, &options)?;
    warn_failures(&result, stderr);
    let csv = sweep_csv(&result);
    let Some(path) = &cfg.output else {
        stdout.write_all(csv.as_bytes())?;
        return Ok(());
    };
    describe(&cfg, stdout)?;
    if let Some(i) = result.argmax_eta() {
        writeln!(
            stdout,
            "max eta = {:.6} at {} = {}",
            result.etas()[i].unwrap_or(f64::NAN),
            parameter.name(),
            result.points[i].value
        )?;
    }
    write_atomic(path, &csv)?;
    writeln!(stdout, "wrote {}", path.display())?;
    Ok(())
}

/// Chernoff quantity of the two noisy states at every grid time.
pub fn chernoff_series(scenario: &Scenario) -> Result<Vec<(f64, ChernoffResult)>> {
    let (h0, h1) = scenario.hypotheses()?;
    let probe = probe_state(&scenario.probe, &h0.hamiltonian, &h1.hamiltonian)?;
    let times = scenario.times();
    let r0 = evolve_grid(&probe, &h0.hamiltonian, &h0.lindblad_ops, &times, &scenario.settings)?;
    let r1 = evolve_grid(&probe, &h1.hamiltonian, &h1.lindblad_ops, &times, &scenario.settings)?;
    times
        .iter()
        .zip(r0.iter().zip(&r1))
        .map(|(&t, (a, b))| Ok((t, chernoff(a, b)?)))
        .collect()
}

fn chernoff_curve(args: &ScenarioArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.resolve()?;
    let rows = chernoff_series(&cfg.scenario)?;
    if cfg.output.is_some() {
        describe(&cfg, stdout)?;
    }
    emit(&chernoff_csv(&rows), &cfg.output, stdout)
}

fn fmt_value(v: f64) -> String {
    let s = format!("{v}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

fn bundle_dir(args: &BundleArgs) -> Result<&Path> {
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", args.out_dir.display())))?;
    Ok(&args.out_dir)
}

fn fig3(args: &BundleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let dir = bundle_dir(args)?;
    let options = sweep_options()?;
    let summary = run_sweep(
        SweepParameter::T2,
        &FIG3_T2,
        scenario_fig3,
        &SweepOptions {
            keep_series: true,
            ..options
        },
    )?;
    for p in &summary.points {
        let report = p.outcome.as_ref().map_err(Clone::clone)?;
        let series = p.series.as_ref().expect("series kept");
        let name = format!("fig3_t2_{}.csv", fmt_value(p.value));
        write_atomic(&dir.join(&name), &curve_csv(series))?;
        writeln!(
            stdout,
            "T2 = {:>4} s: max p_noisy {:.4}, eta {:+.4}, exceeds {} -> {name}",
            p.value, report.p_noisy_max, report.eta, report.exceeds_unitary_max
        )?;
    }
    write_atomic(&dir.join("fig3_summary.csv"), &sweep_csv(&summary))?;
    let inset = sweep_ratio(TILTED_T1, &default_ratio_grid(), RatioMode::FixT1, &options)?;
    warn_failures(&inset, stderr);
    write_atomic(&dir.join("fig3_inset_ratio.csv"), &sweep_csv(&inset))?;
    if let Some(i) = inset.argmax_eta() {
        writeln!(
            stdout,
            "inset: max eta {:.4} at log10(T1/T2) = {} -> fig3_inset_ratio.csv",
            inset.etas()[i].unwrap_or(f64::NAN),
            inset.points[i].value
        )?;
    }
    Ok(())
}

fn fig4(args: &BundleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let dir = bundle_dir(args)?;
    let options = sweep_options()?;
    let mut summary = SWEEP_HEADER.replacen("param_value", "t2_s,bc_nt", 1);
    summary.push('\n');
    for (t2, bc) in FIG4_CASES {
        let (report, series) = enhancement_eta(&scenario_fig4(t2, bc)?)?;
        let name = format!("fig4_t2_{}_bc_{}.csv", fmt_value(t2), fmt_value(bc));
        write_atomic(&dir.join(&name), &curve_csv(&series))?;
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{}",
            num(t2),
            num(bc),
            num(report.eta),
            num(report.t_star),
            report.exceeds_unitary_max,
            num(report.p_noisy_max)
        );
        writeln!(
            stdout,
            "T2 = {t2} s, Bc = {bc} nT: max p_noisy {:.4}, eta {:+.4}, exceeds {} -> {name}",
            report.p_noisy_max, report.eta, report.exceeds_unitary_max
        )?;
    }
    write_atomic(&dir.join("fig4_summary.csv"), &summary)?;
    let inset = sweep_control(DEFAULT_T2, &default_control_grid(), &options)?;
    warn_failures(&inset, stderr);
    write_atomic(&dir.join("fig4_inset_bc.csv"), &sweep_csv(&inset))?;
    if let Some(i) = inset.argmax_eta() {
        writeln!(
            stdout,
            "inset: max eta {:.4} at Bc = {} nT -> fig4_inset_bc.csv",
            inset.etas()[i].unwrap_or(f64::NAN),
            inset.points[i].value
        )?;
    }
    Ok(())
}
