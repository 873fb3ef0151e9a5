//! Command-line front end: static fields, energies, the self-consistent loop
//! and driven trajectories, written as CSV/JSON files.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::energies::energy_total;
use crate::error::{Error, Result};
use crate::fields::{compute_fields, FieldProfiles};
use crate::model::{
    DotConfig, DotParams, DotWavefunction, StateLabel, KEFF_EXCITED, KEFF_GROUND, TRIAL_EXCITED, TRIAL_GROUND,
};
use crate::numerics::{format_sci, RadialGrid};
use crate::scf::{run_scf, ScfConfig};
use crate::sources::{compute_sources, SourceQuadrature};
use crate::tdkohn::{classical_trajectory, second_law_check, shifted_observables, DriveSpec, Envelope, StaticProfiles};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_MAX_ITER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qdot", version, allow_negative_numbers = true, about = "Force-balance fields, energies and self-consistency for a two-electron quantum dot")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Source and field profiles with the force-balance residual.
    #[command(allow_negative_numbers = true)]
    Fields,
    /// Self-consistent iteration from the published trial coefficients.
    #[command(allow_negative_numbers = true)]
    Scf,
    /// Uniform time-dependent drive and the dynamical force balance.
    #[command(allow_negative_numbers = true)]
    Td,
    /// Virial and direct energy components as JSON.
    #[command(allow_negative_numbers = true)]
    Energies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateArg {
    Ground,
    Excited,
    Trial,
}

impl From<StateArg> for StateLabel {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Ground => StateLabel::Ground,
            StateArg::Excited => StateLabel::Excited,
            StateArg::Trial => StateLabel::Trial,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, value_enum)]
    pub state: Option<StateArg>,
    /// Confinement frequency; defaults to the value giving the published k_eff.
    #[arg(long, global = true)]
    pub omega0: Option<f64>,
    /// Magnetic field strength (symmetric gauge).
    #[arg(long = "B", global = true)]
    pub b: Option<f64>,
    /// Choose ω₀ so that ω₀² + ω_L² equals the published k_eff of the state.
    #[arg(long, global = true)]
    pub omega0_adjusted: bool,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol_keff: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Drive amplitude along x.
    #[arg(long, global = true)]
    pub drive_amp: Option<f64>,
    #[arg(long, global = true)]
    pub drive_omega: Option<f64>,
    /// Ramp duration of the drive envelope (no ramp when absent).
    #[arg(long, global = true)]
    pub drive_ramp: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Pass/fail tolerance on the force-balance residual.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Contents of `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub state: Option<StateArg>,
    pub omega0: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub omega0_adjusted: Option<bool>,
    /// Trial-state Gaussian exponent.
    pub omega: Option<f64>,
    /// Trial-state polynomial coefficients.
    pub poly: Option<[f64; 4]>,
    /// Trial-state normalization constant (normalized when absent).
    pub c: Option<f64>,
    pub grid_points: Option<usize>,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub scf: Option<ScfConfig>,
    pub drive: Option<DriveSpec>,
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub state: StateLabel,
    pub params: DotParams,
    pub wf: DotWavefunction,
    pub grid: RadialGrid,
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub scf: ScfConfig,
    pub drive: DriveSpec,
}

fn published_keff(state: StateLabel) -> f64 {
    match state {
        StateLabel::Excited => KEFF_EXCITED,
        _ => KEFF_GROUND,
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let a = &cli.common;
        let file = match &a.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let state: StateLabel = a.state.or(file.state).unwrap_or(StateArg::Ground).into();
        let b = a.b.or(file.b).unwrap_or(0.0);
        let adjusted = a.omega0_adjusted || file.omega0_adjusted.unwrap_or(false);
        let omega0 = if adjusted { None } else { a.omega0.or(file.omega0) };
        let params = match omega0 {
            Some(w0) => DotParams::new(w0, b),
            None => DotParams::with_keff(published_keff(state), b),
        }
        .map_err(|e| Error::Config(e.to_string()))?;

        let wf = match state {
            StateLabel::Trial => {
                let (omega, poly) = match (file.omega, file.poly) {
                    (Some(o), Some(p)) => (o, p),
                    _ => return Err(Error::Config("trial state needs `omega` and `poly` in --config".into())),
                };
                match file.c {
                    Some(c) => DotWavefunction::with_constant(omega, poly, c, StateLabel::Trial)?,
                    None => DotWavefunction::new(omega, poly, StateLabel::Trial)?,
                }
            }
            _ => DotConfig {
                omega0: Some(params.omega0()),
                b,
                state,
                poly_override: None,
                omega_override: None,
            }
            .wavefunction()?,
        };

        let points = a.grid_points.or(file.grid_points).unwrap_or(2001);
        let r_max = a.r_max.or(file.r_max).unwrap_or(8.0 / wf.omega.sqrt());
        let grid = RadialGrid::uniform(0.0, r_max, points).map_err(|e| Error::Config(e.to_string()))?;

        let mut scf = file.scf.unwrap_or_default();
        if let Some(t) = a.tol_keff {
            scf.tol_keff = t;
        }
        if let Some(m) = a.max_iter {
            scf.max_iter = m;
        }
        if let Some(g) = a.grid_points.or(file.grid_points) {
            scf.grid_points = g;
        }
        if file.scf.is_none() && state == StateLabel::Excited {
            scf.state_select = 1;
        }
        scf.validate()?;

        let mut drive = file.drive.unwrap_or(DriveSpec::zero(20.0, 0.01));
        if let Some(v) = a.drive_amp {
            drive.e_amplitude = [v, 0.0];
        }
        if let Some(v) = a.drive_omega {
            drive.omega_drive = v;
        }
        if let Some(v) = a.drive_ramp {
            drive.envelope = Envelope::Ramp { tau: v };
        }
        if let Some(v) = a.dt {
            drive.dt = v;
        }
        if let Some(v) = a.t_end {
            drive.t_end = v;
        }
        drive.validate()?;

        Ok(Self {
            command: cli.command,
            state,
            params,
            wf,
            grid,
            out: a.out.clone(),
            tol: a.tol.or(file.tol),
            scf,
            drive,
        })
    }

    fn tag(&self) -> &'static str {
        match self.state {
            StateLabel::Ground => "ground",
            StateLabel::Excited => "excited",
            StateLabel::Trial => "trial",
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn static_fields(&self) -> Result<(crate::sources::SourceSet, FieldProfiles)> {
        let src = compute_sources(&self.wf, &self.params, &self.grid, &SourceQuadrature::default())?;
        let fp = compute_fields(&src, &self.params)?;
        Ok((src, fp))
    }

    /// Default force-balance tolerance `1e-3·k_eff·(4/√Ω)`.
    fn balance_tol(&self) -> f64 {
        self.tol
            .unwrap_or(1e-3 * self.params.keff() * 4.0 / self.wf.omega.sqrt())
    }
}

/// Maps an error to the documented exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

pub fn cmd_fields(cfg: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let (_, fp) = cfg.static_fields()?;
    fp.write_csv(&cfg.path(&format!("fields_{}.csv", cfg.tag())))?;
    fp.summary(out)?;
    Ok(if fp.first_law_residual() <= cfg.balance_tol() {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    })
}

pub fn cmd_energies(cfg: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let (src, fp) = cfg.static_fields()?;
    let report = energy_total(&cfg.wf, &cfg.params, Some((&src, &fp)))?;
    let json = report.to_json()?;
    std::fs::write(cfg.path(&format!("energies_{}.json", cfg.tag())), &json)?;
    writeln!(out, "{json}")?;
    Ok(EXIT_OK)
}

/// The published trial coefficients of the requested state, unless a trial
/// state was configured explicitly.
fn scf_initial(cfg: &RunConfig) -> Result<DotWavefunction> {
    let set = match cfg.state {
        StateLabel::Trial => return Ok(cfg.wf.clone()),
        StateLabel::Ground => TRIAL_GROUND,
        StateLabel::Excited => TRIAL_EXCITED,
    };
    DotWavefunction::with_constant(set.1, set.2, set.0, StateLabel::Trial)
}

pub fn cmd_scf(cfg: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let initial = scf_initial(cfg)?;
    let outcome = match run_scf(&initial, &cfg.params, &cfg.scf) {
        Ok(o) => o,
        Err(Error::Diverged { reason, history }) => {
            let partial = crate::scf::ScfOutcome {
                history,
                converged: false,
            };
            if !partial.history.is_empty() {
                partial.write_log(&cfg.path("scf_log.csv"))?;
            }
            return Err(Error::Diverged {
                reason,
                history: partial.history,
            });
        }
        Err(e) => return Err(e),
    };
    outcome.write_log(&cfg.path("scf_log.csv"))?;
    let last = outcome.last();
    let p = last.wf.poly;
    writeln!(
        out,
        "converged={} iterations={} keff={:.5} E={:.6} Omega={:.6} C={:.6} poly=[{:.6}, {:.6}, {:.6}, {:.6}]",
        outcome.converged,
        outcome.history.len(),
        last.keff,
        last.energy,
        last.wf.omega,
        last.wf.c,
        p[0],
        p[1],
        p[2],
        p[3]
    )?;
    for w in outcome.history.iter().flat_map(|s| &s.warnings) {
        writeln!(out, "warning: {w}")?;
    }
    Ok(if outcome.converged { EXIT_OK } else { EXIT_MAX_ITER })
}

fn write_second_law(path: &Path, report: &crate::tdkohn::SecondLawReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "max_residual", "ehrenfest_x", "ehrenfest_y", "time_error"])?;
    for s in &report.samples {
        w.write_record([s.t, s.max_residual, s.ehrenfest[0], s.ehrenfest[1], s.time_error].map(format_sci))?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_td(cfg: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let (src, _) = cfg.static_fields()?;
    let st = StaticProfiles::from_sources(&src, &cfg.params)?;
    let mut traj = classical_trajectory(&cfg.params, &cfg.drive)?;
    let t_end = *traj.times.last().unwrap_or(&0.0);
    let samples: Vec<f64> = if t_end > 0.0 {
        (1..=10).map(|k| t_end * k as f64 / 11.0).collect()
    } else {
        Vec::new()
    };
    let report = second_law_check(&st, &mut traj, &samples)?;
    traj.write_csv(&cfg.path("trajectory.csv"))?;
    write_second_law(&cfg.path("second_law.csv"), &report)?;
    shifted_observables(&st, &traj, 0.0)?.write_csv(&cfg.path(&format!("snapshot_{}_t0.csv", cfg.tag())))?;
    shifted_observables(&st, &traj, t_end)?.write_csv(&cfg.path(&format!("snapshot_{}_tend.csv", cfg.tag())))?;
    writeln!(
        out,
        "samples={} max_residual={:.3e} max_ehrenfest={:.3e} y_end=[{:.6}, {:.6}]",
        report.samples.len(),
        report.max_residual,
        report.max_ehrenfest,
        traj.y.last().map_or(0.0, |v| v[0]),
        traj.y.last().map_or(0.0, |v| v[1])
    )?;
    let tol = cfg.tol.unwrap_or(1e-4);
    Ok(if report.max_residual <= tol && report.max_ehrenfest <= 1e-5 {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QF_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("QF_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config("QF_THREADS must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command line, printing to `out`/`err`; returns the exit code.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let result = configure_threads().and_then(|_| {
        let cfg = RunConfig::resolve(cli)?;
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", cfg.out.display())))?;
        match cfg.command {
            Command::Fields => cmd_fields(&cfg, out),
            Command::Scf => cmd_scf(&cfg, out),
            Command::Td => cmd_td(&cfg, out),
            Command::Energies => cmd_energies(&cfg, out),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
