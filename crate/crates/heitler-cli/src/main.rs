//! `heitler` — photon-correlation calculations for a driven two-level
//! emitter whose filtered emission is interfered with a correction tone.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical failure, 4 outside an analytic formula's domain.

use clap::{Args, Parser, Subcommand};
use heitler::model::FlatParams;
use heitler_cli::config::{
    CommandKind, FormatKind, OptimizeSpec, RunConfig, SweepSpec, TauSpec,
};
use heitler_cli::exec::execute;
use heitler_cli::figures::{figure_configs, FIGURE_KINDS};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "heitler",
    version,
    about = "Photon correlations of coherently corrected resonance fluorescence",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// System parameters shared by every computation, in units of the emitter
/// decay rate. Unset flags keep the defaults (resonant weak drive, detector
/// on the laser, no correction, balanced splitter).
#[derive(Args)]
struct CommonArgs {
    /// Emitter decay rate
    #[arg(long = "gamma-sigma", allow_negative_numbers = true)]
    gamma_sigma: Option<f64>,
    /// Pure dephasing rate
    #[arg(long = "gamma-phi", allow_negative_numbers = true)]
    gamma_phi: Option<f64>,
    /// Drive amplitude
    #[arg(long = "omega", allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Drive detuning from the emitter
    #[arg(long = "delta-sigma", allow_negative_numbers = true)]
    delta_sigma: Option<f64>,
    /// Detector detuning from the drive
    #[arg(long = "delta-a", allow_negative_numbers = true)]
    delta_a: Option<f64>,
    /// Detector linewidth
    #[arg(long = "Gamma", allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Emitter-detector probe coupling
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Detector Fock-space truncation
    #[arg(long)]
    nmax: Option<usize>,
    /// Correction amplitude
    #[arg(long = "F", allow_negative_numbers = true)]
    f: Option<f64>,
    /// Correction phase
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Beam-splitter transmission
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Beam-splitter reflection
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Computation route: numeric (default) or analytic
    #[arg(long)]
    engine: Option<String>,
    /// Write the table to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv (default) or json
    #[arg(long)]
    format: Option<String>,
}

impl CommonArgs {
    fn to_config(&self, command: CommandKind) -> Result<RunConfig, CliError> {
        let mut p = FlatParams::default();
        if let Some(v) = self.gamma_sigma {
            p.gamma_sigma = v;
        }
        if let Some(v) = self.gamma_phi {
            p.gamma_phi = v;
        }
        if let Some(v) = self.omega {
            p.omega_sigma = v;
        }
        if let Some(v) = self.delta_sigma {
            p.delta_sigma = v;
        }
        if let Some(v) = self.delta_a {
            p.delta_a = v;
        }
        if let Some(v) = self.gamma {
            p.gamma = v;
        }
        if let Some(v) = self.g {
            p.g = v;
        }
        if let Some(v) = self.nmax {
            p.n_max = v;
        }
        if let Some(v) = self.f {
            p.f = v;
        }
        if let Some(v) = self.phi {
            p.phi = v;
        }
        if let Some(v) = self.t {
            p.t = v;
        }
        if let Some(v) = self.r {
            p.r = v;
        }
        let mut cfg = RunConfig::new(command, p);
        cfg.engine = self.engine.clone();
        cfg.format = match self.format.as_deref() {
            None | Some("csv") => FormatKind::Csv,
            Some("json") => FormatKind::Json,
            Some(other) => {
                return Err(CliError::Compute(heitler::Error::InvalidParams(format!(
                    "unknown format '{other}' (expected csv or json)"
                ))))
            }
        };
        Ok(cfg)
    }
}

/// Correction-plane sweep axes; any one flag activates the sweep, the rest
/// keep the standard survey grid's values.
#[derive(Args)]
struct SweepArgs {
    /// First correction amplitude
    #[arg(long = "f-from", allow_negative_numbers = true)]
    f_from: Option<f64>,
    /// Last correction amplitude (inclusive)
    #[arg(long = "f-to", allow_negative_numbers = true)]
    f_to: Option<f64>,
    /// Number of amplitude samples
    #[arg(long = "f-steps")]
    f_steps: Option<usize>,
    /// First correction phase
    #[arg(long = "phi-from", allow_negative_numbers = true)]
    phi_from: Option<f64>,
    /// End of the phase range (exclusive)
    #[arg(long = "phi-to", allow_negative_numbers = true)]
    phi_to: Option<f64>,
    /// Number of phase samples
    #[arg(long = "phi-steps")]
    phi_steps: Option<usize>,
}

impl SweepArgs {
    fn to_spec(&self) -> Option<SweepSpec> {
        if self.f_from.is_none()
            && self.f_to.is_none()
            && self.f_steps.is_none()
            && self.phi_from.is_none()
            && self.phi_to.is_none()
            && self.phi_steps.is_none()
        {
            return None;
        }
        let mut s = SweepSpec::default();
        if let Some(v) = self.f_from {
            s.f_from = v;
        }
        if let Some(v) = self.f_to {
            s.f_to = v;
        }
        if let Some(v) = self.f_steps {
            s.f_steps = v;
        }
        if let Some(v) = self.phi_from {
            s.phi_from = v;
        }
        if let Some(v) = self.phi_to {
            s.phi_to = v;
        }
        if let Some(v) = self.phi_steps {
            s.phi_steps = v;
        }
        Some(s)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady-state emitter and detector observables
    Steady {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Zero-delay two-photon correlation of the corrected output
    G2 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Zero-delay n-photon correlation (numeric), optionally swept over the
    /// correction plane
    Gn {
        #[command(flatten)]
        common: CommonArgs,
        /// Correlation order (2-4)
        #[arg(long)]
        order: Option<usize>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Delay-resolved two-photon correlation
    #[command(name = "g2tau")]
    G2Tau {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest delay
        #[arg(long = "tau-max")]
        tau_max: Option<f64>,
        /// Delay spacing
        #[arg(long = "tau-step")]
        tau_step: Option<f64>,
    },
    /// Two-photon correlation over a correction-plane grid
    Map {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Closed-form correction settings: both cancellation branches and the
    /// divergence point
    Conditions {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Search the correction plane for the smallest or largest correlation
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Objective direction: min (default) or max
        #[arg(long)]
        kind: Option<String>,
        /// Pin the correction phase and search amplitude only
        #[arg(long = "phi-fixed", allow_negative_numbers = true)]
        phi_fixed: Option<f64>,
        /// Upper end of the amplitude search range
        #[arg(long = "f-max")]
        f_max: Option<f64>,
    },
    /// Compare closed-form and numeric correlations over a fixed probe set
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Probe-coupling and truncation sensitivity of the correlation
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Produce a bundled figure dataset and its replayable manifest
    Figures {
        /// Figure set: fig1, fig2, or fig3
        #[arg(long)]
        kind: String,
        /// Directory for the dataset files and manifest
        #[arg(long = "out-dir", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Re-execute a manifest, rewriting its files byte-identically
    Replay {
        /// Manifest produced by `figures`
        #[arg(long)]
        manifest: PathBuf,
        /// Target directory (default: the manifest's directory)
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
    },
}

enum CliError {
    Compute(heitler::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<heitler::Error> for CliError {
    fn from(e: heitler::Error) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) => e.exit_code(),
            CliError::Io(_) => 1,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_output(bytes: &str, out: Option<&Path>, summary: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| io_err(path, e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{bytes}"),
    }
    eprintln!("{summary}");
    Ok(())
}

fn run_single(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    let res = execute(cfg)?;
    write_output(&res.bytes, out, &res.summary)
}

/// Execute a manifest's entries, writing each to its `out` file under `dir`.
fn run_set(configs: &[RunConfig], dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for cfg in configs {
        let name = cfg.out.as_deref().ok_or_else(|| {
            CliError::Compute(heitler::Error::InvalidParams(format!(
                "manifest entry for '{}' has no output filename",
                cfg.command.as_str()
            )))
        })?;
        let res = execute(cfg)?;
        let path = dir.join(name);
        fs::write(&path, res.bytes).map_err(|e| io_err(&path, e))?;
        println!("wrote {}", path.display());
        eprintln!("{}", res.summary);
    }
    Ok(())
}

fn run_figures(kind: &str, out_dir: &Path) -> Result<(), CliError> {
    if !FIGURE_KINDS.contains(&kind) {
        return Err(CliError::Compute(heitler::Error::InvalidParams(format!(
            "unknown figure set '{kind}' (expected one of: {})",
            FIGURE_KINDS.join(", ")
        ))));
    }
    let configs = figure_configs(kind)?;
    run_set(&configs, out_dir)?;
    let manifest = serde_json::to_string_pretty(&configs)
        .map_err(|e| CliError::Io(format!("manifest serialization: {e}")))?;
    let path = out_dir.join(format!("{kind}_manifest.json"));
    fs::write(&path, manifest + "\n").map_err(|e| io_err(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_replay(manifest: &Path, out_dir: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(manifest).map_err(|e| io_err(manifest, e))?;
    let configs: Vec<RunConfig> = serde_json::from_str(&text).map_err(|e| {
        CliError::Compute(heitler::Error::InvalidParams(format!(
            "manifest {}: {e}",
            manifest.display()
        )))
    })?;
    let parent;
    let dir = match out_dir {
        Some(d) => d,
        None => {
            parent = manifest.parent().unwrap_or_else(|| Path::new("."));
            if parent.as_os_str().is_empty() {
                Path::new(".")
            } else {
                parent
            }
        }
    };
    run_set(&configs, dir)
}

fn run() -> Result<(), CliError> {
    match Cli::parse().cmd {
        Cmd::Steady { common } => {
            run_single(&common.to_config(CommandKind::Steady)?, common.out.as_deref())
        }
        Cmd::G2 { common } => {
            run_single(&common.to_config(CommandKind::G2)?, common.out.as_deref())
        }
        Cmd::Gn {
            common,
            order,
            sweep,
        } => {
            let mut cfg = common.to_config(CommandKind::Gn)?;
            cfg.order = order;
            cfg.sweep = sweep.to_spec();
            run_single(&cfg, common.out.as_deref())
        }
        Cmd::G2Tau {
            common,
            tau_max,
            tau_step,
        } => {
            let mut cfg = common.to_config(CommandKind::G2Tau)?;
            if tau_max.is_some() || tau_step.is_some() {
                let mut taus = TauSpec::default();
                if let Some(v) = tau_max {
                    taus.tau_max = v;
                }
                if let Some(v) = tau_step {
                    taus.tau_step = v;
                }
                cfg.taus = Some(taus);
            }
            run_single(&cfg, common.out.as_deref())
        }
        Cmd::Map { common, sweep } => {
            let mut cfg = common.to_config(CommandKind::Map)?;
            cfg.sweep = sweep.to_spec();
            run_single(&cfg, common.out.as_deref())
        }
        Cmd::Conditions { common } => run_single(
            &common.to_config(CommandKind::Conditions)?,
            common.out.as_deref(),
        ),
        Cmd::Optimize {
            common,
            kind,
            phi_fixed,
            f_max,
        } => {
            let mut cfg = common.to_config(CommandKind::Optimize)?;
            cfg.optimize = Some(OptimizeSpec {
                kind: kind.unwrap_or_else(|| "min".into()),
                phi_fixed,
                f_max,
                ..OptimizeSpec::default()
            });
            run_single(&cfg, common.out.as_deref())
        }
        Cmd::Validate { common } => run_single(
            &common.to_config(CommandKind::Validate)?,
            common.out.as_deref(),
        ),
        Cmd::Convergence { common } => run_single(
            &common.to_config(CommandKind::Convergence)?,
            common.out.as_deref(),
        ),
        Cmd::Figures { kind, out_dir } => run_figures(&kind, &out_dir),
        Cmd::Replay { manifest, out_dir } => run_replay(&manifest, out_dir.as_deref()),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
