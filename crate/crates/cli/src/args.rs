//! Command-line flags and the flat `key = value` configuration file.
//!
//! File entries are spliced into the argument list ahead of the user's own
//! flags; every flag overrides itself, so the command line wins.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use casimir_inertia::UnitSystem;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::params::{MirrorSpec, MotionSpec, SweepSpec};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "casimir-inertia",
    version,
    about = "Motional Casimir forces and the inertia of Casimir energy in a 1D cavity",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quasistatic stiffness, viscosity and inertia coefficients.
    Coeffs(CoeffsArgs),
    /// Static Casimir force, energy and mass correction.
    Force(ForceArgs),
    /// Susceptibility scan over frequency with pole annotations.
    Spectrum(SpectrumArgs),
    /// Motional force for a prescribed mirror trajectory.
    Simulate(SimulateArgs),
    /// Rigid-body bookkeeping of a uniformly accelerated cavity.
    Rigidbody(RigidbodyArgs),
    /// Identity checks on the quasistatic coefficients.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::Force(_) => "force",
            Command::Spectrum(_) => "spectrum",
            Command::Simulate(_) => "simulate",
            Command::Rigidbody(_) => "rigidbody",
            Command::Verify(_) => "verify",
        }
    }

    fn config_path(&self) -> Option<&Path> {
        let c = match self {
            Command::Coeffs(a) => &a.cavity,
            Command::Force(a) => &a.cavity,
            Command::Spectrum(a) => &a.cavity,
            Command::Simulate(a) => &a.cavity,
            Command::Rigidbody(a) => &a.cavity,
            Command::Verify(a) => &a.cavity,
        };
        c.config.as_deref()
    }
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct CavityArgs {
    /// Flat `key = value` file with defaults for any long flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mirror separation.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Model for both mirrors: perfect | lorentzian[:omega=<cutoff>] | file:<path>.
    #[arg(long, default_value = "perfect")]
    pub mirror: MirrorSpec,
    #[arg(long)]
    pub mirror1: Option<MirrorSpec>,
    #[arg(long)]
    pub mirror2: Option<MirrorSpec>,
    /// Cutoff for mirrors given as plain `lorentzian`.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value = "natural")]
    #[serde(serialize_with = "unit_name")]
    pub units: UnitSystem,
    /// Requested relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

fn unit_name<S: serde::Serializer>(u: &UnitSystem, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(u.name())
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct OutputArgs {
    /// Data file; a run manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    /// <q|omega>:<min>:<max>:<steps>[:log]
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    /// Override the tolerance of every identity check.
    #[arg(long)]
    pub check_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct ForceArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    /// Upper end of the scan in units of 1/τ.
    #[arg(long, default_value_t = 12.0)]
    pub omega_tau_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Delay,
    Spectral,
    Quasistatic,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Movers {
    Mirror1,
    Mirror2,
    /// Both mirrors move together.
    Both,
    /// Mirror 2 moves opposite to mirror 1.
    Opposite,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    /// pulse:amplitude=..,start=..,width=.. | sinusoid:amplitude=..,omega=..,ramp=..
    /// | acceleration:a=..,ramp=.. | velocity:v=..,ramp=..
    #[arg(long, conflicts_with = "trajectory")]
    pub motion: Option<MotionSpec>,
    #[arg(long, value_enum, default_value_t = Movers::Mirror1)]
    pub mover: Movers,
    /// Tabulated trajectory CSV with header t,dq1,dq2.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Route::Delay)]
    pub route: Route,
    /// Also run the other routes and check them against the delay series.
    #[arg(long)]
    pub compare: bool,
    /// Samples per one-way delay τ for generated trajectories.
    #[arg(long, default_value_t = 8)]
    pub samples_per_delay: usize,
    /// Record length for generated trajectories; defaults to 400τ.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub check_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct RigidbodyArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    /// Common acceleration; defaults to 1e-5 c/τ.
    #[arg(long)]
    pub accel: Option<f64>,
    /// Defaults to 50τ.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Defaults to τ/100.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub check_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Stiffness,
    Viscosity,
    Mass,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub cavity: CavityArgs,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long)]
    pub sweep: Option<SweepSpec>,
    #[arg(long)]
    pub check_tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Reads a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                n + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!(
                "{}:{}: empty key",
                path.display(),
                n + 1
            )));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

/// Turns file entries into flags for `subcommand`, rejecting unknown keys.
fn config_flags(subcommand: &str, entries: &[(String, String)]) -> Result<Vec<OsString>, CliError> {
    let root = Cli::command();
    let sub = root
        .find_subcommand(subcommand)
        .ok_or_else(|| CliError::Usage(format!("unknown command `{subcommand}`")))?;
    let mut flags = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::Usage(
                "config files cannot include other config files".into(),
            ));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| {
                CliError::Usage(format!("unknown config key `{key}` for `{subcommand}`"))
            })?;
        if arg.get_action().takes_values() {
            flags.push(OsString::from(format!("--{key}")));
            flags.push(OsString::from(value));
        } else {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => flags.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "config key `{key}` expects true or false"
                    )))
                }
            }
        }
    }
    Ok(flags)
}

/// Parses the command line, merging in the config file if one is named.
pub fn parse<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let first = Cli::try_parse_from(&argv)?;
    let Some(path) = first.command.config_path() else {
        return Ok(first);
    };
    let name = first.command.name();
    let flags = read_config_file(path)
        .and_then(|entries| config_flags(name, &entries))
        .map_err(|e| {
            Cli::command().error(clap::error::ErrorKind::ValueValidation, e.to_string())
        })?;
    // argv = [bin, subcommand, user flags...]; file flags go in between.
    let position = argv
        .iter()
        .position(|a| a.to_str() == Some(name))
        .expect("subcommand present after a successful parse");
    let mut merged: Vec<OsString> = argv[..=position].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&argv[position + 1..]);
    Cli::try_parse_from(merged)
}
