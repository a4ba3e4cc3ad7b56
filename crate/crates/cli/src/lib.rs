//! Command-line front end for `casimir-inertia`.
//!
//! Exit status: 0 when every requested check passes, 1 on a failed check or a
//! numerical failure, 2 on a usage error.

pub mod args;
pub mod commands;
pub mod params;
pub mod report;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::Path;

use casimir_inertia::output::write_float_csv;
use serde::Serialize;

use args::{CavityArgs, Command, Format, OutputArgs};
use commands::Outcome;
use report::{json_float, manifest_path, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] casimir_inertia::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use casimir_inertia::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(E::InvalidInput(_) | E::UnsupportedModel { .. }) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv`, runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::parse(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<i32, CliError> {
    let name = command.name();
    match command {
        Command::Coeffs(a) => emit(name, a, &a.cavity, &a.output, commands::coeffs(a)?),
        Command::Force(a) => emit(name, a, &a.cavity, &a.output, commands::force(a)?),
        Command::Spectrum(a) => emit(name, a, &a.cavity, &a.output, commands::spectrum(a)?),
        Command::Simulate(a) => emit(name, a, &a.cavity, &a.output, commands::simulate(a)?),
        Command::Rigidbody(a) => emit(name, a, &a.cavity, &a.output, commands::rigidbody(a)?),
        Command::Verify(a) => emit(name, a, &a.cavity, &a.output, commands::verify(a)?),
    }
}

fn write_data(w: impl Write, format: Format, outcome: &Outcome) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let header: Vec<&str> = outcome.header.iter().map(String::as_str).collect();
            write_float_csv(w, &header, &outcome.rows)?;
        }
        Format::Json => {
            let rows: Vec<Vec<serde_json::Value>> = outcome
                .rows
                .iter()
                .map(|r| r.iter().map(|&v| json_float(v)).collect())
                .collect();
            let doc = serde_json::json!({ "columns": outcome.header, "rows": rows });
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, &doc).map_err(casimir_inertia::Error::from)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Writes data and manifest to `--out` with the report on stdout, or data to
/// stdout with the report on stderr.
fn emit<I: Serialize>(
    name: &str,
    inputs: &I,
    cavity: &CavityArgs,
    output: &OutputArgs,
    outcome: Outcome,
) -> Result<i32, CliError> {
    let report = &outcome.report;
    match &output.out {
        Some(path) => {
            write_data(
                io::BufWriter::new(std::fs::File::create(path)?),
                output.format,
                &outcome,
            )?;
            write_manifest(name, inputs, cavity, path, &outcome)?;
            report.render(&mut io::stdout().lock())?;
        }
        None => {
            write_data(io::stdout().lock(), output.format, &outcome)?;
            report.render(&mut io::stderr().lock())?;
        }
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn write_manifest<I: Serialize>(
    name: &str,
    inputs: &I,
    cavity: &CavityArgs,
    out: &Path,
    outcome: &Outcome,
) -> Result<(), CliError> {
    let mut manifest = Manifest::new(
        name,
        inputs,
        cavity.units.name(),
        cavity.tol,
        &outcome.report,
    );
    manifest.outputs.push(out.to_path_buf());
    manifest.metadata = outcome.metadata.clone();
    let file = std::fs::File::create(manifest_path(out))?;
    let mut w = io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(casimir_inertia::Error::from)?;
    writeln!(w)?;
    Ok(())
}
