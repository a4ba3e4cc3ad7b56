//! Verdict tables and the JSON run manifest.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use casimir_inertia::output::format_float;
use casimir_inertia::quasistatic::relative_gap;
use serde::Serialize;

/// One identity check: `lhs` against `rhs` with the gap judged against `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Gap supplied by the caller, for checks whose scale is not `max(|lhs|, |rhs|)`.
    pub fn with_gap(name: impl Into<String>, lhs: f64, rhs: f64, gap: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            gap,
            tolerance,
            pass: gap <= tolerance,
        }
    }

    pub fn relative(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::with_gap(name, lhs, rhs, relative_gap(lhs, rhs), tolerance)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    /// Headline values, printed as `name = value`.
    pub values: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Largest quadrature error estimate met along the run.
    pub achieved_tolerance: f64,
}

impl Report {
    pub fn value(&mut self, name: impl Into<String>, v: f64) {
        self.values.push((name.into(), v));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn achieved(&mut self, t: f64) {
        if t > self.achieved_tolerance || t.is_nan() {
            self.achieved_tolerance = t;
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable summary: values, a verdict table, one line per check.
    pub fn render(&self, w: &mut impl Write) -> io::Result<()> {
        for (name, v) in &self.values {
            writeln!(w, "{name} = {}", fmt_short(*v))?;
        }
        for warning in &self.warnings {
            writeln!(w, "warning: {warning}")?;
        }
        if self.checks.is_empty() {
            writeln!(w, "no checks requested")?;
            return Ok(());
        }
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        writeln!(
            w,
            "{:<width$}  {:>16}  {:>16}  {:>10}  {:>10}  verdict",
            "name", "lhs", "rhs", "gap", "tol"
        )?;
        for c in &self.checks {
            writeln!(
                w,
                "{:<width$}  {:>16}  {:>16}  {:>10.3e}  {:>10.3e}  {}",
                c.name,
                fmt_short(c.lhs),
                fmt_short(c.rhs),
                c.gap,
                c.tolerance,
                verdict(c.pass)
            )?;
        }
        for c in &self.checks {
            writeln!(w, "{}: {}", c.name, verdict(c.pass))?;
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        writeln!(w, "{passed} of {} checks passed", self.checks.len())
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn fmt_short(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        format!("{v:.10}")
    } else {
        format!("{v:.9e}")
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, I: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub inputs: &'a I,
    pub units: &'a str,
    pub requested_tolerance: f64,
    pub achieved_tolerance: f64,
    pub values: serde_json::Map<String, serde_json::Value>,
    pub checks: &'a [Check],
    pub all_pass: bool,
    pub warnings: &'a [String],
    pub outputs: Vec<PathBuf>,
    pub metadata: serde_json::Value,
}

impl<'a, I: Serialize> Manifest<'a, I> {
    pub fn new(
        command: &'a str,
        inputs: &'a I,
        units: &'a str,
        requested: f64,
        report: &'a Report,
    ) -> Self {
        let values = report
            .values
            .iter()
            .map(|(k, v)| (k.clone(), json_float(*v)))
            .collect();
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            inputs,
            units,
            requested_tolerance: requested,
            achieved_tolerance: report.achieved_tolerance,
            values,
            checks: &report.checks,
            all_pass: report.all_pass(),
            warnings: &report.warnings,
            outputs: Vec::new(),
            metadata: serde_json::Value::Null,
        }
    }
}

/// Non-finite floats become strings so the manifest stays valid JSON.
pub fn json_float(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(format_float(v)))
}

/// `<out>.manifest.json` beside the data file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
