//! One function per subcommand. Each returns the data table, the report and
//! any extra manifest metadata; writing them out is shared.

use casimir_inertia::quadrature::Tolerance;
use casimir_inertia::quasistatic::{
    casimir_statics, coefficients, force_derivative, global_mass_routes, CasimirStatics,
    CoefficientRow, GlobalMass, QuadratureOptions, QuasistaticCoefficients, COEFFICIENT_HEADER,
};
use casimir_inertia::rigid_body::{
    simulate_accelerated_cavity, RigidBodyState, SimulationLimits, TRACE_HEADER,
};
use casimir_inertia::spectral::{spectrum_scan, SPECTRUM_HEADER};
use casimir_inertia::time_domain::{
    motional_force_perfect, motional_force_spectral, quasistatic_force, ForceRecord, Motion,
    SpectralOptions, SusceptibilitySource, TimeDomainOptions, Trajectory, FORCE_HEADER,
};
use casimir_inertia::{CavityConfig, MirrorKind};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{
    CavityArgs, CoeffsArgs, ForceArgs, Movers, RigidbodyArgs, Route, SimulateArgs, SpectrumArgs,
    Suite, VerifyArgs,
};
use crate::params::{MotionSpec, SweepParam, SweepSpec};
use crate::report::{Check, Report};
use crate::CliError;

pub struct Outcome {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub report: Report,
    pub metadata: serde_json::Value,
}

impl Outcome {
    fn new(header: &[&str], rows: Vec<Vec<f64>>, report: Report) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            report,
            metadata: serde_json::Value::Null,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// The cavity described by the flags, before any sweep.
pub fn cavity(args: &CavityArgs) -> Result<CavityConfig, CliError> {
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(usage(format!("--tol must lie in (0, 1), got {}", args.tol)));
    }
    let m1 = args
        .mirror1
        .as_ref()
        .unwrap_or(&args.mirror)
        .build(args.omega)
        .map_err(usage)?;
    let m2 = args
        .mirror2
        .as_ref()
        .unwrap_or(&args.mirror)
        .build(args.omega)
        .map_err(usage)?;
    Ok(CavityConfig::new(args.q, m1, m2, args.units)?)
}

fn quadrature(args: &CavityArgs) -> QuadratureOptions {
    QuadratureOptions::with_rel_tolerance(args.tol)
}

/// One configuration per sweep point, in sweep order.
fn sweep_configs(
    base: &CavityConfig,
    sweep: Option<&SweepSpec>,
) -> Result<Vec<CavityConfig>, CliError> {
    let Some(s) = sweep else {
        return Ok(vec![base.clone()]);
    };
    s.values()
        .into_iter()
        .map(|v| match s.param {
            SweepParam::Q => Ok(base.with_separation(v)?),
            SweepParam::Omega => {
                let mut c = base.clone();
                let mut any = false;
                for m in [&mut c.mirror1, &mut c.mirror2] {
                    if let MirrorKind::Lorentzian { .. } = m.kind {
                        *m = casimir_inertia::MirrorModel::lorentzian(v)?
                            .with_label(m.label.clone());
                        any = true;
                    }
                }
                if !any {
                    return Err(usage("an omega sweep needs at least one lorentzian mirror"));
                }
                Ok(c)
            }
        })
        .collect()
}

/// Suffix distinguishing the checks of different sweep points.
fn tag(name: &str, k: usize, n: usize) -> String {
    if n > 1 {
        format!("{name}@{k}")
    } else {
        name.to_string()
    }
}

fn header_line(configs: &[CavityConfig]) -> serde_json::Value {
    json!(configs
        .iter()
        .map(|c| json!({
            "q": c.q,
            "tau": c.tau(),
            "mirror1": c.mirror1.to_string(),
            "mirror2": c.mirror2.to_string(),
        }))
        .collect::<Vec<_>>())
}

fn mu_tolerance(config: &CavityConfig) -> f64 {
    if config.both_perfect() {
        1e-12
    } else {
        1e-6
    }
}

pub fn coeffs(args: &CoeffsArgs) -> Result<Outcome, CliError> {
    let base = cavity(&args.cavity)?;
    let configs = sweep_configs(&base, args.sweep.as_ref())?;
    let opts = quadrature(&args.cavity);
    let rows: Vec<CoefficientRow> = configs
        .par_iter()
        .map(|c| CoefficientRow::evaluate(c, &opts))
        .collect::<Result<_, _>>()?;

    let mut report = Report::default();
    let n = rows.len();
    for (k, (row, config)) in rows.iter().zip(&configs).enumerate() {
        let c = &row.coefficients;
        let c2 = config.c().powi(2);
        report.achieved(c.achieved_tolerance.max(row.statics.achieved_tolerance));
        if n == 1 {
            report.value("kappa11", c.kappa[0][0]);
            report.value("kappa12", c.kappa[0][1]);
            report.value("lambda11", c.lambda[0][0]);
            report.value("lambda12", c.lambda[0][1]);
            report.value("mu11", c.mu[0][0]);
            report.value("mu12", c.mu[0][1]);
            report.value("mu_sum", c.mu_sum);
            report.value("F", row.statics.force);
            if let Some(u) = row.statics.energy {
                report.value("U", u);
            }
        }
        let tol = |default: f64| args.check_tol.unwrap_or(default);
        report.check(Check::relative(
            tag("mu_eq_minus_2Fq_over_c2", k, n),
            c.mu_sum,
            -2.0 * row.statics.force * config.q / c2,
            tol(mu_tolerance(config)),
        ));
        if let Some(u) = row.statics.energy {
            report.check(Check::relative(
                tag("mu_c2_eq_2U", k, n),
                c.mu_sum * c2,
                2.0 * u,
                tol(1e-12),
            ));
        }
    }
    let mut out = Outcome::new(
        &COEFFICIENT_HEADER,
        rows.iter().map(CoefficientRow::values).collect(),
        report,
    );
    out.metadata = json!({ "points": header_line(&configs) });
    Ok(out)
}

pub fn force(args: &ForceArgs) -> Result<Outcome, CliError> {
    let base = cavity(&args.cavity)?;
    let configs = sweep_configs(&base, args.sweep.as_ref())?;
    let opts = quadrature(&args.cavity);
    let statics: Vec<CasimirStatics> = configs
        .par_iter()
        .map(|c| casimir_statics(c, &opts))
        .collect::<Result<_, _>>()?;

    let mut report = Report::default();
    let rows = statics
        .iter()
        .zip(&configs)
        .map(|(s, c)| {
            report.achieved(s.achieved_tolerance);
            vec![
                c.q,
                c.mirror1.cutoff().unwrap_or(f64::INFINITY),
                s.force,
                s.energy.unwrap_or(f64::NAN),
                s.field_energy,
                s.mass_correction,
            ]
        })
        .collect();
    if let [s] = statics.as_slice() {
        report.value("F", s.force);
        if let Some(u) = s.energy {
            report.value("U", u);
        }
        report.value("field_energy", s.field_energy);
        report.value("mass_correction", s.mass_correction);
    }
    let mut out = Outcome::new(
        &[
            "q",
            "omega_cutoff",
            "F",
            "U",
            "field_energy",
            "mass_correction",
        ],
        rows,
        report,
    );
    out.metadata = json!({ "points": header_line(&configs) });
    Ok(out)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome, CliError> {
    let config = cavity(&args.cavity)?;
    let tol = Tolerance::new(Tolerance::default().abs, args.cavity.tol);
    let scan = spectrum_scan(&config, args.omega_tau_max, args.steps, &tol)?;
    let mut report = Report::default();
    report.achieved(scan.achieved_error);
    for p in &scan.poles {
        report.value(format!("pole_{}_omega_tau", p.index), p.omega_tau);
    }
    if !scan.excluded.is_empty() {
        report.warnings.push(format!(
            "{} grid frequencies fell inside pole exclusion bands",
            scan.excluded.len()
        ));
    }
    let mut out = Outcome::new(&SPECTRUM_HEADER, scan.csv_rows(), report);
    out.metadata = scan.metadata();
    Ok(out)
}

fn trajectory(args: &SimulateArgs, config: &CavityConfig) -> Result<Trajectory, CliError> {
    if let Some(path) = &args.trajectory {
        return Ok(Trajectory::read_csv(path)?);
    }
    let tau = config.tau();
    let spec = args.motion.clone().unwrap_or(MotionSpec::Pulse {
        amplitude: None,
        start: None,
        width: None,
    });
    let build = |sign: f64| spec.build(config.q, tau, sign).map_err(usage);
    let (m1, m2) = match args.mover {
        Movers::Mirror1 => (build(1.0)?, Motion::Rest),
        Movers::Mirror2 => (Motion::Rest, build(1.0)?),
        Movers::Both => (build(1.0)?, build(1.0)?),
        Movers::Opposite => (build(1.0)?, build(-1.0)?),
    };
    let duration = args.duration.unwrap_or(400.0 * tau);
    if !(duration > 0.0) {
        return Err(usage("--duration must be positive"));
    }
    Ok(Trajectory::aligned(
        config,
        args.samples_per_delay,
        0.0,
        duration,
        m1,
        m2,
    )?)
}

/// max_t |a − b| over both mirrors, relative to max_t |a|.
fn record_gap(a: &ForceRecord, b: &ForceRecord) -> (f64, f64) {
    let scale = a
        .df1
        .iter()
        .chain(&a.df2)
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let diff = a
        .df1
        .iter()
        .zip(&b.df1)
        .chain(a.df2.iter().zip(&b.df2))
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let gap = if scale == 0.0 { diff } else { diff / scale };
    (scale, gap)
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let config = cavity(&args.cavity)?;
    let traj = trajectory(args, &config)?;
    let mut report = Report::default();

    let delay = || motional_force_perfect(&traj, &config, &TimeDomainOptions::default());
    let spectral = |report: &mut Report| -> Result<ForceRecord, CliError> {
        let f = motional_force_spectral(
            &traj,
            &SusceptibilitySource::Perfect(config.clone()),
            &SpectralOptions::default(),
        )?;
        if !f.excluded.is_empty() {
            report.warnings.push(format!(
                "{} spectral bins at cavity poles were dropped",
                f.excluded.len()
            ));
        }
        Ok(f.record)
    };
    let quasistatic = |report: &mut Report| -> Result<ForceRecord, CliError> {
        let coeffs: QuasistaticCoefficients = coefficients(&config, &quadrature(&args.cavity))?;
        report.achieved(coeffs.achieved_tolerance);
        let f = quasistatic_force(&traj, &coeffs, config.tau())?;
        report.warnings.extend(f.warning);
        Ok(f.record)
    };

    let record = match args.route {
        Route::Delay => delay()?,
        Route::Spectral => spectral(&mut report)?,
        Route::Quasistatic => quasistatic(&mut report)?,
    };
    if args.compare {
        let reference = match args.route {
            Route::Delay => record.clone(),
            _ => delay()?,
        };
        let other = match args.route {
            Route::Spectral => record.clone(),
            _ => spectral(&mut report)?,
        };
        let (scale, gap) = record_gap(&reference, &other);
        report.check(Check::with_gap(
            "delay_vs_spectral",
            scale,
            scale * (1.0 + gap),
            gap,
            args.check_tol.unwrap_or(1e-4),
        ));
        let other = match args.route {
            Route::Quasistatic => record.clone(),
            _ => quasistatic(&mut report)?,
        };
        let (_, gap) = record_gap(&reference, &other);
        report.check(Check::with_gap(
            "delay_vs_quasistatic",
            scale,
            scale * (1.0 + gap),
            gap,
            args.check_tol.unwrap_or(1e-2),
        ));
    }
    report.value("samples", traj.len() as f64);
    report.value("dt", traj.dt);
    report.value("max_abs_dq", traj.max_displacement());
    let peak = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    report.value("max_abs_dF1", peak(&record.df1));
    report.value("max_abs_dF2", peak(&record.df2));
    report.value(
        "final_dF_total",
        record.df_total.last().copied().unwrap_or(0.0),
    );

    let rows = (0..record.len())
        .map(|k| {
            vec![
                record.t[k],
                record.df1[k],
                record.df2[k],
                record.df_total[k],
            ]
        })
        .collect();
    let mut out = Outcome::new(&FORCE_HEADER, rows, report);
    out.metadata = json!({
        "tau": config.tau(),
        "trajectory": traj.source,
        "route": args.route,
        "mover": args.mover,
    });
    Ok(out)
}

pub fn rigidbody(args: &RigidbodyArgs) -> Result<Outcome, CliError> {
    let config = cavity(&args.cavity)?;
    let opts = quadrature(&args.cavity);
    let statics = casimir_statics(&config, &opts)?;
    let (c, tau) = (config.c(), config.tau());
    let initial = RigidBodyState::at_rest(
        args.m1,
        args.m2,
        0.0,
        config.q,
        statics.field_energy,
        statics.force,
        c,
    )?;
    let accel = args.accel.unwrap_or(1e-5 * c / tau);
    let trace = simulate_accelerated_cavity(
        &initial,
        accel,
        args.duration.unwrap_or(50.0 * tau),
        args.dt.unwrap_or(0.01 * tau),
        &SimulationLimits::default(),
    )?;

    let mut report = Report::default();
    report.achieved(statics.achieved_tolerance);
    let total = trace.bare_mass + trace.mass_correction;
    let dm_expected = -2.0 * statics.force * config.q / (c * c);
    report.value("bare_mass", trace.bare_mass);
    report.value("mass_correction", trace.mass_correction);
    report.value("max_energy_drift", trace.max_energy_drift);
    let tol = |default: f64| args.check_tol.unwrap_or(default);
    report.check(Check::with_gap(
        "c2P_eq_EQprime",
        trace.max_relative_residual,
        0.0,
        trace.max_relative_residual,
        tol(1e-9),
    ));
    let inertial = trace
        .samples
        .get(trace.samples.len() / 2)
        .map(|s| s.inertial_mass)
        .unwrap_or(f64::NAN);
    report.check(Check::with_gap(
        "inertial_mass_eq_m_plus_dm",
        inertial,
        total,
        trace.max_mass_gap,
        tol(1e-6),
    ));
    report.check(Check::relative(
        "dm_eq_minus_2Fq_over_c2",
        trace.mass_correction,
        dm_expected,
        tol(1e-12),
    ));
    let mut out = Outcome::new(&TRACE_HEADER, trace.csv_rows(), report);
    out.metadata = json!({ "tau": tau, "acceleration": accel, "force": statics.force });
    Ok(out)
}

struct VerifyPoint {
    coeffs: QuasistaticCoefficients,
    statics: CasimirStatics,
    d_force: f64,
    mass: GlobalMass,
}

fn verify_point(config: &CavityConfig, opts: &QuadratureOptions) -> Result<VerifyPoint, CliError> {
    Ok(VerifyPoint {
        coeffs: coefficients(config, opts)?,
        statics: casimir_statics(config, opts)?,
        d_force: force_derivative(config, opts, 1e-4)?,
        mass: global_mass_routes(config, opts)?,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let base = cavity(&args.cavity)?;
    let configs = sweep_configs(&base, args.sweep.as_ref())?;
    let opts = quadrature(&args.cavity);
    let points: Vec<VerifyPoint> = configs
        .par_iter()
        .map(|c| verify_point(c, &opts))
        .collect::<Result<_, _>>()?;

    let run = |s: Suite| args.suite == Suite::All || args.suite == s;
    let tol = |default: f64| args.check_tol.unwrap_or(default);
    let mut report = Report::default();
    let mut header: Vec<String> = vec!["q".into(), "omega_cutoff".into()];
    let mut rows = Vec::new();
    let n = points.len();
    for (k, (p, config)) in points.iter().zip(&configs).enumerate() {
        let mut checks = Vec::new();
        let c = &p.coeffs;
        let k11 = c.kappa[0][0];
        let c2 = config.c().powi(2);
        report.achieved(
            c.achieved_tolerance
                .max(p.statics.achieved_tolerance)
                .max(p.mass.achieved_tolerance),
        );
        if run(Suite::Stiffness) {
            checks.push(Check::relative(
                "kappa11_eq_dFdq",
                k11,
                p.d_force,
                tol(1e-5),
            ));
            checks.push(Check::relative(
                "kappa11_eq_minus_kappa12",
                k11,
                -c.kappa[0][1],
                tol(1e-10),
            ));
            checks.push(Check::with_gap(
                "kappa_sum",
                c.kappa_sum,
                0.0,
                c.kappa_sum.abs() / k11.abs(),
                tol(1e-10),
            ));
        }
        if run(Suite::Viscosity) {
            let scale = k11.abs() * config.tau();
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let l = c.lambda[i][j];
                checks.push(Check::with_gap(
                    format!("lambda{}{}", i + 1, j + 1),
                    l,
                    0.0,
                    l.abs() / scale,
                    tol(1e-8),
                ));
            }
            checks.push(Check::with_gap(
                "lambda_sum",
                c.lambda_sum,
                0.0,
                c.lambda_sum.abs() / scale,
                tol(1e-8),
            ));
        }
        if run(Suite::Mass) {
            checks.push(Check::relative(
                "mu_eq_minus_2Fq_over_c2",
                c.mu_sum,
                -2.0 * p.statics.force * config.q / c2,
                tol(mu_tolerance(config)),
            ));
            checks.push(Check::with_gap(
                "mu_dual_route",
                p.mass.via_gamma_sum,
                p.mass.via_force,
                p.mass.relative_gap,
                tol(1e-6),
            ));
            if let Some(u) = p.statics.energy {
                checks.push(Check::relative(
                    "mu_c2_eq_2U",
                    c.mu_sum * c2,
                    2.0 * u,
                    tol(1e-12),
                ));
            }
        }
        if k == 0 {
            header.extend(checks.iter().map(|ch| format!("gap_{}", ch.name)));
        }
        let mut row = vec![config.q, config.mirror1.cutoff().unwrap_or(f64::INFINITY)];
        row.extend(checks.iter().map(|ch| ch.gap));
        rows.push(row);
        for mut ch in checks {
            ch.name = tag(&ch.name, k, n);
            report.check(ch);
        }
        if n == 1 {
            report.value("kappa11", k11);
            report.value("dF_dq", p.d_force);
            report.value("mu_sum", c.mu_sum);
            report.value("F", p.statics.force);
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = Outcome::new(&header_refs, rows, report);
    out.metadata = json!({ "suite": args.suite, "points": header_line(&configs) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_gap_is_relative_to_the_reference() {
        let a = ForceRecord::new(vec![0.0, 1.0], vec![0.0, 2.0], vec![0.0, -1.0]);
        let b = ForceRecord::new(vec![0.0, 1.0], vec![0.0, 2.0], vec![0.1, -1.0]);
        let (scale, gap) = record_gap(&a, &b);
        assert_eq!(scale, 2.0);
        assert!((gap - 0.05).abs() < 1e-15);
    }

    #[test]
    fn tags_only_when_sweeping() {
        assert_eq!(tag("x", 3, 1), "x");
        assert_eq!(tag("x", 3, 5), "x@3");
    }
}
