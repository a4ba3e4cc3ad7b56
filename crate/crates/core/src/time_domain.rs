//! Motional forces for prescribed mirror trajectories.
//!
//! Three routes are offered: the perfect-mirror delay series, multiplication
//! by a susceptibility on a discrete frequency grid, and the quasistatic
//! expansion in κ, λ, μ.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::cavity::CavityConfig;
use crate::error::{Error, Result};
use crate::output::{read_float_csv, write_float_csv_file};
use crate::quasistatic::QuasistaticCoefficients;
use crate::spectral::chi_perfect;
use crate::units::UnitSystem;

/// Finite-difference weights for derivatives up to order `m` at `z` from
/// nodes `x` (Fornberg's recursion). `c[j][k]` weighs node j for order k.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order `order` of uniformly sampled data: five-point
/// centered stencils in the interior, one-sided five-point closures at the
/// two ends.
pub fn stencil_derivative(f: &[f64], dt: f64, order: usize) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 samples, got {n}"
        )));
    }
    if order > 4 {
        return Err(Error::InvalidInput(
            "stencil derivatives limited to order 4".into(),
        ));
    }
    let nodes = [0.0, 1.0, 2.0, 3.0, 4.0];
    let weights: Vec<Vec<f64>> = (0..5)
        .map(|pos| {
            let c = fd_weights(pos as f64, &nodes, order);
            c.iter().map(|row| row[order]).collect()
        })
        .collect();
    let scale = dt.powi(order as i32);
    Ok((0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n - 5);
            let w = &weights[i - start];
            (0..5).map(|j| w[j] * f[start + j]).sum::<f64>() / scale
        })
        .collect())
}

/// First derivative of uniformly sampled data.
pub fn five_point_derivative(f: &[f64], dt: f64) -> Result<Vec<f64>> {
    stencil_derivative(f, dt, 1)
}

/// Septic smoothstep S(u) = 35u⁴ − 84u⁵ + 70u⁶ − 20u⁷ and its first three
/// derivatives; S is C³ at both ends.
fn smoothstep(u: f64) -> [f64; 4] {
    if u <= 0.0 {
        return [0.0; 4];
    }
    if u >= 1.0 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    let v = 1.0 - u;
    let u2 = u * u;
    [
        u2 * u2 * (35.0 - 84.0 * u + 70.0 * u2 - 20.0 * u2 * u),
        140.0 * u2 * u * v * v * v,
        420.0 * u2 * v * v * (1.0 - 2.0 * u),
        840.0 * u * v * (1.0 - 5.0 * u + 5.0 * u2),
    ]
}

/// Analytic mirror displacement with its first three time derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    Rest,
    /// Σ_k c_k (t − origin)^k.
    Polynomial {
        coefficients: Vec<f64>,
        origin: f64,
    },
    /// A sin(ωt + φ).
    Sinusoid {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// A·256[u(1 − u)]⁴ with u = (t − start)/width on [0, 1], zero elsewhere.
    Pulse {
        amplitude: f64,
        start: f64,
        width: f64,
    },
    /// `inner` multiplied by a C³ ramp rising from 0 at `start` to 1 at
    /// `start + ramp`.
    Switched {
        inner: Box<Motion>,
        start: f64,
        ramp: f64,
    },
    Sum {
        terms: Vec<Motion>,
    },
}

impl Motion {
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        Motion::Polynomial {
            coefficients,
            origin: 0.0,
        }
    }

    pub fn sinusoid(amplitude: f64, omega: f64) -> Self {
        Motion::Sinusoid {
            amplitude,
            omega,
            phase: 0.0,
        }
    }

    pub fn pulse(amplitude: f64, start: f64, width: f64) -> Self {
        Motion::Pulse {
            amplitude,
            start,
            width,
        }
    }

    pub fn switched(self, start: f64, ramp: f64) -> Self {
        Motion::Switched {
            inner: Box::new(self),
            start,
            ramp,
        }
    }

    /// Value and first three derivatives at `t`.
    pub fn jet(&self, t: f64) -> [f64; 4] {
        match self {
            Motion::Rest => [0.0; 4],
            Motion::Polynomial {
                coefficients,
                origin,
            } => {
                let s = t - origin;
                let mut out = [0.0; 4];
                for (k, &ck) in coefficients.iter().enumerate() {
                    // d^j/ds^j s^k = k!/(k−j)! s^{k−j}
                    let mut falling = 1.0;
                    for (j, o) in out.iter_mut().enumerate() {
                        if j > k {
                            break;
                        }
                        *o += ck * falling * s.powi((k - j) as i32);
                        falling *= (k - j) as f64;
                    }
                }
                out
            }
            Motion::Sinusoid {
                amplitude,
                omega,
                phase,
            } => {
                let (s, c) = (omega * t + phase).sin_cos();
                let a = *amplitude;
                [
                    a * s,
                    a * omega * c,
                    -a * omega * omega * s,
                    -a * omega.powi(3) * c,
                ]
            }
            Motion::Pulse {
                amplitude,
                start,
                width,
            } => {
                let u = (t - start) / width;
                if u <= 0.0 || u >= 1.0 {
                    return [0.0; 4];
                }
                let w = u * (1.0 - u);
                let dw = 1.0 - 2.0 * u;
                let a = 256.0 * amplitude;
                [
                    a * w.powi(4),
                    a * 4.0 * w.powi(3) * dw / width,
                    a * (12.0 * w * w * dw * dw - 8.0 * w.powi(3)) / width.powi(2),
                    a * (24.0 * w * dw.powi(3) - 72.0 * w * w * dw) / width.powi(3),
                ]
            }
            Motion::Switched { inner, start, ramp } => {
                let u = (t - start) / ramp;
                if u <= 0.0 {
                    return [0.0; 4];
                }
                let f = inner.jet(t);
                if u >= 1.0 {
                    return f;
                }
                let s = smoothstep(u);
                let s = [s[0], s[1] / ramp, s[2] / ramp.powi(2), s[3] / ramp.powi(3)];
                [
                    f[0] * s[0],
                    f[1] * s[0] + f[0] * s[1],
                    f[2] * s[0] + 2.0 * f[1] * s[1] + f[0] * s[2],
                    f[3] * s[0] + 3.0 * f[2] * s[1] + 3.0 * f[1] * s[2] + f[0] * s[3],
                ]
            }
            Motion::Sum { terms } => terms.iter().fold([0.0; 4], |mut acc, m| {
                let j = m.jet(t);
                for (a, b) in acc.iter_mut().zip(j) {
                    *a += b;
                }
                acc
            }),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Motion::Rest => "rest",
            Motion::Polynomial { .. } => "polynomial",
            Motion::Sinusoid { .. } => "sinusoid",
            Motion::Pulse { .. } => "pulse",
            Motion::Switched { inner, .. } => inner.kind_name(),
            Motion::Sum { .. } => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectorySource {
    Analytic { mirror1: Motion, mirror2: Motion },
    Tabulated,
}

/// Uniformly sampled displacements of both mirrors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub dq1: Vec<f64>,
    pub dq2: Vec<f64>,
    pub source: TrajectorySource,
}

/// Displacement and derivatives of one mirror on the trajectory grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
}

impl Trajectory {
    /// Samples two analytic motions at t0 + k·dt, k = 0..n.
    pub fn from_motion(
        t0: f64,
        dt: f64,
        n: usize,
        mirror1: Motion,
        mirror2: Motion,
    ) -> Result<Self> {
        if !(dt > 0.0) || n < 5 {
            return Err(Error::InvalidInput(
                "need dt > 0 and at least 5 samples".into(),
            ));
        }
        let times: Vec<f64> = (0..n).map(|k| t0 + k as f64 * dt).collect();
        let dq1 = times.iter().map(|&t| mirror1.jet(t)[0]).collect();
        let dq2 = times.iter().map(|&t| mirror2.jet(t)[0]).collect();
        Ok(Self {
            t0,
            dt,
            dq1,
            dq2,
            source: TrajectorySource::Analytic { mirror1, mirror2 },
        })
    }

    /// Samples with dt = τ/`per_delay` so delayed samples land on nodes.
    pub fn aligned(
        config: &CavityConfig,
        per_delay: usize,
        t0: f64,
        duration: f64,
        mirror1: Motion,
        mirror2: Motion,
    ) -> Result<Self> {
        if per_delay == 0 {
            return Err(Error::InvalidInput(
                "samples per delay must be positive".into(),
            ));
        }
        let dt = config.tau() / per_delay as f64;
        let n = (duration / dt).round() as usize + 1;
        Self::from_motion(t0, dt, n, mirror1, mirror2)
    }

    pub fn tabulated(t0: f64, dt: f64, dq1: Vec<f64>, dq2: Vec<f64>) -> Result<Self> {
        if dq1.len() != dq2.len() {
            return Err(Error::InvalidInput("dq1 and dq2 lengths differ".into()));
        }
        if dq1.len() < 5 || !(dt > 0.0) {
            return Err(Error::InvalidInput(
                "need dt > 0 and at least 5 samples".into(),
            ));
        }
        Ok(Self {
            t0,
            dt,
            dq1,
            dq2,
            source: TrajectorySource::Tabulated,
        })
    }

    pub fn len(&self) -> usize {
        self.dq1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dq1.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.t0 + k as f64 * self.dt)
            .collect()
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.source {
            TrajectorySource::Analytic { mirror1, mirror2 } => match (mirror1, mirror2) {
                (Motion::Rest, m) | (m, Motion::Rest) => m.kind_name(),
                (m, _) => m.kind_name(),
            },
            TrajectorySource::Tabulated => "tabulated",
        }
    }

    /// Analytic derivatives for declared motions, stencils for tabulated data.
    pub fn derivatives(&self, mirror: crate::Mirror) -> Result<Derivatives> {
        let samples = match mirror {
            crate::Mirror::One => &self.dq1,
            crate::Mirror::Two => &self.dq2,
        };
        match &self.source {
            TrajectorySource::Analytic { mirror1, mirror2 } => {
                let m = match mirror {
                    crate::Mirror::One => mirror1,
                    crate::Mirror::Two => mirror2,
                };
                let jets: Vec<[f64; 4]> = self.times().iter().map(|&t| m.jet(t)).collect();
                Ok(Derivatives {
                    d0: samples.clone(),
                    d1: jets.iter().map(|j| j[1]).collect(),
                    d2: jets.iter().map(|j| j[2]).collect(),
                    d3: jets.iter().map(|j| j[3]).collect(),
                })
            }
            TrajectorySource::Tabulated => Ok(Derivatives {
                d0: samples.clone(),
                d1: stencil_derivative(samples, self.dt, 1)?,
                d2: stencil_derivative(samples, self.dt, 2)?,
                d3: stencil_derivative(samples, self.dt, 3)?,
            }),
        }
    }

    /// Displacements and their first three derivatives must vanish at t0.
    pub fn check_at_rest(&self) -> Result<()> {
        let scale = self.max_displacement().max(f64::MIN_POSITIVE);
        for m in [crate::Mirror::One, crate::Mirror::Two] {
            let d = self.derivatives(m)?;
            let vals = [
                d.d0[0],
                d.d1[0] * self.dt,
                d.d2[0] * self.dt.powi(2),
                d.d3[0] * self.dt.powi(3),
            ];
            if vals.iter().any(|v| v.abs() > 1e-12 * scale) {
                return Err(Error::Precondition(format!(
                    "trajectory is not at rest at t0 = {} (mirror {:?}: {vals:?})",
                    self.t0, m
                )));
            }
        }
        Ok(())
    }

    pub fn max_displacement(&self) -> f64 {
        self.dq1
            .iter()
            .chain(&self.dq2)
            .fold(0.0f64, |a, b| a.max(b.abs()))
    }

    pub fn check_linear_response(&self, q: f64, bound: f64) -> Result<()> {
        let ratio = self.max_displacement() / q;
        if ratio >= bound {
            return Err(Error::Precondition(format!(
                "max |dq|/q = {ratio:e} breaks the linear-response bound {bound:e}"
            )));
        }
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let rows: Vec<Vec<f64>> = self
            .times()
            .into_iter()
            .zip(self.dq1.iter().zip(&self.dq2))
            .map(|(t, (a, b))| vec![t, *a, *b])
            .collect();
        write_float_csv_file(path, &TRAJECTORY_HEADER, &rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let rows = read_float_csv(path, &TRAJECTORY_HEADER)?;
        if rows.len() < 5 {
            return Err(Error::InvalidInput(
                "trajectory needs at least 5 rows".into(),
            ));
        }
        let t0 = rows[0][0];
        let dt = rows[1][0] - rows[0][0];
        for (k, r) in rows.iter().enumerate() {
            let expected = t0 + k as f64 * dt;
            if (r[0] - expected).abs() > 1e-9 * dt.abs().max(expected.abs()) {
                return Err(Error::InvalidInput(format!(
                    "row {} breaks uniform sampling",
                    k + 1
                )));
            }
        }
        Self::tabulated(
            t0,
            dt,
            rows.iter().map(|r| r[1]).collect(),
            rows.iter().map(|r| r[2]).collect(),
        )
    }
}

pub const TRAJECTORY_HEADER: [&str; 3] = ["t", "dq1", "dq2"];
pub const FORCE_HEADER: [&str; 4] = ["t", "dF1", "dF2", "dF_total"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceRecord {
    pub t: Vec<f64>,
    pub df1: Vec<f64>,
    pub df2: Vec<f64>,
    pub df_total: Vec<f64>,
}

impl ForceRecord {
    pub fn new(t: Vec<f64>, df1: Vec<f64>, df2: Vec<f64>) -> Self {
        let df_total = df1.iter().zip(&df2).map(|(a, b)| a + b).collect();
        Self {
            t,
            df1,
            df2,
            df_total,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let rows: Vec<Vec<f64>> = (0..self.len())
            .map(|k| vec![self.t[k], self.df1[k], self.df2[k], self.df_total[k]])
            .collect();
        write_float_csv_file(path, &FORCE_HEADER, &rows)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let rows = read_float_csv(path, &FORCE_HEADER)?;
        Ok(Self {
            t: rows.iter().map(|r| r[0]).collect(),
            df1: rows.iter().map(|r| r[1]).collect(),
            df2: rows.iter().map(|r| r[2]).collect(),
            df_total: rows.iter().map(|r| r[3]).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDomainOptions {
    /// Largest allowed max|dq|/q.
    pub max_relative_displacement: f64,
    /// Allowed relative mismatch between τ/dt and the nearest integer.
    pub alignment_tolerance: f64,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        Self {
            max_relative_displacement: 1e-3,
            alignment_tolerance: 1e-9,
        }
    }
}

/// Number of samples per delay τ, if dt divides τ.
fn samples_per_delay(traj: &Trajectory, tau: f64, tol: f64) -> Result<usize> {
    let ratio = tau / traj.dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > tol * ratio {
        return Err(Error::Precondition(format!(
            "sample step {} does not divide the delay {tau} (ratio {ratio})",
            traj.dt
        )));
    }
    Ok(n as usize)
}

/// Delay series for two perfect mirrors:
/// δF₁(t) = (ħ/6πc²)[δq₁‴(t) − δq₂‴(t−τ) + δq₁‴(t−2τ) − …]
///        + (ħπ/6c²τ²)[½δq₁′(t) − δq₂′(t−τ) + δq₁′(t−2τ) − …],
/// and δF₂ with the roles of the mirrors exchanged. Terms reaching before
/// t0 vanish because the trajectory starts at rest.
pub fn motional_force_perfect(
    traj: &Trajectory,
    config: &CavityConfig,
    opts: &TimeDomainOptions,
) -> Result<ForceRecord> {
    config.require_perfect("motional_force_perfect")?;
    traj.check_at_rest()?;
    traj.check_linear_response(config.q, opts.max_relative_displacement)?;
    let tau = config.tau();
    let per = samples_per_delay(traj, tau, opts.alignment_tolerance)?;
    let (hbar, c) = (config.hbar(), config.c());
    let a = hbar / (6.0 * PI * c * c);
    let b = hbar * PI / (6.0 * c * c * tau * tau);
    let m1 = traj.derivatives(crate::Mirror::One)?;
    let m2 = traj.derivatives(crate::Mirror::Two)?;
    let series = |own: &Derivatives, other: &Derivatives| -> Vec<f64> {
        (0..traj.len())
            .into_par_iter()
            .map(|k| {
                let mut sum = 0.0;
                let mut n = 0usize;
                while n * per <= k {
                    let idx = k - n * per;
                    let src = if n % 2 == 0 { own } else { other };
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let weight = if n == 0 { 0.5 } else { 1.0 };
                    sum += sign * (a * src.d3[idx] + b * weight * src.d1[idx]);
                    n += 1;
                }
                sum
            })
            .collect()
    };
    let df1 = series(&m1, &m2);
    let df2 = series(&m2, &m1);
    Ok(ForceRecord::new(traj.times(), df1, df2))
}

/// Motional force on each mirror alone in vacuum, δF_i = (ħ/6πc²)δq_i‴.
pub fn motional_force_single_mirror(traj: &Trajectory, units: UnitSystem) -> Result<ForceRecord> {
    let a = units.hbar() / (6.0 * PI * units.c().powi(2));
    let d1 = traj.derivatives(crate::Mirror::One)?;
    let d2 = traj.derivatives(crate::Mirror::Two)?;
    Ok(ForceRecord::new(
        traj.times(),
        d1.d3.iter().map(|x| a * x).collect(),
        d2.d3.iter().map(|x| a * x).collect(),
    ))
}

/// Susceptibility matrices that can drive the spectral route.
#[derive(Debug, Clone, PartialEq)]
pub enum SusceptibilitySource {
    /// Closed-form matrix of a perfect cavity.
    Perfect(CavityConfig),
    /// Two uncoupled mirrors in vacuum, χ_ii = iħω³/6πc².
    SingleMirror(UnitSystem),
}

impl SusceptibilitySource {
    fn matrix(&self, omega: f64) -> Result<[[Complex64; 2]; 2]> {
        match self {
            SusceptibilitySource::Perfect(c) => Ok(chi_perfect(c, omega)?.chi),
            SusceptibilitySource::SingleMirror(u) => {
                let x = Complex64::new(0.0, u.hbar() * omega.powi(3) / (6.0 * PI * u.c().powi(2)));
                let z = Complex64::new(0.0, 0.0);
                Ok([[x, z], [z, x]])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    /// Transform length is the next power of two above `padding`·n.
    pub padding: usize,
    /// Drop grid frequencies that hit a pole instead of failing.
    pub exclude_poles: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            padding: 4,
            exclude_poles: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedBin {
    pub omega: f64,
    /// Resonance index of the pole hit.
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralForce {
    pub record: ForceRecord,
    pub excluded: Vec<ExcludedBin>,
}

/// δF_i[ω] = Σ_j χ_ij[ω] δq_j[ω] on a zero-padded discrete grid.
///
/// With f(t) = ∫ f[ω]e^{−iωt} dω/2π, forward DFT bin k holds the physical
/// frequency −ω_k, so it is multiplied by χ[−ω_k].
pub fn motional_force_spectral(
    traj: &Trajectory,
    source: &SusceptibilitySource,
    opts: &SpectralOptions,
) -> Result<SpectralForce> {
    let n = traj.len();
    let m = (opts.padding.max(1) * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let spectrum = |x: &[f64]| {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(m, Complex64::new(0.0, 0.0));
        fwd.process(&mut buf);
        buf
    };
    let q1 = spectrum(&traj.dq1);
    let q2 = spectrum(&traj.dq2);
    let dw = 2.0 * PI / (m as f64 * traj.dt);

    let bins: Vec<Result<Option<[[Complex64; 2]; 2]>>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let signed = if k <= m / 2 {
                k as f64
            } else {
                k as f64 - m as f64
            };
            match source.matrix(-signed * dw) {
                Ok(chi) => Ok(Some(chi)),
                Err(Error::Pole { .. }) if opts.exclude_poles => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut f1 = vec![Complex64::new(0.0, 0.0); m];
    let mut f2 = vec![Complex64::new(0.0, 0.0); m];
    let mut excluded = Vec::new();
    for (k, b) in bins.into_iter().enumerate() {
        let signed = if k <= m / 2 {
            k as f64
        } else {
            k as f64 - m as f64
        };
        match b? {
            Some(mut chi) => {
                if 2 * k == m {
                    // Nyquist bin must stay real.
                    for row in chi.iter_mut() {
                        for v in row.iter_mut() {
                            *v = Complex64::new(v.re, 0.0);
                        }
                    }
                }
                f1[k] = chi[0][0] * q1[k] + chi[0][1] * q2[k];
                f2[k] = chi[1][0] * q1[k] + chi[1][1] * q2[k];
            }
            None => {
                let omega = -signed * dw;
                let tau = match source {
                    SusceptibilitySource::Perfect(c) => c.tau(),
                    SusceptibilitySource::SingleMirror(_) => f64::NAN,
                };
                excluded.push(ExcludedBin {
                    omega,
                    index: (omega * tau / PI).round() as i64,
                });
            }
        }
    }
    inv.process(&mut f1);
    inv.process(&mut f2);
    let scale = 1.0 / m as f64;
    let df1 = f1[..n].iter().map(|z| z.re * scale).collect();
    let df2 = f2[..n].iter().map(|z| z.re * scale).collect();
    Ok(SpectralForce {
        record: ForceRecord::new(traj.times(), df1, df2),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasistaticForce {
    pub record: ForceRecord,
    /// Fraction of the displacement spectral energy below ωτ = 0.2.
    pub low_frequency_fraction: f64,
    /// Set when less than 99% of the energy lies below ωτ = 0.2.
    pub warning: Option<String>,
}

/// Spectral-energy fraction of both displacement records below ω_max.
fn energy_fraction_below(traj: &Trajectory, omega_max: f64) -> f64 {
    let n = traj.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut below = 0.0;
    let mut total = 0.0;
    for x in [&traj.dq1, &traj.dq2] {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.process(&mut buf);
        for (k, z) in buf.iter().enumerate() {
            let signed = if k <= n / 2 {
                k as f64
            } else {
                n as f64 - k as f64
            };
            let w = 2.0 * PI * signed / (n as f64 * traj.dt);
            let e = z.norm_sqr();
            total += e;
            if w <= omega_max {
                below += e;
            }
        }
    }
    if total == 0.0 {
        1.0
    } else {
        below / total
    }
}

/// δF_i = −Σ_j (κ_ij δq_j + λ_ij δq_j′ + μ_ij δq_j″).
pub fn quasistatic_force(
    traj: &Trajectory,
    coeffs: &QuasistaticCoefficients,
    tau: f64,
) -> Result<QuasistaticForce> {
    let d = [
        traj.derivatives(crate::Mirror::One)?,
        traj.derivatives(crate::Mirror::Two)?,
    ];
    let force = |i: usize| -> Vec<f64> {
        (0..traj.len())
            .map(|k| {
                -(0..2)
                    .map(|j| {
                        coeffs.kappa[i][j] * d[j].d0[k]
                            + coeffs.lambda[i][j] * d[j].d1[k]
                            + coeffs.mu[i][j] * d[j].d2[k]
                    })
                    .sum::<f64>()
            })
            .collect()
    };
    let fraction = energy_fraction_below(traj, 0.2 / tau);
    let warning = (fraction < 0.99).then(|| {
        format!(
            "only {:.4}% of the displacement spectrum lies below omega*tau = 0.2",
            100.0 * fraction
        )
    });
    Ok(QuasistaticForce {
        record: ForceRecord::new(traj.times(), force(0), force(1)),
        low_frequency_fraction: fraction,
        warning,
    })
}

/// Delay-series forces for many trajectories in parallel.
pub fn motional_force_perfect_batch(
    trajs: &[Trajectory],
    config: &CavityConfig,
    opts: &TimeDomainOptions,
) -> Vec<Result<ForceRecord>> {
    trajs
        .par_iter()
        .map(|t| motional_force_perfect(t, config, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fornberg_reproduces_textbook_stencils() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let c = fd_weights(0.0, &x, 3);
        let first: Vec<f64> = c.iter().map(|r| r[1] * 12.0).collect();
        for (a, b) in first.iter().zip([1.0, -8.0, 0.0, 8.0, -1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let third: Vec<f64> = c.iter().map(|r| r[3] * 2.0).collect();
        for (a, b) in third.iter().zip([-1.0, 2.0, 0.0, -2.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stencils_are_exact_on_quartics() {
        let dt = 0.1;
        let f: Vec<f64> = (0..12)
            .map(|k| (k as f64 * dt).powi(4) - 2.0 * (k as f64 * dt))
            .collect();
        let d1 = stencil_derivative(&f, dt, 1).unwrap();
        let d3 = stencil_derivative(&f, dt, 3).unwrap();
        for k in 0..12 {
            let t = k as f64 * dt;
            assert!((d1[k] - (4.0 * t.powi(3) - 2.0)).abs() < 1e-9);
            assert!((d3[k] - 24.0 * t).abs() < 1e-7, "{k} {}", d3[k]);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let motions = [
            Motion::pulse(1.0, 0.0, 3.0),
            Motion::sinusoid(0.5, 1.3).switched(0.2, 2.0),
            Motion::polynomial(vec![0.0, 0.0, 0.5]).switched(0.0, 2.5),
        ];
        let h = 1e-3;
        for m in &motions {
            for &t in &[0.7, 1.4, 2.1] {
                let j = m.jet(t);
                for k in 0..3 {
                    let fd = (m.jet(t + h)[k] - m.jet(t - h)[k]) / (2.0 * h);
                    assert!(
                        (fd - j[k + 1]).abs() < 1e-4 * (1.0 + j[k + 1].abs()),
                        "{m:?} t={t} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn smoothstep_is_c3() {
        let s0 = smoothstep(1e-12);
        let s1 = smoothstep(1.0 - 1e-12);
        assert!(s0.iter().all(|v| v.abs() < 1e-8));
        assert!((s1[0] - 1.0).abs() < 1e-12 && s1[1..].iter().all(|v| v.abs() < 1e-8));
    }

    fn perfect() -> CavityConfig {
        CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap()
    }

    #[test]
    fn not_at_rest_is_rejected() {
        let c = perfect();
        let t = Trajectory::aligned(&c, 4, 0.0, 10.0, Motion::sinusoid(1e-5, 0.1), Motion::Rest)
            .unwrap();
        assert!(matches!(
            motional_force_perfect(&t, &c, &TimeDomainOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn misaligned_step_is_rejected() {
        let c = perfect();
        let t = Trajectory::from_motion(0.0, 0.3, 50, Motion::pulse(1e-5, 1.0, 5.0), Motion::Rest)
            .unwrap();
        assert!(matches!(
            motional_force_perfect(&t, &c, &TimeDomainOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn first_terms_of_the_series() {
        // Before the first echo returns only the n = 0 terms contribute.
        let c = perfect();
        let m = Motion::pulse(1e-5, 0.0, 0.8);
        let t = Trajectory::aligned(&c, 10, 0.0, 0.9, m.clone(), Motion::Rest).unwrap();
        let f = motional_force_perfect(&t, &c, &TimeDomainOptions::default()).unwrap();
        for (k, &tk) in t.times().iter().enumerate() {
            let j = m.jet(tk);
            let expected = j[3] / (6.0 * PI) + PI / 12.0 * j[1];
            assert_relative_eq!(f.df1[k], expected, epsilon = 1e-18, max_relative = 1e-12);
        }
    }

    #[test]
    fn csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let c = perfect();
        let t = Trajectory::aligned(
            &c,
            4,
            0.0,
            10.0,
            Motion::pulse(1e-5, 1.0, 5.0),
            Motion::Rest,
        )
        .unwrap();
        let p = dir.path().join("traj.csv");
        t.write_csv(&p).unwrap();
        let back = Trajectory::read_csv(&p).unwrap();
        assert_eq!(back.dq1, t.dq1);
        let f = motional_force_perfect(&t, &c, &TimeDomainOptions::default()).unwrap();
        let pf = dir.path().join("force.csv");
        f.write_csv(&pf).unwrap();
        assert_eq!(ForceRecord::read_csv(&pf).unwrap(), f);
    }
}
