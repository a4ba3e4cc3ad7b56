//! Inertia of a stressed rigid body: two mirrors held apart against the
//! Casimir force while both follow a prescribed common velocity.
//!
//! The bookkeeping follows p_i = e_i q_i′/c² and e_i′ = F_i q_i′ with
//! F₁ = +F, F₂ = −F. The total momentum is
//! c²P = e₁q₁′ + e₂q₂′ + (E_f − Fq)(q₁′ + q₂′)/2 and the center of inertia
//! is EQ = e₁q₁ + e₂q₂ + E_f(q₁ + q₂)/2.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::write_float_csv_file;
use crate::time_domain::five_point_derivative;

/// δm = (E_f − Fq)/c².
pub fn mass_correction(field_energy: f64, force: f64, q: f64, c: f64) -> f64 {
    (field_energy - force * q) / (c * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyState {
    pub t: f64,
    pub q1: f64,
    pub q2: f64,
    /// Common velocity q₁′ = q₂′.
    pub v: f64,
    pub e1: f64,
    pub e2: f64,
    pub field_energy: f64,
    /// Static Casimir force F (attraction positive).
    pub force: f64,
    pub c: f64,
}

impl RigidBodyState {
    /// Mirrors with bare masses `m1`, `m2` at rest at `q1 < q2`.
    pub fn at_rest(
        m1: f64,
        m2: f64,
        q1: f64,
        q2: f64,
        field_energy: f64,
        force: f64,
        c: f64,
    ) -> Result<Self> {
        if !(q2 > q1) {
            return Err(Error::InvalidInput(format!(
                "need q1 < q2, got {q1} and {q2}"
            )));
        }
        if !(m1 > 0.0 && m2 > 0.0 && c > 0.0) {
            return Err(Error::InvalidInput("masses and c must be positive".into()));
        }
        Ok(Self {
            t: 0.0,
            q1,
            q2,
            v: 0.0,
            e1: m1 * c * c,
            e2: m2 * c * c,
            field_energy,
            force,
            c,
        })
    }

    pub fn with_velocity(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn separation(&self) -> f64 {
        self.q2 - self.q1
    }

    pub fn energy(&self) -> f64 {
        self.e1 + self.e2 + self.field_energy
    }

    pub fn p1(&self) -> f64 {
        self.e1 * self.v / (self.c * self.c)
    }

    pub fn p2(&self) -> f64 {
        self.e2 * self.v / (self.c * self.c)
    }

    pub fn mass_correction(&self) -> f64 {
        mass_correction(self.field_energy, self.force, self.separation(), self.c)
    }

    /// Total momentum P.
    pub fn momentum(&self) -> f64 {
        let stress = self.field_energy - self.force * self.separation();
        (self.e1 * self.v + self.e2 * self.v + stress * self.v) / (self.c * self.c)
    }
}

/// Q = [e₁q₁ + e₂q₂ + E_f(q₁ + q₂)/2]/E.
pub fn center_of_inertia(state: &RigidBodyState) -> Result<f64> {
    let e = state.energy();
    if e == 0.0 {
        return Err(Error::Degenerate(
            "total energy vanishes; center of inertia undefined".into(),
        ));
    }
    Ok((state.e1 * state.q1
        + state.e2 * state.q2
        + state.field_energy * 0.5 * (state.q1 + state.q2))
        / e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationLimits {
    /// Largest |v|/c allowed along the trace.
    pub max_beta: f64,
    /// Largest relative drift of E allowed along the trace.
    pub energy_drift: f64,
}

impl Default for SimulationLimits {
    fn default() -> Self {
        Self {
            max_beta: 1e-3,
            energy_drift: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub state: RigidBodyState,
    pub energy: f64,
    pub momentum: f64,
    pub center: f64,
    /// c²P − EQ′ with Q′ from finite differences along the trace.
    pub residual: f64,
    /// dP/dt / a from finite differences (NaN when a = 0).
    pub inertial_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidTrace {
    pub acceleration: f64,
    pub samples: Vec<TraceSample>,
    /// (e₁(0) + e₂(0))/c².
    pub bare_mass: f64,
    pub mass_correction: f64,
    /// max |c²P − EQ′| / (E·max|v|).
    pub max_relative_residual: f64,
    pub max_energy_drift: f64,
    /// max |(dP/dt)/a − (m + δm)| / |m + δm|.
    pub max_mass_gap: f64,
}

pub const TRACE_HEADER: [&str; 10] = [
    "t",
    "q1",
    "q2",
    "v",
    "e1",
    "e2",
    "E",
    "P",
    "Q",
    "residual_c2P_minus_EQprime",
];

impl RigidTrace {
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.samples
            .iter()
            .map(|s| {
                let st = &s.state;
                vec![
                    st.t, st.q1, st.q2, st.v, st.e1, st.e2, s.energy, s.momentum, s.center,
                    s.residual,
                ]
            })
            .collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_float_csv_file(path, &TRACE_HEADER, &self.csv_rows())
    }
}

fn rk4_step(y: [f64; 4], t: f64, dt: f64, v0: f64, a: f64, force: f64) -> [f64; 4] {
    let f = |t: f64, _y: &[f64; 4]| {
        let v = v0 + a * t;
        [v, v, force * v, -force * v]
    };
    let add = |y: &[f64; 4], k: &[f64; 4], h: f64| {
        let mut out = *y;
        for (o, k) in out.iter_mut().zip(k) {
            *o += h * k;
        }
        out
    };
    let k1 = f(t, &y);
    let k2 = f(t + 0.5 * dt, &add(&y, &k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, &add(&y, &k2, 0.5 * dt));
    let k4 = f(t + dt, &add(&y, &k3, dt));
    let mut out = y;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates the mirror energies under the common velocity v₀ + at with a
/// fixed-step fourth-order Runge–Kutta scheme.
pub fn simulate_accelerated_cavity(
    initial: &RigidBodyState,
    acceleration: f64,
    duration: f64,
    dt: f64,
    limits: &SimulationLimits,
) -> Result<RigidTrace> {
    if !(dt > 0.0 && duration > 0.0) {
        return Err(Error::InvalidInput(
            "duration and dt must be positive".into(),
        ));
    }
    let steps = (duration / dt).round() as usize;
    if steps < 4 {
        return Err(Error::InvalidInput("need at least four steps".into()));
    }
    let c = initial.c;
    let (v0, t0, force) = (initial.v, initial.t, initial.force);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = [initial.q1, initial.q2, initial.e1, initial.e2];
    for k in 0..=steps {
        let tau = k as f64 * dt;
        let v = v0 + acceleration * tau;
        if v.abs() > limits.max_beta * c {
            return Err(Error::Precondition(format!(
                "|v|/c = {:e} exceeds the linear-response bound {:e} at t = {}",
                v.abs() / c,
                limits.max_beta,
                t0 + tau
            )));
        }
        states.push(RigidBodyState {
            t: t0 + tau,
            q1: y[0],
            q2: y[1],
            v,
            e1: y[2],
            e2: y[3],
            ..*initial
        });
        y = rk4_step(y, tau, dt, v0, acceleration, force);
    }

    let e0 = initial.energy();
    let centers = states
        .iter()
        .map(center_of_inertia)
        .collect::<Result<Vec<f64>>>()?;
    let momenta: Vec<f64> = states.iter().map(RigidBodyState::momentum).collect();
    let q_dot = five_point_derivative(&centers, dt)?;
    let p_dot = five_point_derivative(&momenta, dt)?;

    let bare_mass = (initial.e1 + initial.e2) / (c * c);
    let dm = initial.mass_correction();
    let v_scale = states.iter().map(|s| s.v.abs()).fold(0.0, f64::max);
    let mut max_residual = 0.0f64;
    let mut max_drift = 0.0f64;
    let mut max_mass_gap = 0.0f64;
    let mut samples = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let energy = s.energy();
        let residual = c * c * momenta[k] - energy * q_dot[k];
        if v_scale > 0.0 {
            max_residual = max_residual.max(residual.abs() / (energy.abs() * v_scale));
        }
        max_drift = max_drift.max((energy - e0).abs() / e0.abs());
        let inertial_mass = if acceleration != 0.0 {
            let m = p_dot[k] / acceleration;
            max_mass_gap = max_mass_gap.max((m - (bare_mass + dm)).abs() / (bare_mass + dm).abs());
            m
        } else {
            f64::NAN
        };
        samples.push(TraceSample {
            state: *s,
            energy,
            momentum: momenta[k],
            center: centers[k],
            residual,
            inertial_mass,
        });
    }
    if max_drift > limits.energy_drift {
        return Err(Error::Consistency {
            check: "energy conservation",
            gap: max_drift,
            tolerance: limits.energy_drift,
        });
    }
    Ok(RigidTrace {
        acceleration,
        samples,
        bare_mass,
        mass_correction: dm,
        max_relative_residual: max_residual,
        max_energy_drift: max_drift,
        max_mass_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cavity_state() -> RigidBodyState {
        let f = PI / 24.0;
        RigidBodyState::at_rest(1.0, 1.0, -0.5, 0.5, -f, f, 1.0).unwrap()
    }

    #[test]
    fn mass_correction_limits() {
        let f = PI / 24.0;
        assert_relative_eq!(
            mass_correction(-f, f, 1.0, 1.0),
            -PI / 12.0,
            max_relative = 1e-15
        );
        assert_eq!(mass_correction(0.7, 0.0, 1.0, 1.0), 0.7);
        assert_eq!(mass_correction(0.0, 0.3, 2.0, 1.0), -0.6);
    }

    #[test]
    fn center_of_symmetric_state_is_origin() {
        assert_eq!(center_of_inertia(&cavity_state()).unwrap(), 0.0);
        let mut s = RigidBodyState::at_rest(1.0, 3.0, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(center_of_inertia(&s).unwrap(), 0.75);
        s.e1 = 0.0;
        s.e2 = 0.0;
        assert!(matches!(center_of_inertia(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn inertial_motion_keeps_momentum() {
        let s = cavity_state().with_velocity(1e-4);
        let tr =
            simulate_accelerated_cavity(&s, 0.0, 10.0, 0.01, &SimulationLimits::default()).unwrap();
        let p0 = tr.samples[0].momentum;
        for smp in &tr.samples {
            assert_relative_eq!(smp.momentum, p0, max_relative = 1e-14);
        }
        assert!(tr.max_relative_residual < 1e-9);
    }

    #[test]
    fn accelerated_trace_has_casimir_inertia() {
        let s = cavity_state();
        let tr = simulate_accelerated_cavity(&s, 1e-5, 50.0, 0.05, &SimulationLimits::default())
            .unwrap();
        assert!(
            tr.max_relative_residual < 1e-9,
            "{}",
            tr.max_relative_residual
        );
        assert!(tr.max_mass_gap < 1e-6, "{}", tr.max_mass_gap);
        assert_relative_eq!(tr.mass_correction, -PI / 12.0, max_relative = 1e-15);
        assert!(tr.max_energy_drift < 1e-14);
    }

    #[test]
    fn velocity_bound_enforced() {
        let r = simulate_accelerated_cavity(
            &cavity_state(),
            1e-3,
            10.0,
            0.1,
            &SimulationLimits::default(),
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
