use std::f64::consts::PI;

use casimir_inertia::quasistatic::{
    casimir_force_partial, coefficients_partial, QuadratureOptions,
};
use casimir_inertia::rigid_body::{simulate_accelerated_cavity, RigidBodyState, SimulationLimits};
use casimir_inertia::spectral::{cavity_denominator, chi_compound_perfect, chi_perfect, gamma_a};
use casimir_inertia::time_domain::{motional_force_perfect, Motion, TimeDomainOptions, Trajectory};
use casimir_inertia::{CavityConfig, Error, Mirror, MirrorModel, UnitSystem};
use num_complex::Complex64;
use proptest::prelude::*;

const NATURAL: UnitSystem = UnitSystem::Natural;

fn cutoff() -> impl Strategy<Value = f64> {
    (-1.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn frequency() -> impl Strategy<Value = f64> {
    -50.0f64..50.0
}

/// ωτ values at least 1e−3 away from every mπ.
fn regular_frequency() -> impl Strategy<Value = f64> {
    (-6i32..6, 2e-3f64..(PI - 2e-3)).prop_map(|(m, e)| m as f64 * PI + e)
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflectivity_is_bounded(omega in frequency(), cut in cutoff()) {
        for m in [MirrorModel::perfect(), MirrorModel::lorentzian(cut).unwrap()] {
            prop_assert!(m.reflectivity(omega).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn reflectivity_obeys_reality_symmetry(omega in frequency(), cut in cutoff()) {
        let m = MirrorModel::lorentzian(cut).unwrap();
        let a = m.reflectivity(-omega).unwrap();
        let b = m.reflectivity(omega).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12);
    }

    #[test]
    fn reflectivity_derivative_matches_differences(omega in frequency(), cut in cutoff()) {
        let m = MirrorModel::lorentzian(cut).unwrap();
        let h = 1e-5 * cut.max(omega.abs()).max(1e-3);
        let fd = (m.reflectivity(omega + h).unwrap() - m.reflectivity(omega - h).unwrap()) / (2.0 * h);
        let exact = m.reflectivity_derivative(omega).unwrap();
        prop_assert!(close(exact, fd, 1e-6), "{exact} vs {fd}");
    }

    #[test]
    fn lorentzian_is_unitary(omega in frequency(), cut in cutoff()) {
        let m = MirrorModel::lorentzian(cut).unwrap();
        let r = m.reflectivity(omega).unwrap();
        let s = m.transmission(omega).unwrap().amplitude;
        prop_assert!((r.norm_sqr() + s.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perfect_susceptibility_has_definite_parity(x in regular_frequency(), q in 0.2f64..5.0) {
        let config = CavityConfig::perfect(q, NATURAL).unwrap();
        let omega = x / config.tau();
        let plus = chi_perfect(&config, omega).unwrap();
        let minus = chi_perfect(&config, -omega).unwrap();
        for i in [Mirror::One, Mirror::Two] {
            for j in [Mirror::One, Mirror::Two] {
                let (a, b) = (plus.get(i, j), minus.get(i, j));
                let scale = a.norm().max(1e-300);
                prop_assert!((a.re - b.re).abs() <= 1e-12 * scale);
                prop_assert!((a.im + b.im).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn compound_is_the_matrix_sum(x in regular_frequency(), q in 0.2f64..5.0) {
        let config = CavityConfig::perfect(q, NATURAL).unwrap();
        let omega = x / config.tau();
        let sum = chi_perfect(&config, omega).unwrap().sum();
        let compound = chi_compound_perfect(&config, omega).unwrap().chi;
        prop_assert!(close(sum, compound, 1e-10), "{sum} vs {compound}");
    }

    #[test]
    fn compound_dissipation_is_independent_of_length(omega in 0.01f64..20.0, q1 in 0.2f64..5.0, q2 in 0.2f64..5.0) {
        let xi = |q: f64| -> std::result::Result<f64, Error> {
            let config = CavityConfig::perfect(q, NATURAL).unwrap();
            chi_compound_perfect(&config, omega).map(|c| c.dissipative)
        };
        let single = omega.powi(3) / (6.0 * PI);
        for q in [q1, q2] {
            match xi(q) {
                Ok(v) => prop_assert!((v - single).abs() <= 1e-12 * single),
                Err(Error::Pole { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn lorentzian_denominator_never_vanishes(x in 0.0f64..40.0, cut in cutoff()) {
        let config = CavityConfig::lorentzian(1.0, cut, NATURAL).unwrap();
        prop_assert!(cavity_denominator(&config, x).unwrap().d.norm() > 0.0);
    }

    #[test]
    fn gamma_a_is_symmetric_in_its_frequencies(w in frequency(), w2 in frequency(), c1 in cutoff(), c2 in cutoff()) {
        let config = CavityConfig::new(
            1.0,
            MirrorModel::lorentzian(c1).unwrap(),
            MirrorModel::lorentzian(c2).unwrap(),
            NATURAL,
        ).unwrap();
        for (i, j) in [(Mirror::One, Mirror::One), (Mirror::Two, Mirror::Two), (Mirror::One, Mirror::Two)] {
            let a = gamma_a(&config, i, j, w, w2).unwrap();
            let b = gamma_a(&config, i, j, w2, w).unwrap();
            prop_assert!(close(a, b, 1e-12));
        }
        let a = gamma_a(&config, Mirror::One, Mirror::Two, w, w2).unwrap();
        let b = gamma_a(&config, Mirror::Two, Mirror::One, w, w2).unwrap();
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn gamma_a_follows_mirror_exchange(w in frequency(), w2 in frequency(), c1 in cutoff(), c2 in cutoff()) {
        let (m1, m2) = (MirrorModel::lorentzian(c1).unwrap(), MirrorModel::lorentzian(c2).unwrap());
        let config = CavityConfig::new(1.0, m1.clone(), m2.clone(), NATURAL).unwrap();
        let swapped = CavityConfig::new(1.0, m2, m1, NATURAL).unwrap();
        let a = gamma_a(&config, Mirror::Two, Mirror::Two, w, w2).unwrap();
        let b = gamma_a(&swapped, Mirror::One, Mirror::One, w, w2).unwrap();
        prop_assert!(close(a, b, 1e-12));
        let a = gamma_a(&config, Mirror::One, Mirror::Two, w, w2).unwrap();
        let b = gamma_a(&swapped, Mirror::One, Mirror::Two, w, w2).unwrap();
        prop_assert!(close(a, b, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasistatic_coefficients_are_structured(cut in cutoff(), q in 0.3f64..3.0) {
        let config = CavityConfig::lorentzian(q, cut / q, NATURAL).unwrap();
        let opts = QuadratureOptions::default();
        let c = coefficients_partial(&config, &opts).unwrap();
        let k11 = c.kappa[0][0];
        prop_assert!(c.mu_sum < 0.0);
        prop_assert!((k11 + c.kappa[0][1]).abs() <= 1e-10 * k11.abs());
        prop_assert!(c.kappa_sum.abs() <= 1e-10 * k11.abs());
        prop_assert!(c.mu[0][1] == c.mu[1][0] && c.kappa[0][1] == c.kappa[1][0]);
        prop_assert!(c.achieved_tolerance <= 1e-11);
        let f = casimir_force_partial(&config, &opts).unwrap().force;
        prop_assert!(f > 0.0);
        prop_assert!((c.mu_sum + 2.0 * f * q).abs() <= 1e-9 * c.mu_sum.abs());
    }

    #[test]
    fn rigid_traces_conserve_energy_and_bookkeeping(
        m1 in 0.1f64..10.0,
        m2 in 0.1f64..10.0,
        q in 0.5f64..2.0,
        magnitude in 1e-6f64..1e-5,
        negative in any::<bool>(),
    ) {
        // Much smaller velocities push the residual into the roundoff of
        // differencing the centre of inertia.
        let a = if negative { -magnitude } else { magnitude };
        let force = PI / (24.0 * q * q);
        let initial = RigidBodyState::at_rest(m1, m2, 0.0, q, -force * q, force, 1.0).unwrap();
        let trace = simulate_accelerated_cavity(&initial, a, 40.0, 0.02, &SimulationLimits::default()).unwrap();
        prop_assert!(trace.max_energy_drift <= 1e-12);
        prop_assert!(trace.max_relative_residual <= 1e-9);
        prop_assert!(trace.max_mass_gap <= 1e-6);
    }
}

fn pulse_strategy() -> impl Strategy<Value = Motion> {
    (-1e-4f64..1e-4, 1.0f64..20.0, 5.0f64..40.0).prop_map(|(a, s, w)| Motion::pulse(a, s, w))
}

fn force(traj: &Trajectory) -> casimir_inertia::time_domain::ForceRecord {
    let config = CavityConfig::perfect(1.0, NATURAL).unwrap();
    motional_force_perfect(traj, &config, &TimeDomainOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn delay_series_is_linear(p1 in pulse_strategy(), p2 in pulse_strategy(), p3 in pulse_strategy()) {
        let n = 600;
        let dt = 0.125;
        let a = Trajectory::from_motion(0.0, dt, n, p1.clone(), p2.clone()).unwrap();
        let b = Trajectory::from_motion(0.0, dt, n, p3.clone(), Motion::Rest).unwrap();
        let sum = Trajectory::from_motion(
            0.0, dt, n,
            Motion::Sum { terms: vec![p1, p3] },
            p2,
        ).unwrap();
        let (fa, fb, fs) = (force(&a), force(&b), force(&sum));
        let scale = fs.df1.iter().chain(&fa.df1).fold(1e-300f64, |m, x| m.max(x.abs()));
        for k in 0..n {
            prop_assert!((fs.df1[k] - fa.df1[k] - fb.df1[k]).abs() <= 1e-12 * scale);
            prop_assert!((fs.df2[k] - fa.df2[k] - fb.df2[k]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn delay_series_is_time_invariant(p1 in pulse_strategy(), p2 in pulse_strategy(), shift in 1usize..64) {
        let n = 600;
        let dt = 0.125;
        let a = Trajectory::from_motion(0.0, dt, n, p1, p2).unwrap();
        let mut dq1 = vec![0.0; shift];
        dq1.extend_from_slice(&a.dq1[..n - shift]);
        let mut dq2 = vec![0.0; shift];
        dq2.extend_from_slice(&a.dq2[..n - shift]);
        let shifted = Trajectory::tabulated(0.0, dt, dq1, dq2).unwrap();
        let original = Trajectory::tabulated(0.0, dt, a.dq1.clone(), a.dq2.clone()).unwrap();
        let (f, g) = (force(&original), force(&shifted));
        // Skip the one-sided stencil closure at the record end.
        for k in 0..n - shift - 4 {
            prop_assert_eq!(f.df1[k], g.df1[k + shift]);
            prop_assert_eq!(f.df2[k], g.df2[k + shift]);
        }
    }

    #[test]
    fn delay_series_is_causal(p1 in pulse_strategy(), p2 in pulse_strategy(), cut in 100usize..500, noise in -1e-5f64..1e-5) {
        let n = 600;
        let dt = 0.125;
        let a = Trajectory::from_motion(0.0, dt, n, p1, p2).unwrap();
        let mut dq1 = a.dq1.clone();
        for (k, v) in dq1.iter_mut().enumerate().skip(cut) {
            *v += noise * ((k - cut) as f64).sin();
        }
        let altered = Trajectory::tabulated(0.0, dt, dq1, a.dq2.clone()).unwrap();
        let original = Trajectory::tabulated(0.0, dt, a.dq1.clone(), a.dq2.clone()).unwrap();
        let (f, g) = (force(&original), force(&altered));
        // A centred stencil at node k reads samples up to k + 2.
        for k in 0..cut.saturating_sub(3) {
            prop_assert_eq!(f.df1[k], g.df1[k]);
            prop_assert_eq!(f.df2[k], g.df2[k]);
        }
    }
}
