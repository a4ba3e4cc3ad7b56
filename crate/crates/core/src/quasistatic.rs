//! Casimir statics and the quasistatic coefficients κ_ij, λ_ij, μ_ij of the
//! expansion χ_ij[ω] = −κ_ij + iωλ_ij + ω²μ_ij + O(ω³).
//!
//! Perfect mirrors use closed forms. Partially transmitting mirrors use
//! half-line integrals of the form ∫_0^∞ dω [G(ω) − G(−ω)] whose integrands
//! are sums of e^{2inωτ} harmonics; see [`crate::quadrature`].

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{self, CavityConfig, Kernel, Mirror};
use crate::error::{Error, Result};
use crate::output::write_float_csv_file;
use crate::quadrature::{integrate_half_line, HalfLineContour, Parity, QuadResult, Tolerance};
use crate::units::UnitSystem;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormPerfect,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasistaticCoefficients {
    pub kappa: [[f64; 2]; 2],
    pub lambda: [[f64; 2]; 2],
    pub mu: [[f64; 2]; 2],
    pub kappa_sum: f64,
    pub lambda_sum: f64,
    pub mu_sum: f64,
    /// Largest relative error estimate among the entries (0 for closed forms).
    pub achieved_tolerance: f64,
    /// Largest |Im|/scale among the raw quadrature results.
    pub imaginary_residue: f64,
    pub method: Method,
}

impl QuasistaticCoefficients {
    fn from_matrices(
        kappa: [[f64; 2]; 2],
        lambda: [[f64; 2]; 2],
        mu: [[f64; 2]; 2],
        achieved_tolerance: f64,
        imaginary_residue: f64,
        method: Method,
    ) -> Self {
        let sum = |m: &[[f64; 2]; 2]| m.iter().flatten().sum();
        Self {
            kappa_sum: sum(&kappa),
            lambda_sum: sum(&lambda),
            mu_sum: sum(&mu),
            kappa,
            lambda,
            mu,
            achieved_tolerance,
            imaginary_residue,
            method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirStatics {
    /// Mean Casimir force F = F₁ = −F₂; positive means attraction.
    pub force: f64,
    /// Casimir energy, known for perfect mirrors only.
    pub energy: Option<f64>,
    /// Integrated field energy E_f = −Fq.
    pub field_energy: f64,
    /// δm = (E_f − Fq)/c².
    pub mass_correction: f64,
    pub achieved_tolerance: f64,
}

/// Knobs for the partial-mirror quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub tolerance: Tolerance,
    /// Allowed |Im|/scale of physically real integrals.
    pub imaginary_residue: f64,
    /// Overrides the contour derived from the mirror cutoffs.
    pub contour: Option<HalfLineContour>,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::default(),
            imaginary_residue: 1e-8,
            contour: None,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tolerance(rel: f64) -> Self {
        Self {
            tolerance: Tolerance::new(Tolerance::default().abs, rel),
            ..Self::default()
        }
    }

    fn contour_for(&self, config: &CavityConfig) -> HalfLineContour {
        self.contour.unwrap_or_else(|| {
            HalfLineContour::for_singularity_distance(config.singularity_distance())
        })
    }
}

/// Closed forms for two perfect mirrors.
pub fn coefficients_perfect(config: &CavityConfig) -> Result<QuasistaticCoefficients> {
    config.require_perfect("coefficients_perfect")?;
    let (hbar, c, q) = (config.hbar(), config.c(), config.q);
    let k = -hbar * c * PI / (12.0 * q.powi(3));
    let m0 = hbar / (12.0 * PI * c * q);
    let m11 = -m0 * (1.0 + PI * PI / 3.0);
    let m12 = -m0 * (-1.0 + PI * PI / 6.0);
    Ok(QuasistaticCoefficients::from_matrices(
        [[k, -k], [-k, k]],
        [[0.0; 2]; 2],
        [[m11, m12], [m12, m11]],
        0.0,
        0.0,
        Method::ClosedFormPerfect,
    ))
}

/// U = −ħcπ/24q and F = F₁ = dU/dq = ħcπ/24q².
pub fn casimir_energy_perfect(q: f64, units: UnitSystem) -> Result<CasimirStatics> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mirror separation must be positive, got {q}"
        )));
    }
    let (hbar, c) = (units.hbar(), units.c());
    let energy = -hbar * c * PI / (24.0 * q);
    let force = hbar * c * PI / (24.0 * q * q);
    Ok(CasimirStatics {
        force,
        energy: Some(energy),
        field_energy: -force * q,
        mass_correction: crate::rigid_body::mass_correction(-force * q, force, q, c),
        achieved_tolerance: 0.0,
    })
}

/// Static force for perfect or partial mirrors.
pub fn casimir_statics(config: &CavityConfig, opts: &QuadratureOptions) -> Result<CasimirStatics> {
    if config.both_perfect() {
        casimir_energy_perfect(config.q, config.units)
    } else {
        casimir_force_partial(config, opts)
    }
}

fn half_line<G>(g: G, contour: &HalfLineContour, tol: &Tolerance) -> QuadResult
where
    G: Fn(Complex64) -> Complex64,
{
    integrate_half_line(&g, Parity::Odd, contour, tol).total
}

/// Real part of a physically real quadrature result, after checking its
/// imaginary residue against `scale`.
fn real_part(
    r: &QuadResult,
    scale: f64,
    opts: &QuadratureOptions,
    check: &'static str,
) -> Result<(f64, f64)> {
    let residue = r.value.im.abs() / scale.max(f64::MIN_POSITIVE);
    if residue > opts.imaginary_residue {
        return Err(Error::Consistency {
            check,
            gap: residue,
            tolerance: opts.imaginary_residue,
        });
    }
    Ok((r.value.re, residue))
}

fn force_integral(kernel: &Kernel, contour: &HalfLineContour, tol: &Tolerance) -> QuadResult {
    half_line(
        |z| {
            let (d, _, gain) = kernel.denominator_and_gain(z);
            -z * gain / d
        },
        contour,
        tol,
    )
}

/// F = (ħ/c)∫_0^∞ (dω/2π) ω (2 − 1/d[ω] − 1/d[−ω]).
pub fn casimir_force_partial(
    config: &CavityConfig,
    opts: &QuadratureOptions,
) -> Result<CasimirStatics> {
    let kernel = config.partial_kernel("casimir_force_partial")?;
    let tau = config.tau();
    let pref = config.hbar() / (config.c() * tau * tau * 2.0 * PI);
    let r = force_integral(&kernel, &opts.contour_for(config), &opts.tolerance)
        .scaled(pref.into())
        .require(&opts.tolerance)?;
    let (force, _) = real_part(&r, r.value.re.abs(), opts, "force is real")?;
    let q = config.q;
    Ok(CasimirStatics {
        force,
        energy: None,
        field_energy: -force * q,
        mass_correction: crate::rigid_body::mass_correction(-force * q, force, q, config.c()),
        achieved_tolerance: r.relative_error(),
    })
}

/// Γ_ij[ω] = −(∂_ω∂_ω′ γᴬ_ij[ω, ω′])_{ω′=ω} at a real frequency.
pub fn gamma_capital(config: &CavityConfig, i: Mirror, j: Mirror, omega: f64) -> Result<Complex64> {
    for m in [&config.mirror1, &config.mirror2] {
        if m.is_perfect() {
            return Err(Error::UnsupportedModel {
                operation: "gamma_capital",
                model: m.to_string(),
                reason: "defined for partially transmitting mirrors",
            });
        }
    }
    let tau = config.tau();
    let p = config.point(omega)?;
    if p.denominator(tau).0.norm() == 0.0 {
        return Err(Error::VanishingDenominator { omega });
    }
    Ok(cavity::gamma_capital(i, j, &p, tau))
}

/// γᴬ_ij[z, z] and its total derivative. On the diagonal
/// γᴬ₁₁ = γᴬ₂₂ = −γᴬ₂₁ = 4(1 − d)/d².
fn diagonal_gamma(kernel: &Kernel, i: Mirror, j: Mirror, z: Complex64) -> (Complex64, Complex64) {
    let (d, dd, gain) = kernel.denominator_and_gain(z);
    let s = if i == j { 4.0 } else { -4.0 };
    let d2 = d * d;
    (s * gain / d2, -s * dd * (1.0 + gain) / (d2 * d))
}

const PAIRS: [(Mirror, Mirror); 3] = [
    (Mirror::One, Mirror::One),
    (Mirror::Two, Mirror::Two),
    (Mirror::Two, Mirror::One),
];

/// Raw (dimensionless) integrals for κ, λ, μ in the order of [`PAIRS`].
pub(crate) struct RawCoefficients {
    pub kappa: [QuadResult; 3],
    pub lambda: [QuadResult; 3],
    pub mu: [QuadResult; 3],
}

pub(crate) fn raw_coefficients(
    kernel: &Kernel,
    contour: &HalfLineContour,
    tol: &Tolerance,
) -> RawCoefficients {
    let kappa =
        PAIRS.map(|(i, j)| half_line(|z| z * z * diagonal_gamma(kernel, i, j, z).0, contour, tol));
    let lambda = PAIRS.map(|(i, j)| {
        half_line(
            |z| {
                let (g, dg) = diagonal_gamma(kernel, i, j, z);
                z * g + 0.5 * z * z * dg
            },
            contour,
            tol,
        )
    });
    let mu = PAIRS.map(|(i, j)| half_line(|z| z * z * kernel.gamma_capital(i, j, z), contour, tol));
    RawCoefficients { kappa, lambda, mu }
}

/// κ_ij, λ_ij and μ_ij for analytic partially transmitting mirrors.
pub fn coefficients_partial(
    config: &CavityConfig,
    opts: &QuadratureOptions,
) -> Result<QuasistaticCoefficients> {
    let kernel = config.partial_kernel("coefficients_partial")?;
    let contour = opts.contour_for(config);
    let raw = raw_coefficients(&kernel, &contour, &opts.tolerance);
    let (hbar, c, tau) = (config.hbar(), config.c(), config.tau());
    let c2 = c * c;
    let two_pi = 2.0 * PI;
    let kp = -I * hbar / (2.0 * c2 * tau.powi(3) * two_pi);
    let lp = Complex64::new(hbar / (2.0 * c2 * tau * tau * two_pi), 0.0);
    let mp = I * hbar / (4.0 * c2 * tau * two_pi);
    let scale = |r: &[QuadResult; 3], p: Complex64| -> Result<[QuadResult; 3]> {
        let mut out = [QuadResult::zero(); 3];
        for (o, x) in out.iter_mut().zip(r) {
            *o = x.scaled(p).require(&opts.tolerance)?;
        }
        Ok(out)
    };
    let kappa = scale(&raw.kappa, kp)?;
    let lambda = scale(&raw.lambda, lp)?;
    let mu = scale(&raw.mu, mp)?;

    let kappa_ref = kappa[0].value.norm();
    let lambda_ref = kappa_ref * tau;
    let mu_ref = mu[0].value.norm();
    let mut residue = 0.0f64;
    let mut rel_err = 0.0f64;
    let mut collect =
        |r: &[QuadResult; 3], reference: f64, check: &'static str| -> Result<[f64; 3]> {
            let mut out = [0.0; 3];
            for (o, x) in out.iter_mut().zip(r) {
                let (v, res) = real_part(x, x.value.re.abs().max(reference), opts, check)?;
                residue = residue.max(res);
                rel_err = rel_err.max(x.error / reference.max(f64::MIN_POSITIVE));
                *o = v;
            }
            Ok(out)
        };
    let k = collect(&kappa, kappa_ref, "stiffness is real")?;
    let l = collect(&lambda, lambda_ref, "viscosity is real")?;
    let m = collect(&mu, mu_ref, "inertia is real")?;
    let matrix = |v: [f64; 3]| [[v[0], v[2]], [v[2], v[1]]];
    Ok(QuasistaticCoefficients::from_matrices(
        matrix(k),
        matrix(l),
        matrix(m),
        rel_err,
        residue,
        Method::Quadrature,
    ))
}

/// Dispatches to the closed forms or the quadratures.
pub fn coefficients(
    config: &CavityConfig,
    opts: &QuadratureOptions,
) -> Result<QuasistaticCoefficients> {
    if config.both_perfect() {
        coefficients_perfect(config)
    } else {
        coefficients_partial(config, opts)
    }
}

/// The global mass correction computed two independent ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMass {
    /// From the integral of ω²(Γ[ω] − Γ[−ω]) with Γ = Σ_ij Γ_ij = −4iτd′/d²,
    /// or Σ_ij μ_ij of the closed forms for perfect mirrors.
    pub via_gamma_sum: f64,
    /// −2Fq/c².
    pub via_force: f64,
    pub force: f64,
    pub relative_gap: f64,
    pub achieved_tolerance: f64,
    pub method: Method,
}

/// Both routes to μ without judging their agreement.
pub fn global_mass_routes(config: &CavityConfig, opts: &QuadratureOptions) -> Result<GlobalMass> {
    let c2 = config.c().powi(2);
    let q = config.q;
    let (via_gamma_sum, force, achieved, method) = if config.both_perfect() {
        let coeffs = coefficients_perfect(config)?;
        let statics = casimir_energy_perfect(q, config.units)?;
        (coeffs.mu_sum, statics.force, 0.0, Method::ClosedFormPerfect)
    } else {
        let kernel = config.partial_kernel("global_mass_correction")?;
        let contour = opts.contour_for(config);
        let tau = config.tau();
        let mp = I * config.hbar() / (4.0 * c2 * tau * 2.0 * PI);
        let r = half_line(
            |z| z * z * kernel.gamma_capital_sum(z),
            &contour,
            &opts.tolerance,
        )
        .scaled(mp)
        .require(&opts.tolerance)?;
        let (mu, _) = real_part(&r, r.value.re.abs(), opts, "inertia is real")?;
        let statics = casimir_force_partial(config, opts)?;
        (
            mu,
            statics.force,
            r.relative_error().max(statics.achieved_tolerance),
            Method::Quadrature,
        )
    };
    let via_force = -2.0 * force * q / c2;
    Ok(GlobalMass {
        via_gamma_sum,
        via_force,
        force,
        relative_gap: relative_gap(via_gamma_sum, via_force),
        achieved_tolerance: achieved,
        method,
    })
}

/// Both routes to μ, failing when they disagree by more than `tolerance`.
pub fn global_mass_correction(
    config: &CavityConfig,
    opts: &QuadratureOptions,
    tolerance: f64,
) -> Result<GlobalMass> {
    let g = global_mass_routes(config, opts)?;
    if !(g.relative_gap <= tolerance) {
        return Err(Error::Consistency {
            check: "mu = -2Fq/c^2",
            gap: g.relative_gap,
            tolerance,
        });
    }
    Ok(g)
}

/// |a − b| / max(|a|, |b|), zero when both vanish.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Centered difference dF/dq at fixed mirror models, step `rel_step·q`.
pub fn force_derivative(
    config: &CavityConfig,
    opts: &QuadratureOptions,
    rel_step: f64,
) -> Result<f64> {
    let h = config.q * rel_step;
    let plus = casimir_statics(&config.with_separation(config.q + h)?, opts)?.force;
    let minus = casimir_statics(&config.with_separation(config.q - h)?, opts)?.force;
    Ok((plus - minus) / (2.0 * h))
}

/// One line of the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub q: f64,
    /// Reflection cutoff of mirror 1; infinite for a perfect mirror.
    pub omega_cutoff: f64,
    pub coefficients: QuasistaticCoefficients,
    pub statics: CasimirStatics,
    /// Relative gap between μ and −2Fq/c².
    pub mu_identity_gap: f64,
}

pub const COEFFICIENT_HEADER: [&str; 11] = [
    "q",
    "omega_cutoff",
    "kappa11",
    "kappa12",
    "lambda11",
    "lambda12",
    "mu11",
    "mu12",
    "mu_sum",
    "F",
    "mu_identity_gap",
];

impl CoefficientRow {
    pub fn evaluate(config: &CavityConfig, opts: &QuadratureOptions) -> Result<Self> {
        let coefficients = coefficients(config, opts)?;
        let statics = casimir_statics(config, opts)?;
        let target = -2.0 * statics.force * config.q / config.c().powi(2);
        Ok(Self {
            q: config.q,
            omega_cutoff: config.mirror1.cutoff().unwrap_or(f64::INFINITY),
            mu_identity_gap: relative_gap(coefficients.mu_sum, target),
            coefficients,
            statics,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let c = &self.coefficients;
        vec![
            self.q,
            self.omega_cutoff,
            c.kappa[0][0],
            c.kappa[0][1],
            c.lambda[0][0],
            c.lambda[0][1],
            c.mu[0][0],
            c.mu[0][1],
            c.mu_sum,
            self.statics.force,
            self.mu_identity_gap,
        ]
    }
}

pub fn write_coefficient_csv(path: impl AsRef<Path>, rows: &[CoefficientRow]) -> Result<()> {
    let values: Vec<Vec<f64>> = rows.iter().map(CoefficientRow::values).collect();
    write_float_csv_file(path, &COEFFICIENT_HEADER, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lorentzian(beta: f64) -> CavityConfig {
        CavityConfig::lorentzian(1.0, beta, UnitSystem::Natural).unwrap()
    }

    #[test]
    fn perfect_closed_forms() {
        let c = CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap();
        let k = coefficients_perfect(&c).unwrap();
        assert_relative_eq!(k.kappa[0][0], -PI / 12.0, max_relative = 1e-15);
        assert_relative_eq!(k.mu[0][0], -0.113_792_286_448_365_7, max_relative = 1e-14);
        assert_relative_eq!(k.mu[0][1], -0.017_107_407_451_209_02, max_relative = 1e-13);
        assert_relative_eq!(k.mu_sum, -PI / 12.0, max_relative = 1e-14);
        assert_eq!(k.kappa_sum, 0.0);
    }

    #[test]
    fn perfect_energy() {
        let s = casimir_energy_perfect(1.0, UnitSystem::Natural).unwrap();
        assert_relative_eq!(s.energy.unwrap(), -PI / 24.0, max_relative = 1e-15);
        assert_relative_eq!(s.force, PI / 24.0, max_relative = 1e-15);
        assert_eq!(s.field_energy, s.energy.unwrap());
        let s2 = casimir_energy_perfect(2.0, UnitSystem::Natural).unwrap();
        assert_relative_eq!(
            s2.energy.unwrap(),
            0.5 * s.energy.unwrap(),
            max_relative = 1e-15
        );
        assert_relative_eq!(s2.force, 0.25 * s.force, max_relative = 1e-15);
    }

    #[test]
    fn quadrature_reproduces_perfect_closed_forms() {
        // For r = −1 the same contour integrals converge (the Matsubara sum
        // of the perfect cavity), giving an independent check of the engine.
        let c = CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap();
        let kernel = c.kernel_unchecked();
        let contour = HalfLineContour::default();
        let tol = Tolerance::default();
        let raw = raw_coefficients(&kernel, &contour, &tol);
        let exact = coefficients_perfect(&c).unwrap();
        let kp = -I / (2.0 * 2.0 * PI);
        let mp = I / (4.0 * 2.0 * PI);
        assert_relative_eq!(
            (raw.kappa[0].value * kp).re,
            exact.kappa[0][0],
            max_relative = 1e-11
        );
        assert_relative_eq!(
            (raw.mu[0].value * mp).re,
            exact.mu[0][0],
            max_relative = 1e-11
        );
        assert_relative_eq!(
            (raw.mu[2].value * mp).re,
            exact.mu[0][1],
            max_relative = 1e-10
        );
        let f = force_integral(&kernel, &contour, &tol).value.re / (2.0 * PI);
        assert_relative_eq!(f, PI / 24.0, max_relative = 1e-12);
    }

    #[test]
    fn partial_reference_values() {
        let c = lorentzian(10.0);
        let opts = QuadratureOptions::default();
        let f = casimir_force_partial(&c, &opts).unwrap();
        assert_relative_eq!(f.force, 0.109_082_860_803_255_88, max_relative = 1e-10);
        let k = coefficients_partial(&c, &opts).unwrap();
        assert_relative_eq!(k.mu[0][0], -0.093_590_132_649_214_4, max_relative = 1e-9);
        assert_relative_eq!(k.mu[0][1], -0.015_492_728_154_041_5, max_relative = 1e-9);
        assert_relative_eq!(k.mu_sum, -2.0 * f.force, max_relative = 1e-10);
        assert!(k.kappa_sum.abs() < 1e-12 * k.kappa[0][0].abs());
    }

    #[test]
    fn gamma_sum_cancels_term_by_term() {
        let c = CavityConfig::new(
            1.0,
            crate::MirrorModel::lorentzian(4.0).unwrap(),
            crate::MirrorModel::lorentzian(9.0).unwrap(),
            UnitSystem::Natural,
        )
        .unwrap();
        for w in [0.3, 1.1, 2.7, 9.4] {
            let g = |i, j| gamma_capital(&c, i, j, w).unwrap();
            let total = g(Mirror::One, Mirror::One)
                + g(Mirror::Two, Mirror::Two)
                + 2.0 * g(Mirror::Two, Mirror::One);
            let p = c.point(w).unwrap();
            let expected = cavity::gamma_capital_sum(&p, c.tau());
            assert!((total - expected).norm() < 1e-12 * expected.norm());
        }
    }

    #[test]
    fn gamma_capital_matches_contour_mixed_derivative() {
        // −∂_ω∂_ω′ γᴬ from a double Cauchy integral over two small circles.
        let c = lorentzian(5.0);
        let k = c.kernel_unchecked();
        let (w, rho, n) = (1.0, 0.05, 32);
        for (i, j) in PAIRS {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                let ua = Complex64::from_polar(1.0, 2.0 * PI * a as f64 / n as f64);
                for b in 0..n {
                    let ub = Complex64::from_polar(1.0, 2.0 * PI * b as f64 / n as f64);
                    acc += k.gamma_a(i, j, w + rho * ua, w + rho * ub) / (ua * ub);
                }
            }
            let mixed = -acc / (n as f64 * n as f64 * rho * rho);
            let direct = gamma_capital(&c, i, j, w).unwrap();
            assert!(
                (mixed - direct).norm() < 1e-12 * direct.norm(),
                "{i:?}{j:?} {mixed} {direct}"
            );
        }
    }

    #[test]
    fn perfect_mirrors_rejected_by_quadrature_ops() {
        let c = CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap();
        let o = QuadratureOptions::default();
        assert!(matches!(
            coefficients_partial(&c, &o),
            Err(Error::UnsupportedModel { .. })
        ));
        assert!(matches!(
            casimir_force_partial(&c, &o),
            Err(Error::UnsupportedModel { .. })
        ));
        assert!(matches!(
            gamma_capital(&c, Mirror::One, Mirror::One, 1.0),
            Err(Error::UnsupportedModel { .. })
        ));
        let l = lorentzian(10.0);
        assert!(matches!(
            coefficients_perfect(&l),
            Err(Error::UnsupportedModel { .. })
        ));
    }

    #[test]
    fn global_mass_routes_agree() {
        let p = CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap();
        let g = global_mass_correction(&p, &QuadratureOptions::default(), 1e-12).unwrap();
        assert_relative_eq!(g.via_gamma_sum, -PI / 12.0, max_relative = 1e-14);
        let l = lorentzian(100.0);
        let g = global_mass_correction(&l, &QuadratureOptions::default(), 1e-6).unwrap();
        assert!(g.relative_gap < 1e-9, "{g:?}");
    }

    #[test]
    fn si_units_scale_homogeneously() {
        let q = 1e-6;
        let c = crate::units::C_SI;
        let nat = coefficients_partial(&lorentzian(10.0), &QuadratureOptions::default()).unwrap();
        let si_cfg = CavityConfig::lorentzian(q, 10.0 * c / q, UnitSystem::Si).unwrap();
        let si = coefficients_partial(&si_cfg, &QuadratureOptions::default()).unwrap();
        let mass_unit = crate::units::HBAR_SI / (c * q);
        assert_relative_eq!(si.mu[0][0] / mass_unit, nat.mu[0][0], max_relative = 1e-10);
        let stiff_unit = crate::units::HBAR_SI * c / q.powi(3);
        assert_relative_eq!(
            si.kappa[0][0] / stiff_unit,
            nat.kappa[0][0],
            max_relative = 1e-10
        );
    }
}
