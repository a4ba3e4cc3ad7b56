//! Frequency-domain motional susceptibilities.
//!
//! For perfect mirrors the 2×2 matrix χ_ij[ω] and the compound sum are known
//! in closed form. For partially transmitting mirrors only the
//! antisymmetric contribution χᴬ_ij, which carries all the quasistatic
//! content, is available; it is evaluated by a contour integral.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{self, CavityConfig, Mirror};
use crate::error::{Error, Result};
use crate::output::write_float_csv_file;
use crate::quadrature::{integrate_panels, HalfLineContour, QuadResult, Tolerance};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Radius in ωτ around a removable singularity inside which the Taylor
/// expansion replaces the direct formula.
pub const SERIES_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityMatrix {
    pub omega: f64,
    pub chi: [[Complex64; 2]; 2],
    pub dispersive: [[f64; 2]; 2],
    pub dissipative: [[f64; 2]; 2],
}

impl SusceptibilityMatrix {
    pub fn from_chi(omega: f64, chi: [[Complex64; 2]; 2]) -> Self {
        let re = |i: usize, j: usize| chi[i][j].re;
        let im = |i: usize, j: usize| chi[i][j].im;
        Self {
            omega,
            chi,
            dispersive: [[re(0, 0), re(0, 1)], [re(1, 0), re(1, 1)]],
            dissipative: [[im(0, 0), im(0, 1)], [im(1, 0), im(1, 1)]],
        }
    }

    pub fn get(&self, i: Mirror, j: Mirror) -> Complex64 {
        self.chi[i.index()][j.index()]
    }

    /// Σ_ij χ_ij, the response of the total force to a global displacement.
    pub fn sum(&self) -> Complex64 {
        self.chi.iter().flatten().sum()
    }
}

/// Scalar susceptibility with its dispersive and dissipative parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarSusceptibility {
    pub omega: f64,
    pub chi: Complex64,
    pub dispersive: f64,
    pub dissipative: f64,
}

impl ScalarSusceptibility {
    fn new(omega: f64, chi: Complex64) -> Self {
        Self {
            omega,
            chi,
            dispersive: chi.re,
            dissipative: chi.im,
        }
    }
}

/// ħ/(12πc²τ³): the natural scale of the perfect-mirror susceptibilities.
fn perfect_scale(config: &CavityConfig) -> f64 {
    let tau = config.tau();
    config.hbar() / (12.0 * PI * config.c().powi(2) * tau.powi(3))
}

/// e cot e, Taylor expanded to fourth order for small e.
fn e_cot_e(e: f64) -> f64 {
    if e.abs() < SERIES_RADIUS {
        let e2 = e * e;
        1.0 - e2 / 3.0 - e2 * e2 / 45.0
    } else {
        e / e.tan()
    }
}

/// e / sin e, Taylor expanded to fourth order for small e.
fn e_over_sin_e(e: f64) -> f64 {
    if e.abs() < SERIES_RADIUS {
        let e2 = e * e;
        1.0 + e2 / 6.0 + 7.0 * e2 * e2 / 360.0
    } else {
        e / e.sin()
    }
}

/// Nearest resonance index m and offset e = x − mπ.
fn nearest_resonance(x: f64) -> (i64, f64) {
    let m = (x / PI).round();
    (m as i64, x - m * PI)
}

/// Splits x(x² − π²) = (x − x₀)·P(x) for the removable point x₀ ∈ {0, ±π}
/// nearest to x.
fn cancelled_factor(m: i64, x: f64) -> f64 {
    match m {
        0 => x * x - PI * PI,
        1 => x * (x + PI),
        -1 => x * (x - PI),
        _ => unreachable!("only m ∈ {{-1, 0, 1}} cancel"),
    }
}

fn pole_error(config: &CavityConfig, m: i64) -> Error {
    Error::Pole {
        index: m,
        omega: m as f64 * PI / config.tau(),
    }
}

/// Dispersive parts (ξ̃₁₁, ξ̃₁₂) for perfect mirrors in units of ħ/(12πc²τ³).
fn perfect_dispersive(x: f64, exclusion: f64) -> std::result::Result<(f64, f64), i64> {
    let (m, e) = nearest_resonance(x);
    if m.abs() <= 1 {
        let p = cancelled_factor(m, x);
        let sign = if m == 0 { 1.0 } else { -1.0 };
        Ok((-p * e_cot_e(e), sign * p * e_over_sin_e(e)))
    } else if e.abs() < exclusion {
        Err(m)
    } else {
        let c = x * (x * x - PI * PI);
        Ok((-c / x.tan(), c / x.sin()))
    }
}

/// Full susceptibility matrix for two perfect mirrors.
pub fn chi_perfect(config: &CavityConfig, omega: f64) -> Result<SusceptibilityMatrix> {
    config.require_perfect("chi_perfect")?;
    let k = perfect_scale(config);
    let x = omega * config.tau();
    let (d11, d12) =
        perfect_dispersive(x, config.pole_exclusion).map_err(|m| pole_error(config, m))?;
    let xi11 = k * x.powi(3);
    let c11 = Complex64::new(k * d11, xi11);
    let c12 = Complex64::new(k * d12, 0.0);
    Ok(SusceptibilityMatrix::from_chi(
        omega,
        [[c11, c12], [c12, c11]],
    ))
}

/// Susceptibility of the compound system, Σ_ij χ_ij, for perfect mirrors.
pub fn chi_compound_perfect(config: &CavityConfig, omega: f64) -> Result<ScalarSusceptibility> {
    config.require_perfect("chi_compound_perfect")?;
    let k = perfect_scale(config);
    let x = omega * config.tau();
    let (m, e) = nearest_resonance(x);
    let dispersive = if m.abs() == 1 {
        // tan(x/2) = −cot(e/2) near x = ±π
        let u = 0.5 * e;
        2.0 * cancelled_factor(m, x) * (-2.0) * e_cot_e(u)
    } else if m % 2 != 0 && e.abs() < config.pole_exclusion {
        return Err(pole_error(config, m));
    } else {
        2.0 * x * (x * x - PI * PI) * (0.5 * x).tan()
    };
    let chi = Complex64::new(k * dispersive, 2.0 * k * x.powi(3));
    Ok(ScalarSusceptibility::new(omega, chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Denominator {
    pub omega: f64,
    /// d[ω] = 1 − r₁r₂e^{2iωτ}
    pub d: Complex64,
    /// d′[ω]
    pub derivative: Complex64,
}

pub fn cavity_denominator(config: &CavityConfig, omega: f64) -> Result<Denominator> {
    let (d, derivative) = config.point(omega)?.denominator(config.tau());
    Ok(Denominator {
        omega,
        d,
        derivative,
    })
}

/// The d-product counts as vanishing below this magnitude.
const VANISHING: f64 = 1e-300;

/// γᴬ_ij[ω, ω′] at real frequencies.
pub fn gamma_a(
    config: &CavityConfig,
    i: Mirror,
    j: Mirror,
    omega: f64,
    omega2: f64,
) -> Result<Complex64> {
    let tau = config.tau();
    let p = config.point(omega)?;
    let p2 = config.point(omega2)?;
    for (w, pt) in [(omega, &p), (omega2, &p2)] {
        if pt.denominator(tau).0.norm() <= VANISHING {
            let (m, _) = nearest_resonance(w * tau);
            return Err(Error::Pole { index: m, omega: w });
        }
    }
    Ok(cavity::gamma_a(i, j, &p, &p2, tau))
}

/// χᴬ at one frequency for all mirror pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetricSusceptibility {
    pub omega: f64,
    pub chi: [[Complex64; 2]; 2],
    /// Σ_ij χᴬ_ij
    pub sum: Complex64,
    /// Largest absolute quadrature error estimate among the entries.
    pub error: f64,
    pub evaluations: usize,
}

impl AntisymmetricSusceptibility {
    pub fn get(&self, i: Mirror, j: Mirror) -> Complex64 {
        self.chi[i.index()][j.index()]
    }
}

/// Rotating ω′ = iy in the first term and ω′ = −iy in the second turns both
/// into the same integral,
/// χᴬ_ij[ω] = −(iħ/2πc²τ³) ∫_0^∞ y (x + iy) γᴬ_ij[iy, x + iy] dy, x = ωτ,
/// whose integrand decays like e^{−2y}.
fn chi_a_entry(
    kernel: &cavity::Kernel,
    i: Mirror,
    j: Mirror,
    x: f64,
    tol: &Tolerance,
) -> QuadResult {
    let f = |y: f64| {
        let a = Complex64::new(0.0, y);
        let b = Complex64::new(x, y);
        y * b * kernel.gamma_a(i, j, a, b)
    };
    let contour = HalfLineContour::default();
    let (r, _) = integrate_panels(
        &f,
        0.0,
        contour.panel,
        Complex64::new(0.0, 0.0),
        tol,
        &contour,
    );
    r
}

/// χᴬ_ij[ω] for analytic partially transmitting mirrors.
pub fn chi_a(
    config: &CavityConfig,
    i: Mirror,
    j: Mirror,
    omega: f64,
    tol: &Tolerance,
) -> Result<QuadResult> {
    let kernel = config.partial_kernel("chi_a")?;
    let tau = config.tau();
    let pref = -I * config.hbar() / (2.0 * PI * config.c().powi(2) * tau.powi(3));
    chi_a_entry(&kernel, i, j, omega * tau, tol)
        .scaled(pref)
        .require(tol)
}

/// All χᴬ_ij[ω] and their sum.
pub fn chi_a_matrix(
    config: &CavityConfig,
    omega: f64,
    tol: &Tolerance,
) -> Result<AntisymmetricSusceptibility> {
    let kernel = config.partial_kernel("chi_a")?;
    let tau = config.tau();
    let pref = -I * config.hbar() / (2.0 * PI * config.c().powi(2) * tau.powi(3));
    let x = omega * tau;
    let q11 = chi_a_entry(&kernel, Mirror::One, Mirror::One, x, tol)
        .scaled(pref)
        .require(tol)?;
    let q22 = chi_a_entry(&kernel, Mirror::Two, Mirror::Two, x, tol)
        .scaled(pref)
        .require(tol)?;
    let q21 = chi_a_entry(&kernel, Mirror::Two, Mirror::One, x, tol)
        .scaled(pref)
        .require(tol)?;
    let (c11, c22, c21) = (q11.value, q22.value, q21.value);
    Ok(AntisymmetricSusceptibility {
        omega,
        chi: [[c11, c21], [c21, c22]],
        sum: c11 + c22 + 2.0 * c21,
        error: q11.error.max(q22.error).max(q21.error),
        evaluations: q11.evaluations + q22.evaluations + q21.evaluations,
    })
}

/// Force-noise spectrum C_ij[ω] = 2ħθ(ω)ξ_ij[ω] at zero temperature.
///
/// Only the perfect-mirror dissipative parts are known in closed form;
/// partial mirrors would need the symmetric contribution as well.
pub fn fluctuation_spectrum(
    config: &CavityConfig,
    i: Mirror,
    j: Mirror,
    omega: f64,
) -> Result<f64> {
    config.require_perfect("fluctuation_spectrum")?;
    if omega <= 0.0 || i != j {
        return Ok(0.0);
    }
    let xi = config.hbar() * omega.powi(3) / (12.0 * PI * config.c().powi(2));
    Ok(2.0 * config.hbar() * xi)
}

/// A divergence of one of the susceptibilities inside a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleAnnotation {
    /// Resonance number m, at ωτ = mπ.
    pub index: i64,
    pub omega: f64,
    pub omega_tau: f64,
    /// Which quantities diverge there.
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub omega: f64,
    pub chi11: Complex64,
    pub chi12: Complex64,
    pub chi_sum: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub config: CavityConfig,
    /// `full` for perfect mirrors, `antisymmetric` for partial mirrors.
    pub content: String,
    pub rows: Vec<SpectrumRow>,
    pub poles: Vec<PoleAnnotation>,
    /// Grid frequencies dropped because they fell inside a pole exclusion band.
    pub excluded: Vec<f64>,
    /// Largest quadrature error estimate (zero for closed forms).
    pub achieved_error: f64,
}

pub const SPECTRUM_HEADER: [&str; 7] = [
    "omega",
    "re_chi11",
    "im_chi11",
    "re_chi12",
    "im_chi12",
    "re_chi_sum",
    "im_chi_sum",
];

/// Evaluates the susceptibilities on ωτ = k·(ωτ_max/steps), k = 0..=steps.
pub fn spectrum_scan(
    config: &CavityConfig,
    omega_tau_max: f64,
    steps: usize,
    tol: &Tolerance,
) -> Result<SpectrumScan> {
    if !(omega_tau_max > 0.0) || steps == 0 {
        return Err(Error::InvalidInput(
            "spectrum needs omega_tau_max > 0 and steps >= 1".into(),
        ));
    }
    let tau = config.tau();
    let grid: Vec<f64> = (0..=steps)
        .map(|k| k as f64 * omega_tau_max / steps as f64 / tau)
        .collect();
    let perfect = config.both_perfect();

    let mut poles = Vec::new();
    if perfect {
        let m_max = (omega_tau_max / PI).floor() as i64;
        for m in 2..=m_max {
            let mut components = vec!["chi11".to_string(), "chi12".to_string()];
            if m % 2 == 1 {
                components.push("chi_sum".to_string());
            }
            poles.push(PoleAnnotation {
                index: m,
                omega: m as f64 * PI / tau,
                omega_tau: m as f64 * PI,
                components,
            });
        }
    }

    let evaluated: Vec<Result<Option<(SpectrumRow, f64)>>> = grid
        .par_iter()
        .map(|&w| {
            if perfect {
                match chi_perfect(config, w) {
                    Ok(m) => Ok(Some((
                        SpectrumRow {
                            omega: w,
                            chi11: m.chi[0][0],
                            chi12: m.chi[0][1],
                            chi_sum: m.sum(),
                        },
                        0.0,
                    ))),
                    Err(Error::Pole { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            } else {
                let a = chi_a_matrix(config, w, tol)?;
                Ok(Some((
                    SpectrumRow {
                        omega: w,
                        chi11: a.chi[0][0],
                        chi12: a.chi[0][1],
                        chi_sum: a.sum,
                    },
                    a.error,
                )))
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(grid.len());
    let mut excluded = Vec::new();
    let mut achieved_error = 0.0f64;
    for (w, r) in grid.iter().zip(evaluated) {
        match r? {
            Some((row, err)) => {
                rows.push(row);
                achieved_error = achieved_error.max(err);
            }
            None => excluded.push(*w),
        }
    }
    Ok(SpectrumScan {
        config: config.clone(),
        content: if perfect { "full" } else { "antisymmetric" }.to_string(),
        rows,
        poles,
        excluded,
        achieved_error,
    })
}

impl SpectrumScan {
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.omega,
                    r.chi11.re,
                    r.chi11.im,
                    r.chi12.re,
                    r.chi12.im,
                    r.chi_sum.re,
                    r.chi_sum.im,
                ]
            })
            .collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_float_csv_file(path, &SPECTRUM_HEADER, &self.csv_rows())
    }

    /// Metadata block: configuration, units, pole annotations and exclusions.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "units": self.config.units.name(),
            "tau": self.config.tau(),
            "content": self.content,
            "poles": self.poles,
            "excluded_omega": self.excluded,
            "achieved_error": self.achieved_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitSystem;
    use approx::assert_relative_eq;

    fn perfect() -> CavityConfig {
        CavityConfig::perfect(1.0, UnitSystem::Natural).unwrap()
    }

    #[test]
    fn dissipative_part_at_unit_frequency() {
        let m = chi_perfect(&perfect(), 1.0).unwrap();
        assert_relative_eq!(m.dissipative[0][0], 1.0 / (12.0 * PI), max_relative = 1e-15);
        assert_eq!(m.dissipative[0][1], 0.0);
        assert_eq!(m.chi[0][1], m.chi[1][0]);
    }

    #[test]
    fn static_limit_matches_stiffness() {
        let m = chi_perfect(&perfect(), 0.0).unwrap();
        assert_relative_eq!(m.dispersive[0][0], PI / 12.0, max_relative = 1e-15);
        assert_relative_eq!(m.dispersive[0][1], -PI / 12.0, max_relative = 1e-15);
    }

    #[test]
    fn series_is_continuous_with_direct_formula() {
        let c = perfect();
        for x0 in [0.0, PI, -PI] {
            for s in [-1.0, 1.0] {
                let inside = chi_perfect(&c, x0 + s * 0.999e-3).unwrap();
                let outside = chi_perfect(&c, x0 + s * 1.001e-3).unwrap();
                for (a, b) in [(0, 0), (0, 1)] {
                    let (u, v) = (inside.dispersive[a][b], outside.dispersive[a][b]);
                    assert!((u - v).abs() < 1e-5 * u.abs().max(1e-3), "x0={x0} {u} {v}");
                }
            }
        }
    }

    #[test]
    fn cancelled_pole_at_pi() {
        let c = perfect();
        let m = chi_perfect(&c, PI).unwrap();
        assert_relative_eq!(m.dispersive[0][0], -PI / 6.0, max_relative = 1e-14);
        assert_relative_eq!(m.dispersive[0][1], -PI / 6.0, max_relative = 1e-14);
        let s = chi_compound_perfect(&c, PI).unwrap();
        assert_relative_eq!(s.dispersive, -2.0 * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn true_poles_carry_their_index() {
        let c = perfect();
        assert!(matches!(
            chi_perfect(&c, 2.0 * PI),
            Err(Error::Pole { index: 2, .. })
        ));
        assert!(matches!(
            chi_perfect(&c, -3.0 * PI),
            Err(Error::Pole { index: -3, .. })
        ));
        assert!(matches!(
            chi_compound_perfect(&c, 3.0 * PI),
            Err(Error::Pole { index: 3, .. })
        ));
        // individual entries diverge at 2π, the sum does not
        assert!(chi_compound_perfect(&c, 2.0 * PI)
            .unwrap()
            .chi
            .norm()
            .is_finite());
    }

    #[test]
    fn compound_limits() {
        let c = perfect();
        let w = 1e-4;
        let s = chi_compound_perfect(&c, w).unwrap();
        assert_relative_eq!(s.dispersive / (w * w), -PI / 12.0, max_relative = 1e-7);
        let s2 = chi_compound_perfect(&c, 2.0).unwrap();
        assert_relative_eq!(s2.dissipative, 8.0 / (6.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn compound_equals_matrix_sum() {
        let c = perfect();
        for &w in &[0.3, 1.7, 2.9, 3.3, 4.0, 7.1, 11.0, -5.3] {
            let m = chi_perfect(&c, w).unwrap();
            let s = chi_compound_perfect(&c, w).unwrap();
            assert!((m.sum() - s.chi).norm() < 1e-10 * s.chi.norm(), "w={w}");
        }
    }

    #[test]
    fn denominator_reference_values() {
        let c = perfect();
        let d = cavity_denominator(&c, PI / 2.0).unwrap();
        assert!((d.d - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(cavity_denominator(&c, 0.0).unwrap().d.norm(), 0.0);
        let l = CavityConfig::lorentzian(1.0, 10.0, UnitSystem::Natural).unwrap();
        assert!(cavity_denominator(&l, PI).unwrap().d.norm() > 0.0);
    }

    #[test]
    fn gamma_a_rejects_static_pole_of_perfect_cavity() {
        assert!(matches!(
            gamma_a(&perfect(), Mirror::One, Mirror::One, 0.0, 1.0),
            Err(Error::Pole { index: 0, .. })
        ));
    }

    #[test]
    fn gamma_a_matches_transfer_matrix_sum() {
        // γᴬ₁₁ re-derived from the multiple-reflection series
        // 1/(d d′) = Σ_{n,m} (r₁r₂e^{2iωτ})ⁿ (r₁′r₂′e^{2iω′τ})ᵐ.
        let c = CavityConfig::lorentzian(1.0, 5.0, UnitSystem::Natural).unwrap();
        let (w, w2) = (1.0, 1.0);
        let r = c.mirror1.reflectivity(w).unwrap();
        let r2 = c.mirror1.reflectivity(w2).unwrap();
        let (a, b) = (r * r * (2.0 * I * w).exp(), r2 * r2 * (2.0 * I * w2).exp());
        let geometric = |z: Complex64| {
            let (mut sum, mut term) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            for _ in 0..2000 {
                sum += term;
                term *= z;
            }
            sum
        };
        let series = geometric(a) * geometric(b);
        let num = (r + r2) * (r * (2.0 * I * w).exp() + r2 * (2.0 * I * w2).exp());
        let g = gamma_a(&c, Mirror::One, Mirror::One, w, w2).unwrap();
        assert!((g - num * series).norm() < 1e-10 * g.norm());
    }

    #[test]
    fn fluctuation_spectrum_reference_values() {
        let c = perfect();
        assert_relative_eq!(
            fluctuation_spectrum(&c, Mirror::One, Mirror::One, 1.0).unwrap(),
            1.0 / (6.0 * PI),
            max_relative = 1e-15
        );
        assert_eq!(
            fluctuation_spectrum(&c, Mirror::One, Mirror::One, -1.0).unwrap(),
            0.0
        );
        assert_eq!(
            fluctuation_spectrum(&c, Mirror::One, Mirror::Two, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn chi_a_requires_partial_mirrors() {
        let r = chi_a(
            &perfect(),
            Mirror::One,
            Mirror::One,
            0.5,
            &Tolerance::default(),
        );
        assert!(matches!(r, Err(Error::UnsupportedModel { .. })));
    }

    #[test]
    fn chi_a_static_value_is_real() {
        let c = CavityConfig::lorentzian(1.0, 10.0, UnitSystem::Natural).unwrap();
        let a = chi_a_matrix(&c, 0.0, &Tolerance::default()).unwrap();
        for v in a.chi.iter().flatten() {
            assert!(v.im.abs() < 1e-12 * v.re.abs(), "{v}");
        }
        assert!((a.chi[0][0] + a.chi[0][1]).norm() < 1e-12 * a.chi[0][0].norm());
    }

    #[test]
    fn perfect_scan_annotates_poles() {
        let s = spectrum_scan(&perfect(), 12.0, 2000, &Tolerance::default()).unwrap();
        let idx: Vec<i64> = s.poles.iter().map(|p| p.index).collect();
        assert_eq!(idx, vec![2, 3]);
        assert!(s.poles[1].components.contains(&"chi_sum".to_string()));
        assert_eq!(s.rows.len() + s.excluded.len(), 2001);
    }
}
