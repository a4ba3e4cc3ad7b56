//! Two-mirror cavity configuration and the interference kernels built from
//! the mirror amplitudes: the denominator d[ω], the antisymmetric kernels
//! γᴬ_ij[ω, ω′] and their mixed derivatives Γ_ij[ω].
//!
//! The kernel formulas are written once over a [`KernelPoint`] so the same
//! code serves physical frequencies (tabulated mirrors, real ω) and the
//! dimensionless complex frequencies used by the quadratures (τ = 1).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mirror::{MirrorModel, ScaledReflector};
use crate::units::UnitSystem;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default half-width (in ωτ) of the band around a true pole where
/// susceptibilities refuse to evaluate.
pub const DEFAULT_POLE_EXCLUSION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Mirror separation.
    pub q: f64,
    pub mirror1: MirrorModel,
    pub mirror2: MirrorModel,
    pub units: UnitSystem,
    /// Half-width in ωτ of the exclusion band around divergences.
    pub pole_exclusion: f64,
}

/// Mirror index, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mirror {
    One,
    Two,
}

impl Mirror {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Mirror::One),
            2 => Ok(Mirror::Two),
            _ => Err(Error::InvalidInput(format!(
                "mirror index must be 1 or 2, got {i}"
            ))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mirror::One => 0,
            Mirror::Two => 1,
        }
    }
}

impl CavityConfig {
    pub fn new(
        q: f64,
        mirror1: MirrorModel,
        mirror2: MirrorModel,
        units: UnitSystem,
    ) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidInput(format!(
                "mirror separation must be positive and finite, got {q}"
            )));
        }
        Ok(Self {
            q,
            mirror1,
            mirror2,
            units,
            pole_exclusion: DEFAULT_POLE_EXCLUSION,
        })
    }

    /// Two perfect mirrors at separation `q`.
    pub fn perfect(q: f64, units: UnitSystem) -> Result<Self> {
        Self::new(q, MirrorModel::perfect(), MirrorModel::perfect(), units)
    }

    /// Two identical Lorentzian mirrors with cutoff `omega_cutoff`.
    pub fn lorentzian(q: f64, omega_cutoff: f64, units: UnitSystem) -> Result<Self> {
        let m = MirrorModel::lorentzian(omega_cutoff)?;
        Self::new(q, m.clone(), m, units)
    }

    pub fn with_pole_exclusion(mut self, radius: f64) -> Self {
        self.pole_exclusion = radius;
        self
    }

    /// Same mirrors at a different separation.
    pub fn with_separation(&self, q: f64) -> Result<Self> {
        let mut c = Self::new(q, self.mirror1.clone(), self.mirror2.clone(), self.units)?;
        c.pole_exclusion = self.pole_exclusion;
        Ok(c)
    }

    pub fn hbar(&self) -> f64 {
        self.units.hbar()
    }

    pub fn c(&self) -> f64 {
        self.units.c()
    }

    /// One-way delay τ = q/c.
    pub fn tau(&self) -> f64 {
        self.q / self.c()
    }

    pub fn both_perfect(&self) -> bool {
        self.mirror1.is_perfect() && self.mirror2.is_perfect()
    }

    pub fn any_perfect(&self) -> bool {
        self.mirror1.is_perfect() || self.mirror2.is_perfect()
    }

    pub fn mirror(&self, m: Mirror) -> &MirrorModel {
        match m {
            Mirror::One => &self.mirror1,
            Mirror::Two => &self.mirror2,
        }
    }

    pub(crate) fn require_perfect(&self, operation: &'static str) -> Result<()> {
        for m in [&self.mirror1, &self.mirror2] {
            if !m.is_perfect() {
                return Err(Error::UnsupportedModel {
                    operation,
                    model: m.to_string(),
                    reason: "closed forms hold for perfect mirrors only",
                });
            }
        }
        Ok(())
    }

    /// Dimensionless kernel (frequencies in units of 1/τ) for analytic,
    /// partially transmitting mirrors.
    pub(crate) fn partial_kernel(&self, operation: &'static str) -> Result<Kernel> {
        for m in [&self.mirror1, &self.mirror2] {
            if m.is_perfect() {
                return Err(Error::UnsupportedModel {
                    operation,
                    model: m.to_string(),
                    reason: "the frequency integral has no transparency cutoff",
                });
            }
            if !m.is_analytic() {
                return Err(Error::UnsupportedModel {
                    operation,
                    model: m.to_string(),
                    reason: "the quadrature contour needs the analytic continuation of r",
                });
            }
        }
        Ok(self.kernel_unchecked())
    }

    pub(crate) fn kernel_unchecked(&self) -> Kernel {
        let tau = self.tau();
        Kernel {
            m1: self.mirror1.analytic_scaled(tau).expect("analytic mirror"),
            m2: self.mirror2.analytic_scaled(tau).expect("analytic mirror"),
        }
    }

    /// Distance (in ωτ) from the origin to the nearest singularity of the
    /// reflection amplitudes.
    pub(crate) fn singularity_distance(&self) -> f64 {
        let tau = self.tau();
        [&self.mirror1, &self.mirror2]
            .iter()
            .filter_map(|m| m.cutoff())
            .map(|w| w * tau)
            .fold(f64::INFINITY, f64::min)
    }

    /// r_i and r_i′ for both mirrors at a real physical frequency.
    pub(crate) fn point(&self, omega: f64) -> Result<KernelPoint> {
        Ok(KernelPoint {
            z: omega.into(),
            r1: self.mirror1.reflectivity(omega)?,
            dr1: self.mirror1.reflectivity_derivative(omega)?,
            r2: self.mirror2.reflectivity(omega)?,
            dr2: self.mirror2.reflectivity_derivative(omega)?,
        })
    }
}

/// Mirror amplitudes and their frequency derivatives at one (complex)
/// frequency, in units consistent with the delay passed to the formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct KernelPoint {
    pub z: Complex64,
    pub r1: Complex64,
    pub dr1: Complex64,
    pub r2: Complex64,
    pub dr2: Complex64,
}

impl KernelPoint {
    fn swapped(self) -> Self {
        Self {
            r1: self.r2,
            dr1: self.dr2,
            r2: self.r1,
            dr2: self.dr1,
            ..self
        }
    }

    /// Round-trip loop gain r₁r₂e^{2izτ} = 1 − d, computed without cancellation.
    pub fn loop_gain(&self, tau: f64) -> Complex64 {
        self.r1 * self.r2 * (2.0 * I * self.z * tau).exp()
    }

    /// d = 1 − r₁r₂e^{2izτ} and its derivative.
    pub fn denominator(&self, tau: f64) -> (Complex64, Complex64) {
        let phase = (2.0 * I * self.z * tau).exp();
        let rr = self.r1 * self.r2;
        let d = 1.0 - rr * phase;
        let dd = -(self.dr1 * self.r2 + self.r1 * self.dr2) * phase - 2.0 * I * tau * rr * phase;
        (d, dd)
    }
}

/// γᴬ_ij[ω, ω′] with `p` at ω and `p2` at ω′.
pub(crate) fn gamma_a(
    i: Mirror,
    j: Mirror,
    p: &KernelPoint,
    p2: &KernelPoint,
    tau: f64,
) -> Complex64 {
    match (i, j) {
        (Mirror::One, Mirror::One) => gamma_a_11(p, p2, tau),
        (Mirror::Two, Mirror::Two) => gamma_a_11(&p.swapped(), &p2.swapped(), tau),
        _ => gamma_a_21(p, p2, tau),
    }
}

fn gamma_a_11(p: &KernelPoint, p2: &KernelPoint, tau: f64) -> Complex64 {
    let (d, _) = p.denominator(tau);
    let (d2, _) = p2.denominator(tau);
    let e = (2.0 * I * p.z * tau).exp();
    let e2 = (2.0 * I * p2.z * tau).exp();
    (p.r1 + p2.r1) * (p.r2 * e + p2.r2 * e2) / (d * d2)
}

fn gamma_a_21(p: &KernelPoint, p2: &KernelPoint, tau: f64) -> Complex64 {
    let (d, _) = p.denominator(tau);
    let (d2, _) = p2.denominator(tau);
    let e = (I * (p.z + p2.z) * tau).exp();
    -(p.r1 + p2.r1) * (p.r2 + p2.r2) * e / (d * d2)
}

/// Γ_ij[ω] = −(∂_ω∂_ω′ γᴬ_ij)(ω, ω).
pub(crate) fn gamma_capital(i: Mirror, j: Mirror, p: &KernelPoint, tau: f64) -> Complex64 {
    match (i, j) {
        (Mirror::One, Mirror::One) => gamma_capital_11(p, tau),
        (Mirror::Two, Mirror::Two) => gamma_capital_11(&p.swapped(), tau),
        _ => gamma_capital_21(p, tau),
    }
}

fn gamma_capital_11(p: &KernelPoint, tau: f64) -> Complex64 {
    let (d, dd) = p.denominator(tau);
    let e = (2.0 * I * p.z * tau).exp();
    let d2 = d * d;
    -2.0 * p.dr1 * e * (2.0 * I * tau * p.r2 + p.dr2) / d2 - 4.0 * dd * dd / (d2 * d2)
}

fn gamma_capital_21(p: &KernelPoint, tau: f64) -> Complex64 {
    let (d, dd) = p.denominator(tau);
    let e = (2.0 * I * p.z * tau).exp();
    let d2 = d * d;
    -4.0 * I * tau * dd / d2
        + 4.0 * tau * tau * p.loop_gain(tau) / d2
        + 2.0 * p.dr1 * p.dr2 * e / d2
        + 4.0 * dd * dd / (d2 * d2)
}

/// Σ_ij Γ_ij = −4iτ d′/d².
pub(crate) fn gamma_capital_sum(p: &KernelPoint, tau: f64) -> Complex64 {
    let (d, dd) = p.denominator(tau);
    -4.0 * I * tau * dd / (d * d)
}

/// Analytic mirrors in dimensionless frequency x = ωτ (so τ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Kernel {
    pub m1: ScaledReflector,
    pub m2: ScaledReflector,
}

impl Kernel {
    #[inline]
    pub fn point(&self, z: Complex64) -> KernelPoint {
        KernelPoint {
            z,
            r1: self.m1.r(z),
            dr1: self.m1.dr(z),
            r2: self.m2.r(z),
            dr2: self.m2.dr(z),
        }
    }

    /// (d, d′, 1 − d) at z.
    pub fn denominator_and_gain(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let p = self.point(z);
        let (d, dd) = p.denominator(1.0);
        (d, dd, p.loop_gain(1.0))
    }

    pub fn gamma_a(&self, i: Mirror, j: Mirror, a: Complex64, b: Complex64) -> Complex64 {
        gamma_a(i, j, &self.point(a), &self.point(b), 1.0)
    }

    pub fn gamma_capital(&self, i: Mirror, j: Mirror, z: Complex64) -> Complex64 {
        gamma_capital(i, j, &self.point(z), 1.0)
    }

    pub fn gamma_capital_sum(&self, z: Complex64) -> Complex64 {
        gamma_capital_sum(&self.point(z), 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_separation() {
        assert!(CavityConfig::perfect(0.0, UnitSystem::Natural).is_err());
        assert!(CavityConfig::perfect(-1.0, UnitSystem::Natural).is_err());
        assert!(CavityConfig::perfect(f64::INFINITY, UnitSystem::Natural).is_err());
    }

    #[test]
    fn delay_uses_speed_of_light() {
        let c = CavityConfig::perfect(2.0, UnitSystem::Natural).unwrap();
        assert_eq!(c.tau(), 2.0);
        let si = CavityConfig::perfect(1.0, UnitSystem::Si).unwrap();
        assert!((si.tau() - 1.0 / crate::units::C_SI).abs() < 1e-25);
    }

    #[test]
    fn gamma_capital_21_matches_mirror_exchange() {
        let c = CavityConfig::new(
            1.0,
            MirrorModel::lorentzian(3.0).unwrap(),
            MirrorModel::lorentzian(8.0).unwrap(),
            UnitSystem::Natural,
        )
        .unwrap();
        let k = c.kernel_unchecked();
        let z = Complex64::new(0.7, 0.2);
        let swapped = Kernel { m1: k.m2, m2: k.m1 };
        let a = k.gamma_capital(Mirror::Two, Mirror::One, z);
        let b = swapped.gamma_capital(Mirror::Two, Mirror::One, z);
        assert!((a - b).norm() < 1e-13 * a.norm());
        let g11 = k.gamma_capital(Mirror::One, Mirror::One, z);
        let g22 = swapped.gamma_capital(Mirror::Two, Mirror::Two, z);
        assert!((g11 - g22).norm() < 1e-13 * g11.norm());
    }
}
