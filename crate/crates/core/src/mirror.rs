//! Frequency-dependent mirror reflection amplitudes.
//!
//! Time dependence is `e^{-iωt}`, so a causal amplitude is analytic for
//! `Im ω > 0`. Every model obeys the reality symmetry `r[-ω] = conj(r[ω])`.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MirrorKind {
    /// Perfect reflection at all frequencies, r ≡ −1.
    Perfect,
    /// Single-pole lossless point scatterer, r = −1/(1 − iω/Ω).
    Lorentzian { cutoff: f64 },
    /// Samples on ω ≥ 0; the negative side follows from the reality symmetry.
    Tabulated(ReflectivityTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirrorModel {
    pub kind: MirrorKind,
    pub label: String,
}

impl fmt::Display for MirrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MirrorKind::Perfect => write!(f, "perfect[{}]", self.label),
            MirrorKind::Lorentzian { cutoff } => {
                write!(f, "lorentzian(Omega={cutoff})[{}]", self.label)
            }
            MirrorKind::Tabulated(t) => {
                write!(f, "tabulated({} samples)[{}]", t.omega.len(), self.label)
            }
        }
    }
}

/// Linear (Re/Im separately) interpolation table of r on a non-negative grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectivityTable {
    omega: Vec<f64>,
    r: Vec<Complex64>,
    dr: Vec<Complex64>,
}

impl ReflectivityTable {
    pub fn new(omega: Vec<f64>, mut r: Vec<Complex64>) -> Result<Self> {
        if omega.len() < 2 || omega.len() != r.len() {
            return Err(Error::InvalidInput(
                "tabulated reflectivity needs at least two (omega, r) rows".into(),
            ));
        }
        if omega[0] < 0.0 || !omega.iter().all(|w| w.is_finite()) {
            return Err(Error::InvalidInput(
                "tabulated frequencies must be finite and non-negative".into(),
            ));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "tabulated frequencies must be strictly increasing".into(),
            ));
        }
        if let Some((w, v)) = omega.iter().zip(&r).find(|(_, v)| v.norm() > 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "|r| = {} > 1 at omega = {w}",
                v.norm()
            )));
        }
        // r[0] must be real for the mirrored table to be continuous.
        if omega[0] == 0.0 {
            r[0].im = 0.0;
        }
        let dr = node_derivatives(&omega, &r);
        Ok(Self { omega, r, dr })
    }

    /// Samples an arbitrary amplitude function on `grid`.
    pub fn sample(grid: &[f64], f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|&w| f(w)).collect())
    }

    /// Reads a CSV with header `omega,re_r,im_r`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let expected = ["omega", "re_r", "im_r"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(Error::InvalidInput(format!(
                "reflectivity table header must be `omega,re_r,im_r`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut omega = Vec::new();
        let mut r = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("row {}: column {i}: {e}", line + 2)))
            };
            omega.push(field(0)?);
            r.push(Complex64::new(field(1)?, field(2)?));
        }
        Self::new(omega, r)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn max_omega(&self) -> f64 {
        *self.omega.last().unwrap()
    }

    fn locate(&self, w: f64) -> Result<(usize, f64)> {
        let (lo, hi) = (self.omega[0], self.max_omega());
        if !(lo..=hi).contains(&w) {
            return Err(Error::OutOfRange {
                omega: w,
                min: lo,
                max: hi,
            });
        }
        let k = match self.omega.partition_point(|&x| x <= w) {
            0 => 0,
            n if n >= self.omega.len() => self.omega.len() - 2,
            n => n - 1,
        };
        let t = (w - self.omega[k]) / (self.omega[k + 1] - self.omega[k]);
        Ok((k, t))
    }

    fn interp(values: &[Complex64], k: usize, t: f64) -> Complex64 {
        values[k] * (1.0 - t) + values[k + 1] * t
    }

    fn eval(&self, w: f64) -> Result<Complex64> {
        let (k, t) = self.locate(w.abs()).map_err(|_| self.range_error(w))?;
        let v = Self::interp(&self.r, k, t);
        Ok(if w < 0.0 { v.conj() } else { v })
    }

    fn eval_derivative(&self, w: f64) -> Result<Complex64> {
        let (k, t) = self.locate(w.abs()).map_err(|_| self.range_error(w))?;
        let v = Self::interp(&self.dr, k, t);
        // r'(-ω) = -conj(r'(ω))
        Ok(if w < 0.0 { -v.conj() } else { v })
    }

    fn range_error(&self, w: f64) -> Error {
        Error::OutOfRange {
            omega: w,
            min: if self.omega[0] == 0.0 {
                -self.max_omega()
            } else {
                self.omega[0]
            },
            max: self.max_omega(),
        }
    }
}

/// Centered (non-uniform) differences, one-sided at the far end; the node at
/// ω = 0 uses the mirrored neighbour.
fn node_derivatives(w: &[f64], r: &[Complex64]) -> Vec<Complex64> {
    let n = w.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let d = if k == 0 {
            if w[0] == 0.0 {
                Complex64::new(0.0, r[1].im / w[1])
            } else {
                (r[1] - r[0]) / (w[1] - w[0])
            }
        } else if k == n - 1 {
            (r[k] - r[k - 1]) / (w[k] - w[k - 1])
        } else {
            let (h0, h1) = (w[k] - w[k - 1], w[k + 1] - w[k]);
            (r[k + 1] - r[k]) * (h0 / (h1 * (h0 + h1)))
                + (r[k] - r[k - 1]) * (h1 / (h0 * (h0 + h1)))
        };
        out.push(d);
    }
    out
}

/// Transmission amplitude `s = 1 + r`, with `defined = false` for perfect
/// mirrors where no transmission exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub amplitude: Complex64,
    pub defined: bool,
}

impl MirrorModel {
    pub fn perfect() -> Self {
        Self {
            kind: MirrorKind::Perfect,
            label: "perfect".into(),
        }
    }

    pub fn lorentzian(cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidInput(format!(
                "Lorentzian cutoff must be positive and finite, got {cutoff}"
            )));
        }
        Ok(Self {
            kind: MirrorKind::Lorentzian { cutoff },
            label: format!("lorentzian:omega={cutoff}"),
        })
    }

    pub fn tabulated(table: ReflectivityTable, label: impl Into<String>) -> Self {
        Self {
            kind: MirrorKind::Tabulated(table),
            label: label.into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self.kind, MirrorKind::Perfect)
    }

    /// Reflection cutoff, when the model has one.
    pub fn cutoff(&self) -> Option<f64> {
        match self.kind {
            MirrorKind::Lorentzian { cutoff } => Some(cutoff),
            _ => None,
        }
    }

    /// r[ω] for real ω.
    pub fn reflectivity(&self, omega: f64) -> Result<Complex64> {
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite frequency {omega}")));
        }
        match &self.kind {
            MirrorKind::Tabulated(t) => t.eval(omega),
            _ => Ok(self.analytic_reflectivity(omega.into()).unwrap()),
        }
    }

    /// dr/dω for real ω.
    pub fn reflectivity_derivative(&self, omega: f64) -> Result<Complex64> {
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite frequency {omega}")));
        }
        match &self.kind {
            MirrorKind::Tabulated(t) => t.eval_derivative(omega),
            _ => Ok(self.analytic_derivative(omega.into()).unwrap()),
        }
    }

    /// Analytic continuation of r to complex frequency; `None` for tabulated data.
    pub fn analytic_reflectivity(&self, z: Complex64) -> Option<Complex64> {
        match self.kind {
            MirrorKind::Perfect => Some(Complex64::new(-1.0, 0.0)),
            MirrorKind::Lorentzian { cutoff } => Some(-(1.0 - I * z / cutoff).inv()),
            MirrorKind::Tabulated(_) => None,
        }
    }

    pub fn analytic_derivative(&self, z: Complex64) -> Option<Complex64> {
        match self.kind {
            MirrorKind::Perfect => Some(Complex64::new(0.0, 0.0)),
            MirrorKind::Lorentzian { cutoff } => {
                let den = 1.0 - I * z / cutoff;
                Some(-(I / cutoff) / (den * den))
            }
            MirrorKind::Tabulated(_) => None,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, MirrorKind::Tabulated(_))
    }

    pub fn transmission(&self, omega: f64) -> Result<Transmission> {
        if self.is_perfect() {
            return Ok(Transmission {
                amplitude: Complex64::new(0.0, 0.0),
                defined: false,
            });
        }
        Ok(Transmission {
            amplitude: 1.0 + self.reflectivity(omega)?,
            defined: true,
        })
    }

    /// Same model with every frequency scale multiplied by `factor`
    /// (r'[ω] = r[ω/factor]). Used to pass to dimensionless frequencies.
    pub(crate) fn analytic_scaled(&self, factor: f64) -> Option<ScaledReflector> {
        match self.kind {
            MirrorKind::Perfect => Some(ScaledReflector::Perfect),
            MirrorKind::Lorentzian { cutoff } => Some(ScaledReflector::Lorentzian {
                cutoff: cutoff * factor,
            }),
            MirrorKind::Tabulated(_) => None,
        }
    }
}

/// Analytic reflector in dimensionless frequency; the hot path of every
/// quadrature, so it avoids `Option`/`Result` plumbing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ScaledReflector {
    Perfect,
    Lorentzian { cutoff: f64 },
}

impl ScaledReflector {
    #[inline]
    pub(crate) fn r(self, z: Complex64) -> Complex64 {
        match self {
            ScaledReflector::Perfect => Complex64::new(-1.0, 0.0),
            ScaledReflector::Lorentzian { cutoff } => -(1.0 - I * z / cutoff).inv(),
        }
    }

    #[inline]
    pub(crate) fn dr(self, z: Complex64) -> Complex64 {
        match self {
            ScaledReflector::Perfect => Complex64::new(0.0, 0.0),
            ScaledReflector::Lorentzian { cutoff } => {
                let den = 1.0 - I * z / cutoff;
                -(I / cutoff) / (den * den)
            }
        }
    }
}

/// Tolerances for [`verify_physicality`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalityTolerances {
    pub modulus: f64,
    pub symmetry: f64,
    /// Maximum |r| at the top of the grid for a model to count as transparent.
    pub transparency: f64,
    /// Relative Kramers-Kronig mismatch (relative to max |r| on the grid).
    pub kramers_kronig: f64,
}

impl Default for PhysicalityTolerances {
    fn default() -> Self {
        Self {
            modulus: 1e-12,
            symmetry: 1e-12,
            transparency: 1e-2,
            kramers_kronig: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalityReport {
    pub max_modulus_excess: f64,
    pub max_symmetry_residual: f64,
    pub transparency_tail: f64,
    /// Max |Im r − H[Re r]| / max|r| over the lower half of the grid.
    pub kramers_kronig_residual: f64,
    /// Same residual on every other grid point (refinement check).
    pub kramers_kronig_residual_coarse: f64,
    pub transparent: bool,
    /// Perfect mirrors are exempt from the transparency and causality checks.
    pub exempt: bool,
    pub passed: bool,
}

/// Checks boundedness, reality symmetry, high-frequency transparency and
/// causality (Kramers-Kronig) of a model on a positive, increasing grid.
pub fn verify_physicality(
    model: &MirrorModel,
    grid: &[f64],
    tol: &PhysicalityTolerances,
) -> Result<PhysicalityReport> {
    if grid.len() < 8 {
        return Err(Error::InvalidInput(
            "physicality grid needs >= 8 points".into(),
        ));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "physicality grid must be positive and strictly increasing".into(),
        ));
    }
    let mut excess = 0.0_f64;
    let mut symmetry = 0.0_f64;
    let mut values = Vec::with_capacity(grid.len());
    for &w in grid {
        let r = model.reflectivity(w)?;
        let r_neg = model.reflectivity(-w)?;
        excess = excess.max(r.norm() - 1.0);
        symmetry = symmetry.max((r_neg - r.conj()).norm());
        values.push(r);
    }
    let excess = excess.max(0.0);
    let tail = values.last().unwrap().norm();

    if model.is_perfect() {
        return Ok(PhysicalityReport {
            max_modulus_excess: excess,
            max_symmetry_residual: symmetry,
            transparency_tail: tail,
            kramers_kronig_residual: 0.0,
            kramers_kronig_residual_coarse: 0.0,
            transparent: false,
            exempt: true,
            passed: excess <= tol.modulus && symmetry <= tol.symmetry,
        });
    }

    // Include ω = 0 when the model covers it so the Hilbert integral starts at 0.
    let (nodes, samples) = match model.reflectivity(0.0) {
        Ok(r0) => {
            let mut n = vec![0.0];
            n.extend_from_slice(grid);
            let mut s = vec![r0];
            s.extend_from_slice(&values);
            (n, s)
        }
        Err(_) => (grid.to_vec(), values.clone()),
    };
    let scale = samples
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let kk = kramers_kronig_residual(&nodes, &samples) / scale;
    let coarse_nodes: Vec<f64> = nodes.iter().step_by(2).copied().collect();
    let coarse_samples: Vec<Complex64> = samples.iter().step_by(2).copied().collect();
    let kk_coarse = kramers_kronig_residual(&coarse_nodes, &coarse_samples) / scale;

    let transparent = tail <= tol.transparency;
    Ok(PhysicalityReport {
        max_modulus_excess: excess,
        max_symmetry_residual: symmetry,
        transparency_tail: tail,
        kramers_kronig_residual: kk,
        kramers_kronig_residual_coarse: kk_coarse,
        transparent,
        exempt: false,
        passed: excess <= tol.modulus
            && symmetry <= tol.symmetry
            && transparent
            && kk <= tol.kramers_kronig,
    })
}

/// Max |Im r(ω) − H[Re r](ω)| over nodes in the lower half of the span.
fn kramers_kronig_residual(nodes: &[f64], r: &[Complex64]) -> f64 {
    let re: Vec<f64> = r.iter().map(|v| v.re).collect();
    let h = hilbert_of_even(nodes, &re);
    let top = *nodes.last().unwrap();
    nodes
        .iter()
        .zip(r)
        .zip(&h)
        .filter(|((&w, _), _)| w > 0.0 && w <= 0.5 * top)
        .map(|((_, v), hv)| (v.im - hv).abs())
        .fold(0.0, f64::max)
}

/// Discrete Hilbert transform `H[g](ω) = (1/π) P∫ g(x)/(ω − x) dx` of an even
/// function sampled on `0 ≤ x_0 < … < x_n`, evaluated at the sample points.
///
/// Folding the even function onto x ≥ 0 gives the kernel 2ω/(ω² − x²). The
/// singularity is subtracted (its principal value is a closed-form log) and
/// the regular remainder is integrated by the trapezoid rule. The part of the
/// integral beyond the last node assumes an inverse-square tail.
pub fn hilbert_of_even(x: &[f64], g: &[f64]) -> Vec<f64> {
    let n = x.len();
    let top = x[n - 1];
    let bottom = x[0];
    let slope: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                if bottom == 0.0 {
                    0.0
                } else {
                    (g[1] - g[0]) / (x[1] - x[0])
                }
            } else if k == n - 1 {
                (g[k] - g[k - 1]) / (x[k] - x[k - 1])
            } else {
                let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
                (g[k + 1] - g[k]) * (h0 / (h1 * (h0 + h1)))
                    + (g[k] - g[k - 1]) * (h1 / (h0 * (h0 + h1)))
            }
        })
        .collect();

    (0..n)
        .map(|i| {
            let w = x[i];
            if w == 0.0 {
                return 0.0;
            }
            if i == n - 1 {
                return f64::NAN;
            }
            let phi = |j: usize| -> f64 {
                if j == i {
                    -slope[i]
                } else {
                    (g[j] - g[i]) * 2.0 * w / ((w - x[j]) * (w + x[j]))
                }
            };
            let mut regular = 0.0;
            let mut prev = phi(0);
            for j in 1..n {
                let cur = phi(j);
                regular += 0.5 * (x[j] - x[j - 1]) * (prev + cur);
                prev = cur;
            }
            let mut log_term = ((top + w) / (top - w)).ln();
            if bottom > 0.0 {
                log_term -= ((w + bottom) / (w - bottom).abs()).ln();
            }
            // ∫_top^∞ g(top)(top/x)² 2ω/(ω² − x²) dx
            let tail = 2.0 * w * g[n - 1] * top * top / (w * w)
                * (1.0 / top - ((top + w) / (top - w)).ln() / (2.0 * w));
            (regular + g[i] * log_term + tail) / std::f64::consts::PI
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let (a, b) = (lo.ln(), hi.ln());
        (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect()
    }

    #[test]
    fn perfect_reflectivity_is_minus_one() {
        let m = MirrorModel::perfect();
        for w in [-3.0, 0.0, 1.0, 1e6] {
            assert_eq!(m.reflectivity(w).unwrap(), Complex64::new(-1.0, 0.0));
            assert_eq!(
                m.reflectivity_derivative(w).unwrap(),
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn lorentzian_reference_values() {
        let m = MirrorModel::lorentzian(3.0).unwrap();
        assert_eq!(m.reflectivity(0.0).unwrap(), Complex64::new(-1.0, 0.0));
        let r = m.reflectivity(3.0).unwrap();
        assert_relative_eq!(r.re, -0.5, epsilon = 1e-15);
        assert_relative_eq!(r.im, -0.5, epsilon = 1e-15);
        let d0 = m.reflectivity_derivative(0.0).unwrap();
        assert_relative_eq!(d0.im, -1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(d0.re, 0.0);
        let two = MirrorModel::lorentzian(2.0).unwrap();
        let d = two.reflectivity_derivative(2.0).unwrap();
        assert_relative_eq!(d.re, 0.25, epsilon = 1e-15);
        assert!(d.im.abs() < 1e-15);
    }

    #[test]
    fn lorentzian_transmission_is_unitary() {
        let m = MirrorModel::lorentzian(1.5).unwrap();
        assert_eq!(
            m.transmission(0.0).unwrap().amplitude,
            Complex64::new(0.0, 0.0)
        );
        let s = m.transmission(1.5).unwrap().amplitude;
        assert_relative_eq!(s.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.im, -0.5, epsilon = 1e-15);
        let far = m.transmission(1e12).unwrap().amplitude;
        assert_relative_eq!(far.re, 1.0, epsilon = 1e-12);
        for w in log_grid(1e-4, 1e4, 200) {
            let r = m.reflectivity(w).unwrap();
            let s = m.transmission(w).unwrap().amplitude;
            assert!((r.norm_sqr() + s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_transmission_is_flagged() {
        let t = MirrorModel::perfect().transmission(1.0).unwrap();
        assert!(!t.defined);
        assert_eq!(t.amplitude, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn invalid_cutoff_rejected() {
        assert!(MirrorModel::lorentzian(0.0).is_err());
        assert!(MirrorModel::lorentzian(f64::NAN).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_mirrors() {
        let lor = MirrorModel::lorentzian(1.0).unwrap();
        let grid: Vec<f64> = (0..=4000).map(|k| k as f64 * 0.005).collect();
        let table = ReflectivityTable::sample(&grid, |w| lor.reflectivity(w).unwrap()).unwrap();
        let tab = MirrorModel::tabulated(table, "sampled");
        for w in [0.0, 0.0123, 0.7, 3.3, -2.1, 19.99] {
            let a = tab.reflectivity(w).unwrap();
            let b = lor.reflectivity(w).unwrap();
            assert!((a - b).norm() < 1e-5, "w={w}: {a} vs {b}");
            let da = tab.reflectivity_derivative(w).unwrap();
            let db = lor.reflectivity_derivative(w).unwrap();
            assert!((da - db).norm() < 1e-4, "w={w}: {da} vs {db}");
        }
        assert!(matches!(
            tab.reflectivity(20.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn tabulated_rejects_bad_rows() {
        let c = Complex64::new(-0.5, 0.0);
        assert!(ReflectivityTable::new(vec![0.0, 0.0], vec![c, c]).is_err());
        assert!(ReflectivityTable::new(vec![-1.0, 1.0], vec![c, c]).is_err());
        assert!(ReflectivityTable::new(vec![0.0, 1.0], vec![c, Complex64::new(1.1, 0.0)]).is_err());
    }

    #[test]
    fn tabulated_without_zero_has_a_gap() {
        let t = ReflectivityTable::new(
            vec![1.0, 2.0],
            vec![Complex64::new(-0.5, 0.1), Complex64::new(-0.3, 0.2)],
        )
        .unwrap();
        let m = MirrorModel::tabulated(t, "gap");
        assert!(m.reflectivity(0.5).is_err());
        assert_relative_eq!(m.reflectivity(-1.5).unwrap().im, -0.15, epsilon = 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "omega,re_r,im_r\n0,-1,0\n1,-0.5,-0.5\n2,-0.2,-0.4\n").unwrap();
        let t = ReflectivityTable::from_csv(&path).unwrap();
        assert_eq!(t.omega(), &[0.0, 1.0, 2.0]);
        std::fs::write(&path, "w,re,im\n0,-1,0\n1,-0.5,-0.5\n").unwrap();
        assert!(ReflectivityTable::from_csv(&path).is_err());
    }

    #[test]
    fn hilbert_of_lorentzian_real_part() {
        // H[1/(1+x²)](ω) = ω/(1+ω²)
        let x = {
            let mut v = vec![0.0];
            v.extend(log_grid(1e-4, 1e4, 6000));
            v
        };
        let g: Vec<f64> = x.iter().map(|&t| 1.0 / (1.0 + t * t)).collect();
        let h = hilbert_of_even(&x, &g);
        for (i, &w) in x.iter().enumerate().skip(1) {
            if w > 100.0 {
                break;
            }
            assert!((h[i] - w / (1.0 + w * w)).abs() < 2e-5, "w={w}: {}", h[i]);
        }
    }

    #[test]
    fn physicality_of_lorentzian_passes() {
        let m = MirrorModel::lorentzian(1.0).unwrap();
        let report =
            verify_physicality(&m, &log_grid(1e-3, 1e3, 4000), &Default::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.kramers_kronig_residual < 1e-4);
        assert!(report.kramers_kronig_residual <= report.kramers_kronig_residual_coarse);
    }

    #[test]
    fn anti_causal_model_fails_kramers_kronig() {
        let grid = log_grid(1e-3, 1e3, 4000);
        let mut nodes = vec![0.0];
        nodes.extend_from_slice(&grid);
        let table =
            ReflectivityTable::sample(&nodes, |w| -(1.0 + Complex64::new(0.0, w)).inv()).unwrap();
        let m = MirrorModel::tabulated(table, "anti-causal");
        let report = verify_physicality(&m, &grid, &Default::default()).unwrap();
        assert!(!report.passed);
        assert!(report.kramers_kronig_residual > 0.5, "{report:?}");
    }

    #[test]
    fn sampled_lorentzian_passes_within_interpolation_tolerance() {
        let lor = MirrorModel::lorentzian(1.0).unwrap();
        let grid = log_grid(1e-3, 1e3, 4000);
        let mut nodes = vec![0.0];
        nodes.extend_from_slice(&grid);
        let table = ReflectivityTable::sample(&nodes, |w| lor.reflectivity(w).unwrap()).unwrap();
        let m = MirrorModel::tabulated(table, "sampled");
        let report = verify_physicality(&m, &grid, &Default::default()).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn perfect_mirror_is_exempt() {
        let report = verify_physicality(
            &MirrorModel::perfect(),
            &log_grid(0.1, 10.0, 16),
            &Default::default(),
        )
        .unwrap();
        assert!(report.exempt && !report.transparent && report.passed);
    }
}
