//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus the
//! half-line engine used by every quasistatic integral.
//!
//! The quasistatic integrands are sums of harmonics `e^{2inωτ}` (n ≥ 1) with
//! rational envelopes, analytic in the upper half-plane. On the real axis
//! they oscillate with a non-decaying amplitude once the mirrors become
//! transparent, so the real-axis integral exists only as an Abel limit. The
//! engine evaluates exactly that limit:
//!
//! * `[0, s]`: the symmetrised integrand is analytic in a disk around the
//!   origin, where the individual terms carry cancelling poles. Its Taylor
//!   coefficients come from a trapezoid rule on a circle, and the series is
//!   integrated term by term.
//! * `[s, X]`: adaptive Gauss–Kronrod on the real axis.
//! * `[X, ∞)`: rotated onto the vertical line `X + iy`, where every harmonic
//!   decays like `e^{-2y}`. The mirrored term `g(−x)` is analytic in the lower
//!   half-plane and goes onto the line `−X + iy` after the substitution
//!   x → −x. The tail is summed panel by panel until two successive panels
//!   fall below tolerance.

use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_971_761_114,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

/// 10-point Gauss weights, paired with the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-300,
            rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    fn add(self, other: QuadResult) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.norm(),
            ..self
        }
    }

    /// Error relative to |value| (or the absolute error when the value is 0).
    pub fn relative_error(&self) -> f64 {
        let m = self.value.norm();
        if m > 0.0 {
            self.error / m
        } else {
            self.error
        }
    }

    pub fn require(self, tol: &Tolerance) -> Result<Self> {
        // Error estimates of smooth integrands are pessimistic; accept within 10x.
        if !self.converged || self.error > 10.0 * tol.target(self.value.norm()) {
            return Err(Error::Accuracy {
                achieved: self.relative_error(),
                requested: tol.rel,
            });
        }
        Ok(self)
    }
}

/// One 21-point Kronrod rule on [a, b] with the QUADPACK error rescaling.
pub fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let result = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive bisection (largest-error-first) of the 21-point rule.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: &Tolerance, max_segments: usize) -> QuadResult
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    if a == b {
        return QuadResult::zero();
    }
    let (v, e) = gauss_kronrod_21(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    let mut evaluations = 21;
    while total_err > tol.target(total.norm()) {
        if heap.len() >= max_segments {
            break;
        }
        let seg = heap.pop().unwrap();
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gauss_kronrod_21(f, seg.a, mid);
        let (v2, e2) = gauss_kronrod_21(f, mid, seg.b);
        evaluations += 42;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let (value, error) = heap
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), s| {
            (v + s.value, e + s.error)
        });
    QuadResult {
        value,
        error,
        evaluations,
        converged: error <= tol.target(value.norm()),
    }
}

/// ∫_0^s h(x) dx for h analytic in |z| ≤ rho (> s), from the Taylor
/// coefficients of h sampled at `n` points on the circle of radius `rho`.
pub fn origin_series_integral<H>(h: &H, rho: f64, s: f64, n: usize) -> QuadResult
where
    H: Fn(Complex64) -> Complex64 + ?Sized,
{
    let samples: Vec<(Complex64, Complex64)> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let z = Complex64::from_polar(rho, theta);
            (z, h(z))
        })
        .collect();
    // a_m = (1/n) Σ_k h(z_k) z_k^{-m}
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for m in 0..n {
        let mut a_m = Complex64::new(0.0, 0.0);
        for (z, hz) in &samples {
            a_m += hz * z.powi(-(m as i32));
        }
        a_m /= n as f64;
        let term = a_m * s.powi(m as i32 + 1) / (m as f64 + 1.0);
        value += term;
        if m + 8 >= n {
            tail += term.norm();
        }
    }
    QuadResult {
        value,
        error: tail + 1e2 * f64::EPSILON * value.norm(),
        evaluations: n,
        converged: true,
    }
}

/// Geometry of the half-line contour, in units where the oscillation is
/// `e^{2ix}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineContour {
    /// Radius of the Taylor circle around the origin.
    pub origin_radius: f64,
    /// End of the series segment, `< origin_radius`.
    pub series_end: f64,
    /// Real-axis end point X where the tail is rotated onto X + iy.
    pub split: f64,
    /// Width of the tail panels along y.
    pub panel: f64,
    pub circle_points: usize,
    pub max_segments: usize,
    pub max_panels: usize,
}

impl Default for HalfLineContour {
    fn default() -> Self {
        Self {
            origin_radius: 0.5,
            series_end: 0.25,
            split: std::f64::consts::FRAC_PI_2,
            panel: 1.0,
            circle_points: 64,
            max_segments: 400,
            max_panels: 400,
        }
    }
}

impl HalfLineContour {
    /// Shrinks the origin disk to stay clear of singularities at distance
    /// `~singularity_distance` from 0.
    pub fn for_singularity_distance(singularity_distance: f64) -> Self {
        let base = Self::default();
        let rho = base.origin_radius.min(0.5 * singularity_distance);
        Self {
            origin_radius: rho,
            series_end: 0.5 * rho,
            ..base
        }
    }
}

/// Whether the mirrored term enters with + or −: ∫_0^∞ [g(x) ± g(−x)] dx.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Breakdown of a half-line integral by contour piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfLineResult {
    pub total: QuadResult,
    pub series: QuadResult,
    pub real_segment: QuadResult,
    pub tail: QuadResult,
    pub tail_panels: usize,
}

/// Abel-regularised ∫_0^∞ [g(x) ± g(−x)] dx for `g` analytic in the closed
/// upper half-plane minus the origin, decaying there like a sum of `e^{2inz}`.
pub fn integrate_half_line<G>(
    g: &G,
    parity: Parity,
    contour: &HalfLineContour,
    tol: &Tolerance,
) -> HalfLineResult
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    let sign = parity.sign();
    let h = |z: Complex64| g(z) + sign * g(-z);

    let series = origin_series_integral(
        &h,
        contour.origin_radius,
        contour.series_end,
        contour.circle_points,
    );

    // The pieces can cancel, so accuracy is judged against the whole.
    let real_fn = |x: f64| h(Complex64::new(x, 0.0));
    let real_tol = Tolerance::new(tol.abs.max(0.1 * tol.rel * series.value.norm()), tol.rel);
    let real_segment = integrate(
        &real_fn,
        contour.series_end,
        contour.split,
        &real_tol,
        contour.max_segments,
    );

    // ∫_X^∞ g(x)dx = i∫_0^∞ g(X+iy)dy ;  ∫_X^∞ g(−x)dx = −i∫_0^∞ g(−X+iy)dy
    let x = contour.split;
    let i = Complex64::new(0.0, 1.0);
    let tail_fn = |y: f64| i * (g(Complex64::new(x, y)) - sign * g(Complex64::new(-x, y)));

    let head = series.value + real_segment.value;
    let (tail, panels) = integrate_panels(&tail_fn, 0.0, contour.panel, head, tol, contour);

    let mut total = series.add(real_segment).add(tail);
    total.converged = tail.converged
        && series.converged
        && (real_segment.converged || total.error <= tol.target(total.value.norm()));
    HalfLineResult {
        total,
        series,
        real_segment,
        tail,
        tail_panels: panels,
    }
}

/// ∫_{start}^∞ f over panels of width `panel`, widened geometrically past
/// a few panels so that algebraic tails are reached, stopping after two
/// consecutive panels below 1% of the target accuracy of `head` plus the
/// running sum. Returns the result and the number of panels used.
pub fn integrate_panels<F>(
    f: &F,
    start: f64,
    panel: f64,
    head: Complex64,
    tol: &Tolerance,
    contour: &HalfLineContour,
) -> (QuadResult, usize)
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let mut sum = QuadResult::zero();
    let mut quiet_panels = 0;
    let mut panels = 0;
    let mut y0 = start;
    while panels < contour.max_panels {
        let running = (head + sum.value).norm();
        let panel_tol = Tolerance::new(tol.abs.max(0.1 * tol.rel * running), tol.rel);
        let width = panel.max(0.25 * (y0 - start));
        let piece = integrate(f, y0, y0 + width, &panel_tol, contour.max_segments);
        sum = sum.add(piece);
        panels += 1;
        y0 += width;
        let running = (head + sum.value).norm();
        if piece.value.norm() <= tol.target(running) * 1e-2 {
            quiet_panels += 1;
            if quiet_panels >= 2 {
                break;
            }
        } else {
            quiet_panels = 0;
        }
    }
    if quiet_panels < 2 {
        sum.converged = false;
    }
    (sum, panels)
}
