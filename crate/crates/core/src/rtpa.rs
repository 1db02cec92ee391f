//! Random (uncorrelated-photon) two-photon absorption: matrix element, cross
//! section, spectra and the destructive-interference null solver.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::atom::{AtomModel, ChannelName, PolarizationChannel};
use crate::error::{invalid, Error, Result};
use crate::units::{angular_frequency_from_thz, lorentzian_lineshape, CODATA_2018, M4_TO_CM4};

/// Undamped poles are excluded within `POLE_GUARD × h` of `δ = ±h`.
pub const POLE_GUARD: f64 = 1e-6;

/// Relative agreement required between a printed closed form and the numeric root.
pub const CLOSED_FORM_RTOL: f64 = 1e-4;

/// Sign convention attached to every reported root.
pub const DETUNING_CONVENTION: &str =
    "omega_1 = omega_p/2 - delta, omega_2 = omega_p/2 + delta; photon 1 carries the first polarization";

/// Energy defects `(Δ₁, Δ₂) = (δ − h, −h − δ)` of a level at half-detuning `h`.
pub(crate) fn defects(half_detuning: f64, delta: f64) -> (f64, f64) {
    (delta - half_detuning, -half_detuning - delta)
}

/// `M_r(δ) = Σ_i [D₂₁/(Δ₁ − iκ/2) + D₁₂/(Δ₂ − iκ/2)]·R_J + M_other`, in C²·m²·s.
///
/// With `include_widths = false`, or a level whose width is zero, evaluation
/// inside the pole guard band is an error.
pub fn m_r(channel: &PolarizationChannel, delta: f64, atom: &AtomModel, include_widths: bool) -> Result<Complex64> {
    if !delta.is_finite() {
        return Err(invalid("delta", "must be finite"));
    }
    let mut sum = atom.m_other;
    for (level, pair) in atom.levels.iter().zip(&channel.dipole_products) {
        let kappa = if include_widths { level.kappa } else { 0.0 };
        let (d1, d2) = defects(level.half_detuning, delta);
        for (d, defect) in [(pair.d21, d1), (pair.d12, d2)] {
            if d == 0.0 {
                continue;
            }
            if kappa == 0.0 && defect.abs() <= POLE_GUARD * level.half_detuning {
                return Err(Error::Pole { level: level.label.clone(), delta });
            }
            sum += Complex64::new(d * atom.r_scale, 0.0) / Complex64::new(defect, -kappa / 2.0);
        }
    }
    Ok(sum)
}

/// `π/(2(ħcε₀)²)·ω₁⁰ω₂⁰·g(0)` in units that turn `|M_r|²` into m⁴·s.
fn rtpa_prefactor(atom: &AtomModel, delta: f64) -> Result<f64> {
    let (w1, w2) = atom.photon_frequencies(delta);
    let g0 = lorentzian_lineshape(0.0, atom.final_linewidth)?;
    Ok(PI / (2.0 * CODATA_2018.hbar_c_eps0_squared()) * w1 * w2 * g0)
}

/// RTPA cross section in cm⁴·s, linewidths included.
pub fn sigma_r(channel: &PolarizationChannel, delta: f64, atom: &AtomModel) -> Result<f64> {
    let m = m_r(channel, delta, atom, true)?;
    Ok(rtpa_prefactor(atom, delta)? * m.norm_sqr() * M4_TO_CM4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumSample {
    /// rad/s
    pub delta: f64,
    /// cm⁴·s
    pub sigma_r: f64,
}

/// `n_points` uniform samples of `σ_r(δ)` over `[delta_min, delta_max]`, endpoints included.
pub fn rtpa_spectrum(
    channel: &PolarizationChannel,
    delta_min: f64,
    delta_max: f64,
    n_points: usize,
    atom: &AtomModel,
) -> Result<Vec<SpectrumSample>> {
    if n_points < 2 {
        return Err(invalid("n_points", "at least two points are required"));
    }
    if !(delta_min.is_finite() && delta_max.is_finite()) || delta_max <= delta_min {
        return Err(invalid("delta_range", "need finite delta_min < delta_max"));
    }
    for (level, pair) in atom.levels.iter().zip(&channel.dipole_products) {
        let h = level.half_detuning;
        let inside = (pair.d21 != 0.0 && (delta_min..=delta_max).contains(&h))
            || (pair.d12 != 0.0 && (delta_min..=delta_max).contains(&-h));
        if level.kappa == 0.0 && inside {
            return Err(Error::PoleInRange { level: level.label.clone() });
        }
    }
    (0..n_points)
        .map(|i| {
            let delta = sample_point(delta_min, delta_max, n_points, i);
            Ok(SpectrumSample { delta, sigma_r: sigma_r(channel, delta, atom)? })
        })
        .collect()
}

/// `i`-th of `n` uniform points; exact at both ends and independent of evaluation order.
pub fn sample_point(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

/// Sign-change scan settings, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanSpec {
    pub delta_min: f64,
    pub delta_max: f64,
    pub step: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub tolerance: f64,
}

impl ScanSpec {
    /// Scan over `[min_thz, max_thz]` (ordinary THz) with the given step in THz.
    pub fn from_thz(min_thz: f64, max_thz: f64, step_thz: f64) -> Self {
        Self {
            delta_min: angular_frequency_from_thz(min_thz),
            delta_max: angular_frequency_from_thz(max_thz),
            step: angular_frequency_from_thz(step_thz),
            tolerance: angular_frequency_from_thz(1e-6),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta_min.is_finite() && self.delta_max.is_finite()) || self.delta_max <= self.delta_min {
            return Err(invalid("scan", "need finite delta_min < delta_max"));
        }
        if !(self.step > 0.0) || !(self.tolerance > 0.0) {
            return Err(invalid("scan", "step and tolerance must be positive"));
        }
        Ok(())
    }
}

impl Default for ScanSpec {
    /// ±200 THz in 1 GHz steps: reaches the far-off-resonance roots and resolves
    /// root spacings far below the ~0.4 THz seen in this system.
    fn default() -> Self {
        Self::from_thz(-200.0, 200.0, 0.001)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RootClass {
    /// Within the fine-structure manifold, `|δ| ≤ max h`.
    NearResonance,
    FarOffResonance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Root {
    /// rad/s, signed under [`DETUNING_CONVENTION`].
    pub delta: f64,
    pub class: RootClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckStatus {
    Agrees,
    Disagrees,
    OutsideScan,
}

/// A printed closed-form root compared with the nearest numeric root.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosedFormCheck {
    pub closed_form: f64,
    pub nearest_numeric: Option<f64>,
    pub relative_difference: Option<f64>,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetuningSolution {
    pub channel: ChannelName,
    pub closed_form_roots: Vec<Root>,
    pub numeric_roots: Vec<Root>,
    /// No sign change anywhere in the scanned intervals.
    pub no_real_solution: bool,
    pub closed_form_checks: Vec<ClosedFormCheck>,
    /// Numeric roots in the scan with no closed-form root within tolerance.
    pub unmatched_numeric: Vec<f64>,
    /// Largest `|M_r|` seen on the scan samples, C²·m²·s.
    pub scan_max_abs: f64,
    pub warnings: Vec<String>,
    pub convention: String,
    pub scan: ScanSpec,
}

impl DetuningSolution {
    /// `|δ|` of the numeric roots, sorted and deduplicated.
    pub fn numeric_magnitudes(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.numeric_roots.iter().map(|r| r.delta.abs()).collect();
        m.sort_by(f64::total_cmp);
        m.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        m
    }

    pub fn near_resonance_roots(&self) -> impl Iterator<Item = &Root> {
        self.numeric_roots.iter().filter(|r| r.class == RootClass::NearResonance)
    }

    /// Default working detuning: the near-resonance root closest to zero,
    /// preferring the positive one on ties.
    pub fn preferred_null(&self) -> Option<f64> {
        self.near_resonance_roots()
            .map(|r| r.delta)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.total_cmp(a)))
    }

    /// True when every in-scan printed root matches and no numeric root is unexplained.
    pub fn closed_form_consistent(&self) -> bool {
        self.closed_form_checks.iter().all(|c| c.status != CheckStatus::Disagrees) && self.unmatched_numeric.is_empty()
    }
}

fn classify(atom: &AtomModel, delta: f64) -> RootClass {
    if delta.abs() <= atom.max_half_detuning() {
        RootClass::NearResonance
    } else {
        RootClass::FarOffResonance
    }
}

/// The two-level reduction `(a, b, η)`; requires exactly `P₁/₂` above `P₃/₂`.
fn two_level(atom: &AtomModel) -> Result<(f64, f64, f64)> {
    use crate::angular::HalfInteger;
    match atom.levels.as_slice() {
        [p1, p3] if p1.term.j == HalfInteger::HALF && p3.term.j == HalfInteger::THREE_HALVES => {
            Ok((p1.half_detuning, p3.half_detuning, p3.eta_scale / p1.eta_scale))
        }
        _ => Err(Error::Unsupported { reason: "closed forms need exactly a P1/2 level above a P3/2 level".into() }),
    }
}

/// Printed closed-form null detunings, in rad/s.
pub fn closed_form_roots(channel: ChannelName, atom: &AtomModel) -> Result<Vec<f64>> {
    let unit = angular_frequency_from_thz(1.0);
    let (a, b, eta) = two_level(atom)?;
    let (a, b) = (a / unit, b / unit);
    let pm = |radicand: f64| -> Vec<f64> {
        if radicand < 0.0 {
            Vec::new()
        } else {
            let r = libm::sqrt(radicand);
            alloc::vec![-r, r]
        }
    };
    let roots = match channel {
        ChannelName::Zz => pm((5.0 * a * b * b + eta * b * a * a) / (5.0 * a + eta * b)),
        ChannelName::SigmaMinusSigmaMinus => {
            let den = a - eta * b;
            if den == 0.0 {
                return Err(Error::DegenerateFormula { channel: channel.as_str(), reason: "a - eta*b = 0" });
            }
            pm(-a * b * (eta * a - b) / den)
        }
        ChannelName::ZSigmaPlus => {
            if eta == 1.0 {
                return Err(Error::DegenerateFormula { channel: channel.as_str(), reason: "eta - 1 = 0" });
            }
            let s = 5.0 * eta * a + eta * eta * b;
            let disc = 1.0 - 20.0 * b * (eta - 1.0) * (5.0 * b + eta * a) / (s * s);
            if disc < 0.0 {
                Vec::new()
            } else {
                let scale = 10.0 * (eta - 1.0) / s;
                let r = libm::sqrt(disc);
                let mut v = alloc::vec![(1.0 - r) / scale, (1.0 + r) / scale];
                v.sort_by(f64::total_cmp);
                v
            }
        }
        ChannelName::ZSigmaMinus => {
            let den = 9.0 * eta - 5.0;
            if den == 0.0 {
                return Err(Error::DegenerateFormula { channel: channel.as_str(), reason: "9*eta - 5 = 0" });
            }
            real_cubic_roots(
                (15.0 * a + 7.0 * eta * b) / den,
                (5.0 * b * b - 9.0 * eta * a * a) / den,
                -a * b * (15.0 * b + 7.0 * a) / den,
            )
        }
    };
    Ok(roots.into_iter().map(|r| r * unit).collect())
}

/// Real roots of `x³ + c2·x² + c1·x + c0`, ascending, Newton-polished.
pub fn real_cubic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut roots = if disc > 0.0 {
        let s = libm::sqrt(disc);
        alloc::vec![libm::cbrt(-q / 2.0 + s) + libm::cbrt(-q / 2.0 - s)]
    } else if p == 0.0 {
        alloc::vec![0.0]
    } else {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = libm::acos(arg) / 3.0;
        (0..3).map(|k| m * libm::cos(theta - 2.0 * PI * k as f64 / 3.0)).collect()
    };
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let df = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    for r in &mut roots {
        *r -= shift;
        for _ in 0..4 {
            let d = df(*r);
            if d == 0.0 {
                break;
            }
            let next = *r - f(*r) / d;
            if !next.is_finite() {
                break;
            }
            *r = next;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

struct Segment {
    lo: f64,
    hi: f64,
}

/// Scan intervals with every pole `±h` cut out by a guard band.
fn pole_free_segments(atom: &AtomModel, scan: &ScanSpec) -> Vec<Segment> {
    let mut cuts: Vec<(f64, f64)> = atom
        .levels
        .iter()
        .flat_map(|l| {
            let g = 2.0 * POLE_GUARD * l.half_detuning;
            [(-l.half_detuning - g, -l.half_detuning + g), (l.half_detuning - g, l.half_detuning + g)]
        })
        .collect();
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut segments = Vec::new();
    let mut start = scan.delta_min;
    for (lo, hi) in cuts {
        if hi <= start {
            continue;
        }
        if lo > start {
            segments.push(Segment { lo: start, hi: lo.min(scan.delta_max) });
        }
        start = hi;
        if start >= scan.delta_max {
            break;
        }
    }
    if start < scan.delta_max {
        segments.push(Segment { lo: start, hi: scan.delta_max });
    }
    segments.retain(|s| s.hi > s.lo);
    segments
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of `g` on `[lo, hi]` by golden-section search.
fn golden_min(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
    }
    0.5 * (lo + hi)
}

struct ScanOutcome {
    roots: Vec<f64>,
    warnings: Vec<String>,
    max_abs: f64,
    sign_changes: usize,
}

fn scan_roots(f: &dyn Fn(f64) -> f64, segments: &[(f64, f64)], scan: &ScanSpec) -> ScanOutcome {
    let mut roots: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    let mut scan_max_abs: f64 = 0.0;
    let mut sign_changes = 0usize;
    for &(lo, hi) in segments {
        let seg = Segment { lo, hi };
        let n = libm::ceil((seg.hi - seg.lo) / scan.step).max(1.0) as usize;
        let xs: Vec<f64> = (0..=n).map(|i| sample_point(seg.lo, seg.hi, n + 1, i)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        scan_max_abs = ys.iter().fold(scan_max_abs, |m, y| m.max(y.abs()));
        for k in 0..n {
            let (y0, y1) = (ys[k], ys[k + 1]);
            if y0 == 0.0 {
                roots.push(xs[k]);
                sign_changes += 1;
            } else if y1 != 0.0 && (y0 < 0.0) != (y1 < 0.0) {
                roots.push(bisect(f, xs[k], xs[k + 1], scan.tolerance));
                sign_changes += 1;
            }
            if k > 0 {
                let y_prev = ys[k - 1];
                let same_sign = (y_prev < 0.0) == (y0 < 0.0) && (y0 < 0.0) == (y1 < 0.0) && y0 != 0.0;
                if same_sign && y0.abs() < y_prev.abs() && y0.abs() <= y1.abs() {
                    let s = if y0 < 0.0 { -1.0 } else { 1.0 };
                    let g = |x: f64| s * f(x);
                    let xm = golden_min(&g, xs[k - 1], xs[k + 1], scan.tolerance);
                    if g(xm) < 0.0 {
                        roots.push(bisect(f, xs[k - 1], xm, scan.tolerance));
                        roots.push(bisect(f, xm, xs[k + 1], scan.tolerance));
                        sign_changes += 2;
                        warnings.push(format!(
                            "scan step too coarse: two roots merged in [{:.6}, {:.6}] THz",
                            crate::units::thz_from_angular_frequency(xs[k - 1]),
                            crate::units::thz_from_angular_frequency(xs[k + 1])
                        ));
                    }
                }
            }
        }
        if let Some(&last) = ys.last() {
            if last == 0.0 {
                roots.push(*xs.last().unwrap());
                sign_changes += 1;
            }
        }
    }
    ScanOutcome { roots, warnings, max_abs: scan_max_abs, sign_changes }
}

/// Dense sign-change scan of `Re M_r` with `κ = 0` and `M_other = 0`, refined by bisection.
///
/// A sampled local minimum of `|M_r|` without a sign change is probed with a
/// golden-section search; if it dips through zero the step was too coarse, both
/// roots are recovered and a warning lists the interval.
pub fn null_solve_numeric(channel: ChannelName, atom: &AtomModel, scan: &ScanSpec) -> Result<DetuningSolution> {
    scan.validate()?;
    let bare = atom.without_other().without_widths();
    let ch = bare.channel(channel).clone();
    let f = |d: f64| m_r(&ch, d, &bare, false).map(|z| z.re).unwrap_or(f64::NAN);

    let segments: Vec<(f64, f64)> = pole_free_segments(&bare, scan).iter().map(|s| (s.lo, s.hi)).collect();
    let ScanOutcome { mut roots, warnings, max_abs: scan_max_abs, sign_changes } = scan_roots(&f, &segments, scan);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= scan.tolerance);

    Ok(DetuningSolution {
        channel,
        closed_form_roots: Vec::new(),
        numeric_roots: roots.iter().map(|&d| Root { delta: d, class: classify(atom, d) }).collect(),
        no_real_solution: sign_changes == 0,
        closed_form_checks: Vec::new(),
        unmatched_numeric: Vec::new(),
        scan_max_abs,
        warnings,
        convention: DETUNING_CONVENTION.into(),
        scan: *scan,
    })
}

/// Printed closed forms evaluated verbatim and cross-checked against the
/// numeric solver on the default scan.
pub fn null_solve_closed(channel: ChannelName, atom: &AtomModel) -> Result<DetuningSolution> {
    null_solve(channel, atom, &ScanSpec::default())
}

/// Numeric solve on `scan` plus the closed-form comparison.
pub fn null_solve(channel: ChannelName, atom: &AtomModel, scan: &ScanSpec) -> Result<DetuningSolution> {
    let mut sol = null_solve_numeric(channel, atom, scan)?;
    let closed = closed_form_roots(channel, atom)?;
    let numeric: Vec<f64> = sol.numeric_roots.iter().map(|r| r.delta).collect();
    for &c in &closed {
        let in_scan = (scan.delta_min..=scan.delta_max).contains(&c);
        let nearest = numeric.iter().copied().min_by(|x, y| (x - c).abs().total_cmp(&(y - c).abs()));
        let rel = nearest.map(|n| (n - c).abs() / n.abs().max(f64::MIN_POSITIVE));
        let status = match (in_scan, rel) {
            (false, _) => CheckStatus::OutsideScan,
            (true, Some(r)) if r <= CLOSED_FORM_RTOL => CheckStatus::Agrees,
            _ => CheckStatus::Disagrees,
        };
        sol.closed_form_checks.push(ClosedFormCheck {
            closed_form: c,
            nearest_numeric: nearest,
            relative_difference: rel,
            status,
        });
    }
    sol.unmatched_numeric = numeric
        .iter()
        .copied()
        .filter(|n| !closed.iter().any(|c| (n - c).abs() <= CLOSED_FORM_RTOL * n.abs()))
        .collect();
    sol.closed_form_roots = closed.iter().map(|&d| Root { delta: d, class: classify(atom, d) }).collect();
    if !sol.closed_form_consistent() {
        sol.warnings.push("printed closed form disagrees with the numeric roots; numeric roots are authoritative".into());
    }
    Ok(sol)
}
