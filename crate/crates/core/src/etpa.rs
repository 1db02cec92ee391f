//! Entangled two-photon absorption: matrix element over entanglement time and
//! inter-beam delay, cross section, and the `(T_e, τ)` surface with its peak.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::atom::{AtomModel, ChannelName, PolarizationChannel};
use crate::error::{invalid, Result};
use crate::rtpa::{defects, sample_point};
use crate::units::{
    angular_frequency_from_thz, focal_spot_area, lorentzian_lineshape, CODATA_2018, M2_TO_CM2, PS,
};

/// Below this `|x|` the boxcar factor `(1 − e^{−ix})/x` switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// `g(x) = (1 − e^{−ix})/x`, finite and accurate through `x = 0`.
pub fn boxcar_factor(x: f64) -> Complex64 {
    if x.abs() < SERIES_THRESHOLD {
        // i + x/2 − i x²/6 − x³/24; the next term is x⁴/120, below 1e-17 here.
        let x2 = x * x;
        Complex64::new(x / 2.0 - x * x2 / 24.0, 1.0 - x2 / 6.0)
    } else {
        boxcar_factor_direct(x)
    }
}

/// Closed evaluation of `g(x)` using `1 − e^{−ix} = 2 sin²(x/2) + i sin x`.
pub fn boxcar_factor_direct(x: f64) -> Complex64 {
    let s = libm::sin(x / 2.0);
    Complex64::new(2.0 * s * s, libm::sin(x)) / x
}

/// `(1 − e^{−iΔw})/(Δ − iκ/2)` written as `w·g(Δw)·Δ/(Δ − iκ/2)` so that `Δ → 0` stays finite.
fn window_response(defect: f64, kappa: f64, width: f64) -> Complex64 {
    let g = boxcar_factor(defect * width) * width;
    if kappa == 0.0 {
        g
    } else {
        g * defect / Complex64::new(defect, -kappa / 2.0)
    }
}

/// Start and width of the interval photon 1 can be absorbed in before photon 2,
/// and the same for the reverse order, for a pair delayed by `tau` (photon 2
/// later) with entanglement time `te`.
///
/// For `|τ| ≤ T_e` both intervals start at zero with widths `T_e ± τ`; beyond
/// that one ordering becomes impossible and the other has a delayed start.
pub fn ordering_windows(te: f64, tau: f64) -> ((f64, f64), (f64, f64)) {
    let first = ((tau - te).max(0.0), (tau + te).max(0.0));
    let second = ((-tau - te).max(0.0), (te - tau).max(0.0));
    ((first.0, first.1 - first.0), (second.0, second.1 - second.0))
}

/// Extra settings for the entangled matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtpaOptions {
    /// When set, `M_other` enters with this effective energy defect (rad/s),
    /// half through each photon ordering. Excluded when `None`.
    pub other_defect: Option<f64>,
}

/// `M_e(δ, T_e, τ)` in C²·m²·s, with default options.
pub fn m_e(channel: &PolarizationChannel, delta: f64, te: f64, tau: f64, atom: &AtomModel) -> Result<Complex64> {
    m_e_with(channel, delta, te, tau, atom, &EtpaOptions::default())
}

pub fn m_e_with(
    channel: &PolarizationChannel,
    delta: f64,
    te: f64,
    tau: f64,
    atom: &AtomModel,
    options: &EtpaOptions,
) -> Result<Complex64> {
    if !(te > 0.0 && te.is_finite()) {
        return Err(invalid("entanglement_time", "must be positive and finite"));
    }
    if !tau.is_finite() || !delta.is_finite() {
        return Err(invalid("tau", "delay and detuning must be finite"));
    }
    let ((lo1, w1), (lo2, w2)) = ordering_windows(te, tau);
    let phase = |defect: f64, lo: f64| {
        let p = defect * lo;
        Complex64::new(libm::cos(p), -libm::sin(p))
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for (level, pair) in atom.levels.iter().zip(&channel.dipole_products) {
        let (d1, d2) = defects(level.half_detuning, delta);
        if pair.d21 != 0.0 && w1 > 0.0 {
            sum += phase(d1, lo1) * window_response(d1, level.kappa, w1) * (pair.d21 * atom.r_scale);
        }
        if pair.d12 != 0.0 && w2 > 0.0 {
            sum += phase(d2, lo2) * window_response(d2, level.kappa, w2) * (pair.d12 * atom.r_scale);
        }
    }
    if let Some(defect) = options.other_defect {
        // M_other ≈ X/Δ_o, so its boxcar analogue is M_other·(1 − e^{−iΔ_o w}) per ordering.
        let x = atom.m_other * defect / 2.0;
        for (lo, w) in [(lo1, w1), (lo2, w2)] {
            if w > 0.0 {
                sum += x * phase(defect, lo) * window_response(defect, 0.0, w);
            }
        }
    }
    Ok(sum)
}

/// `π/((ħcε₀)²·4A_eT_e)·ω₁⁰ω₂⁰·g(0)`, turning `|M_e|²` into m².
fn etpa_prefactor(atom: &AtomModel, delta: f64, te: f64, a_e: f64) -> Result<f64> {
    let (w1, w2) = atom.photon_frequencies(delta);
    let g0 = lorentzian_lineshape(0.0, atom.final_linewidth)?;
    Ok(PI / (CODATA_2018.hbar_c_eps0_squared() * 4.0 * a_e * te) * w1 * w2 * g0)
}

/// ETPA cross section in cm²; `a_e` is the entanglement area in m².
pub fn sigma_e(channel: &PolarizationChannel, delta: f64, te: f64, tau: f64, atom: &AtomModel, a_e: f64) -> Result<f64> {
    sigma_e_with(channel, delta, te, tau, atom, a_e, &EtpaOptions::default())
}

pub fn sigma_e_with(
    channel: &PolarizationChannel,
    delta: f64,
    te: f64,
    tau: f64,
    atom: &AtomModel,
    a_e: f64,
    options: &EtpaOptions,
) -> Result<f64> {
    if !(a_e > 0.0 && a_e.is_finite()) {
        return Err(invalid("entanglement_area", "must be positive and finite"));
    }
    let m = m_e_with(channel, delta, te, tau, atom, options)?;
    Ok(etpa_prefactor(atom, delta, te, a_e)? * m.norm_sqr() * M2_TO_CM2)
}

/// Entanglement area for a beam focused at numerical aperture `na`, m².
pub fn default_entanglement_area(atom: &AtomModel, na: f64) -> Result<f64> {
    focal_spot_area(atom.wavelength, na)
}

/// `R_J/(2π·1 THz)`: the natural scale of matrix elements, C²·m²·s.
pub fn natural_matrix_element_unit(atom: &AtomModel) -> f64 {
    atom.r_scale / angular_frequency_from_thz(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtpaPoint {
    /// s
    pub entanglement_time: f64,
    /// s
    pub delay: f64,
    /// cm²
    pub sigma_e: f64,
}

/// Uniform `(T_e, τ)` grid, both axes in seconds, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtpaGrid {
    pub te_min: f64,
    pub te_max: f64,
    pub n_te: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
}

impl Default for EtpaGrid {
    /// `T_e ∈ (0, 0.1]` ps and `τ ∈ [−0.05, 0.05]` ps, both at 0.5 fs spacing so
    /// the ~0.1 ps oscillation period is well resolved.
    fn default() -> Self {
        Self { te_min: 0.0005 * PS, te_max: 0.1 * PS, n_te: 200, tau_min: -0.05 * PS, tau_max: 0.05 * PS, n_tau: 201 }
    }
}

impl EtpaGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_te < 2 || self.n_tau < 2 {
            return Err(invalid("grid", "each axis needs at least two points"));
        }
        if !(self.te_min > 0.0) || !(self.te_max > self.te_min) || !self.te_max.is_finite() {
            return Err(invalid("grid.te", "need 0 < te_min < te_max"));
        }
        if !(self.tau_max > self.tau_min) || !self.tau_min.is_finite() || !self.tau_max.is_finite() {
            return Err(invalid("grid.tau", "need finite tau_min < tau_max"));
        }
        Ok(())
    }

    pub fn te_axis(&self) -> Vec<f64> {
        (0..self.n_te).map(|i| sample_point(self.te_min, self.te_max, self.n_te, i)).collect()
    }

    pub fn tau_axis(&self) -> Vec<f64> {
        (0..self.n_tau).map(|i| sample_point(self.tau_min, self.tau_max, self.n_tau, i)).collect()
    }

    /// Cell count; values are stored row-major with `T_e` as the outer index.
    pub fn len(&self) -> usize {
        self.n_te * self.n_tau
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(T_e, τ)` of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.n_tau, k % self.n_tau);
        (
            sample_point(self.te_min, self.te_max, self.n_te, i),
            sample_point(self.tau_min, self.tau_max, self.n_tau, j),
        )
    }

    fn clamp(&self, te: f64, tau: f64) -> (f64, f64) {
        (te.clamp(self.te_min, self.te_max), tau.clamp(self.tau_min, self.tau_max))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtpaSurface {
    pub channel: ChannelName,
    /// rad/s
    pub delta: f64,
    /// m²
    pub entanglement_area: f64,
    pub grid: EtpaGrid,
    pub te_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
    /// cm², row-major, `T_e` outer.
    pub values: Vec<f64>,
    /// Best grid cell.
    pub grid_peak: EtpaPoint,
    /// Locally refined maximum, never below `grid_peak`.
    pub peak: EtpaPoint,
}

impl EtpaSurface {
    pub fn value(&self, i_te: usize, j_tau: usize) -> f64 {
        self.values[i_te * self.grid.n_tau + j_tau]
    }

    /// `σ_e` along `T_e` at fixed delay index.
    pub fn te_slice(&self, j_tau: usize) -> Vec<f64> {
        (0..self.grid.n_te).map(|i| self.value(i, j_tau)).collect()
    }

    /// Delay index nearest to `tau`.
    pub fn nearest_tau_index(&self, tau: f64) -> usize {
        let mut best = 0;
        for (j, t) in self.tau_axis.iter().enumerate() {
            if (t - tau).abs() < (self.tau_axis[best] - tau).abs() {
                best = j;
            }
        }
        best
    }
}

/// Serial surface evaluation followed by peak refinement.
pub fn etpa_surface(
    channel: &PolarizationChannel,
    delta: f64,
    grid: &EtpaGrid,
    atom: &AtomModel,
    a_e: f64,
) -> Result<EtpaSurface> {
    grid.validate()?;
    let values = (0..grid.len())
        .map(|k| {
            let (te, tau) = grid.point(k);
            sigma_e(channel, delta, te, tau, atom, a_e)
        })
        .collect::<Result<Vec<f64>>>()?;
    surface_from_values(channel, delta, grid, values, atom, a_e)
}

/// Assemble a surface from externally computed cell values (e.g. a parallel
/// sweep) and refine its peak. `values` must follow [`EtpaGrid::point`] order.
pub fn surface_from_values(
    channel: &PolarizationChannel,
    delta: f64,
    grid: &EtpaGrid,
    values: Vec<f64>,
    atom: &AtomModel,
    a_e: f64,
) -> Result<EtpaSurface> {
    grid.validate()?;
    if values.len() != grid.len() {
        return Err(invalid("values", "length does not match the grid"));
    }
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(invalid("values", "non-finite cross section"));
        }
        if *v > values[best] {
            best = k;
        }
    }
    let (te0, tau0) = grid.point(best);
    let grid_peak = EtpaPoint { entanglement_time: te0, delay: tau0, sigma_e: values[best] };
    let peak = refine_peak(channel, delta, grid, atom, a_e, grid_peak)?;
    Ok(EtpaSurface {
        channel: channel.name,
        delta,
        entanglement_area: a_e,
        grid: *grid,
        te_axis: grid.te_axis(),
        tau_axis: grid.tau_axis(),
        values,
        grid_peak,
        peak,
    })
}

/// Refinement stops once the simplex is smaller than this, in seconds.
pub const PEAK_TOLERANCE: f64 = 1e-5 * PS;

/// Nelder–Mead ascent from the best cell, clamped to the grid rectangle.
fn refine_peak(
    channel: &PolarizationChannel,
    delta: f64,
    grid: &EtpaGrid,
    atom: &AtomModel,
    a_e: f64,
    start: EtpaPoint,
) -> Result<EtpaPoint> {
    let eval = |p: [f64; 2]| -> Result<(f64, [f64; 2])> {
        let (te, tau) = grid.clamp(p[0], p[1]);
        Ok((-sigma_e(channel, delta, te, tau, atom, a_e)?, [te, tau]))
    };
    // initial simplex spans one grid cell in each direction
    let hte = (grid.te_max - grid.te_min) / (grid.n_te - 1) as f64;
    let htau = (grid.tau_max - grid.tau_min) / (grid.n_tau - 1) as f64;
    let x0 = [start.entanglement_time, start.delay];
    let mut simplex: Vec<(f64, [f64; 2])> = Vec::with_capacity(3);
    simplex.push((-start.sigma_e, x0));
    for step in [[hte, 0.0], [0.0, htau]] {
        let signed = |i: usize| {
            let up = x0[i] + step[i];
            let in_range = if i == 0 { up <= grid.te_max } else { up <= grid.tau_max };
            if in_range { step[i] } else { -step[i] }
        };
        simplex.push(eval([x0[0] + signed(0), x0[1] + signed(1)])?);
    }
    for _ in 0..2000 {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let size = simplex[1..]
            .iter()
            .map(|(_, x)| (x[0] - simplex[0].1[0]).abs().max((x[1] - simplex[0].1[1]).abs()))
            .fold(0.0, f64::max);
        if size < PEAK_TOLERANCE {
            break;
        }
        let c = [(simplex[0].1[0] + simplex[1].1[0]) / 2.0, (simplex[0].1[1] + simplex[1].1[1]) / 2.0];
        let worst = simplex[2];
        let along = |t: f64| [c[0] + t * (worst.1[0] - c[0]), c[1] + t * (worst.1[1] - c[1])];
        let reflected = eval(along(-1.0))?;
        if reflected.0 < simplex[0].0 {
            let expanded = eval(along(-2.0))?;
            simplex[2] = if expanded.0 < reflected.0 { expanded } else { reflected };
        } else if reflected.0 < simplex[1].0 {
            simplex[2] = reflected;
        } else {
            let contracted = if reflected.0 < worst.0 { eval(along(-0.5))? } else { eval(along(0.5))? };
            if contracted.0 < worst.0.min(reflected.0) {
                simplex[2] = contracted;
            } else {
                let best = simplex[0].1;
                for v in simplex.iter_mut().skip(1) {
                    *v = eval([(v.1[0] + best[0]) / 2.0, (v.1[1] + best[1]) / 2.0])?;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (neg, x) = simplex[0];
    if -neg < start.sigma_e {
        return Ok(start);
    }
    Ok(EtpaPoint { entanglement_time: x[0], delay: x[1], sigma_e: -neg })
}
