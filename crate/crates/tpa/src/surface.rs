//! Parallel ETPA sweeps and the oscillation analysis of `T_e` slices.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;
use tpa_core::atom::{AtomModel, PolarizationChannel};
use tpa_core::etpa::{sigma_e, surface_from_values, EtpaGrid, EtpaSurface};
use tpa_core::units::PS;

use crate::error::Result;

/// Same result as [`tpa_core::etpa::etpa_surface`], with cells evaluated on the rayon pool.
pub fn etpa_surface_parallel(
    channel: &PolarizationChannel,
    delta: f64,
    grid: &EtpaGrid,
    atom: &AtomModel,
    a_e: f64,
) -> Result<EtpaSurface> {
    grid.validate()?;
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (te, tau) = grid.point(k);
            sigma_e(channel, delta, te, tau, atom, a_e)
        })
        .collect::<tpa_core::Result<Vec<f64>>>()?;
    Ok(surface_from_values(channel, delta, grid, values, atom, a_e)?)
}

/// Strongest oscillation frequency (Hz) of uniformly sampled `samples`.
///
/// The mean is removed and a Hann window applied; the spectrum is zero-padded
/// eightfold and the peak refined by parabolic interpolation. Frequencies below
/// two cycles per record are ignored, as they only describe the envelope.
pub fn dominant_frequency(samples: &[f64], spacing: f64) -> Option<f64> {
    let n = samples.len();
    if n < 8 || !spacing.is_finite() || spacing <= 0.0 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let len = (n.next_power_of_two()) * 8;
    let mut buf: Vec<Complex<f64>> = samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
            Complex::new((x - mean) * w, 0.0)
        })
        .collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let df = 1.0 / (len as f64 * spacing);
    let first = ((2.0 / (n as f64 * spacing)) / df).ceil() as usize;
    let mags: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    let k = (first.max(1)..len / 2 - 1).max_by(|&a, &b| mags[a].total_cmp(&mags[b]))?;
    let (l, c, r) = (mags[k - 1], mags[k], mags[k + 1]);
    let denom = l - 2.0 * c + r;
    // only a true interior maximum is interpolated
    let shift = if c >= l && c >= r && denom < 0.0 { (0.5 * (l - r) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    Some((k as f64 + shift) * df)
}

/// A long `T_e` slice used to read off the oscillation frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationProbe {
    /// s
    pub delay: f64,
    /// s
    pub te_max: f64,
    pub points: usize,
}

impl OscillationProbe {
    /// 2 ps in 0.25 fs steps: many periods of the fine-structure oscillation.
    pub fn at_delay(delay: f64) -> Self {
        Self { delay, te_max: 2.0 * PS, points: 8000 }
    }

    pub fn spacing(&self) -> f64 {
        self.te_max / self.points as f64
    }
}

/// `σ_e` on `T_e = k·spacing`, `k = 1..=points`, and its dominant frequency in Hz.
pub fn te_oscillation(
    channel: &PolarizationChannel,
    delta: f64,
    probe: &OscillationProbe,
    atom: &AtomModel,
    a_e: f64,
) -> Result<(Vec<f64>, Option<f64>)> {
    let h = probe.spacing();
    let slice = (1..=probe.points)
        .into_par_iter()
        .map(|k| sigma_e(channel, delta, k as f64 * h, probe.delay, atom, a_e))
        .collect::<tpa_core::Result<Vec<f64>>>()?;
    let f = dominant_frequency(&slice, h);
    Ok((slice, f))
}
