//! Randomized checks of the symmetry and scaling laws of the cross sections.

use std::sync::LazyLock;

use proptest::prelude::*;
use tpa_core::atom::{builtin_rb, AtomModel, ChannelName};
use tpa_core::etpa::{boxcar_factor, boxcar_factor_direct, m_e, sigma_e, SERIES_THRESHOLD};
use tpa_core::rtpa::{m_r, sigma_r};
use tpa_core::units::{angular_frequency_from_thz, lorentzian_lineshape, PS};

static RB: LazyLock<AtomModel> = LazyLock::new(builtin_rb);
static RB_UNDAMPED: LazyLock<AtomModel> = LazyLock::new(|| builtin_rb().without_widths());

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

/// Detunings in THz that keep clear of every pole in the builtin model.
fn detuning_thz() -> impl Strategy<Value = f64> {
    (-20.0..20.0f64).prop_filter("near a pole", |d: &f64| [1.011, 8.1342].iter().all(|h| (d.abs() - h).abs() > 1e-3))
}

fn channel() -> impl Strategy<Value = ChannelName> {
    prop::sample::select(ChannelName::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn symmetric_channels_are_even(d in detuning_thz(), ss in any::<bool>()) {
        let rb = &*RB;
        let name = if ss { ChannelName::SigmaMinusSigmaMinus } else { ChannelName::Zz };
        let ch = rb.channel(name);
        prop_assert!(ch.is_symmetric());
        let w = angular_frequency_from_thz(d);
        let (p, m) = (m_r(ch, w, rb, true).unwrap(), m_r(ch, -w, rb, true).unwrap());
        prop_assert!((p - m).norm() <= 1e-12 * p.norm(), "{d}: {p} {m}");
        let (sp, sm) = (sigma_r(ch, w, rb).unwrap(), sigma_r(ch, -w, rb).unwrap());
        prop_assert!(close(sp, sm, 1e-12));
    }

    #[test]
    fn photon_relabelling_leaves_sigma_e_unchanged(
        name in channel(),
        d in detuning_thz(),
        te in 1e-4..0.2f64,
        tau in -0.2..0.2f64,
    ) {
        let rb = &*RB_UNDAMPED;
        let ch = rb.channel(name);
        let sw = ch.swapped();
        let w = angular_frequency_from_thz(d);
        let a = 1.9e-13;
        let p = sigma_e(ch, w, te * PS, tau * PS, rb, a).unwrap();
        let q = sigma_e(&sw, -w, te * PS, -tau * PS, rb, a).unwrap();
        prop_assert!(close(p, q, 1e-12) || p.max(q) < 1e-300, "{p} {q}");
    }

    #[test]
    fn boxcar_series_meets_direct(frac in 0.5..2.0f64, neg in any::<bool>()) {
        let x = if neg { -frac } else { frac } * SERIES_THRESHOLD;
        let (s, d) = (boxcar_factor(x), boxcar_factor_direct(x));
        prop_assert!((s - d).norm() <= 1e-10 * d.norm());
    }

    #[test]
    fn sigma_e_inverse_in_area(name in channel(), d in detuning_thz(), te in 1e-3..0.1f64, tau in -0.05..0.05f64, a in 1e-14..1e-11f64) {
        let rb = &*RB;
        let ch = rb.channel(name);
        let w = angular_frequency_from_thz(d);
        let s1 = sigma_e(ch, w, te * PS, tau * PS, rb, a).unwrap();
        let s2 = sigma_e(ch, w, te * PS, tau * PS, rb, 2.0 * a).unwrap();
        prop_assert!(close(s1, 2.0 * s2, 1e-14));
    }

    #[test]
    fn sigma_e_prefactor_inverse_in_entanglement_time(d in detuning_thz(), te in 1e-3..0.1f64, tau in -0.05..0.05f64, k in 1.1..5.0f64) {
        let rb = &*RB;
        let ch = rb.channel(ChannelName::Zz);
        let w = angular_frequency_from_thz(d);
        let ratio = |t: f64| sigma_e(ch, w, t, tau * PS, rb, 1e-13).unwrap() * t / m_e(ch, w, t, tau * PS, rb).unwrap().norm_sqr();
        prop_assert!(close(ratio(te * PS), ratio(k * te * PS), 1e-12));
    }

    #[test]
    fn lorentzian_width_scaling(fwhm in 1e3..1e12f64, x in -10.0..10.0f64, k in 0.1..10.0f64) {
        // g(Δ; Γ) = g(Δ/k; Γ/k)/k
        let g1 = lorentzian_lineshape(x * fwhm, fwhm).unwrap();
        let g2 = lorentzian_lineshape(x * fwhm / k, fwhm / k).unwrap();
        prop_assert!(close(g1, g2 / k, 1e-12));
    }
}

#[test]
fn lorentzian_integrates_to_one() {
    let fwhm = 2.0 * std::f64::consts::PI * 6e6;
    let span = 2e4 * fwhm;
    let n = 800_000;
    let dx = 2.0 * span / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let x = -span + i as f64 * dx;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        s += w * lorentzian_lineshape(x, fwhm).unwrap();
    }
    s *= dx;
    // analytic weight of the tails beyond ±span
    let tail = 1.0 - 2.0 / std::f64::consts::PI * (2.0 * span / fwhm).atan();
    assert!((s + tail - 1.0).abs() < 1e-6, "{s}");
}
