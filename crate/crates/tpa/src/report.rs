//! Comparison of a model's dipole products and null detunings with the bundled reference table.

use serde::Serialize;
use tpa_core::angular::double_dipole_products;
use tpa_core::atom::{AtomModel, ChannelName, DipoleSource};
use tpa_core::reference::{published_row, PublishedRoots};
use tpa_core::rtpa::{null_solve_numeric, DetuningSolution, ScanSpec};
use tpa_core::units::thz_from_angular_frequency;

use crate::error::Result;

/// Products must match to this relative error; zero entries must be exactly zero.
pub const PRODUCT_RTOL: f64 = 1e-12;

/// Roots must fall inside the quoted uncertainty times this factor.
pub const ROOT_UNCERTAINTY_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct ProductCheck {
    pub level: String,
    /// `"D21"` (photon 1 absorbed first) or `"D12"`.
    pub ordering: &'static str,
    /// Exact form in use, with `η` factored out.
    pub exact: String,
    pub value: f64,
    pub reference: f64,
    pub reference_printed: &'static str,
    pub relative_error: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootCheck {
    /// THz
    pub reference_magnitude: f64,
    pub tolerance: f64,
    /// Nearest near-resonance numeric `|δ|`, THz.
    pub numeric_magnitude: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub channel: ChannelName,
    pub products: Vec<ProductCheck>,
    pub solution: DetuningSolution,
    pub roots: Vec<RootCheck>,
    pub reference_has_no_solution: bool,
    /// Near-resonance numeric magnitudes with no reference root, THz.
    pub unexpected_roots: Vec<f64>,
}

impl ChannelReport {
    pub fn products_ok(&self) -> bool {
        self.products.iter().all(|p| p.ok)
    }

    pub fn roots_ok(&self) -> bool {
        let none_ok = !self.reference_has_no_solution || self.solution.no_real_solution;
        none_ok && self.roots.iter().all(|r| r.ok) && self.unexpected_roots.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.products_ok() && self.roots_ok()
    }
}

fn rel_err(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        (value - reference).abs() / reference.abs()
    }
}

pub fn product_checks(name: ChannelName, atom: &AtomModel) -> Result<Vec<ProductCheck>> {
    use tpa_core::angular::HalfInteger;
    let row = published_row(name);
    let ch = atom.channel(name);
    let derived = match atom.dipole_source {
        DipoleSource::Derived => {
            let (p1, p2) = name.polarizations();
            Some(double_dipole_products(p1, p2)?)
        }
        DipoleSource::Published => None,
    };
    let mut out = Vec::new();
    for (level, pair) in atom.levels.iter().zip(&ch.dipole_products) {
        let (refs, printed) = match level.term.j {
            HalfInteger::HALF => ([row.d21_half, row.d12_half], [row.printed[0], row.printed[1]]),
            HalfInteger::THREE_HALVES => ([row.d21_three_halves, row.d12_three_halves], [row.printed[2], row.printed[3]]),
            _ => continue,
        };
        let exact = derived
            .as_ref()
            .and_then(|d| d.iter().find(|p| p.intermediate_j == level.term.j))
            .map(|p| [p.d21.to_string(), p.d12.to_string()]);
        for (k, (ordering, value)) in [("D21", pair.d21), ("D12", pair.d12)].into_iter().enumerate() {
            // + 0.0 folds a signed zero into +0
            let value = value / level.eta_scale + 0.0;
            let relative_error = rel_err(value, refs[k]);
            out.push(ProductCheck {
                level: level.label.clone(),
                ordering,
                exact: exact.as_ref().map_or_else(|| printed[k].to_string(), |e| e[k].clone()),
                value,
                reference: refs[k],
                reference_printed: printed[k],
                relative_error,
                ok: relative_error <= PRODUCT_RTOL,
            });
        }
    }
    Ok(out)
}

/// Compare near-resonance numeric roots of `solution` with the reference magnitudes.
pub fn root_checks(solution: &DetuningSolution, reference: &PublishedRoots) -> (Vec<RootCheck>, Vec<f64>) {
    let mut numeric: Vec<f64> =
        solution.near_resonance_roots().map(|r| thz_from_angular_frequency(r.delta).abs()).collect();
    numeric.sort_by(f64::total_cmp);
    numeric.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let refs = reference.magnitudes();
    let checks: Vec<RootCheck> = refs
        .iter()
        .map(|&(m, u)| {
            let tolerance = ROOT_UNCERTAINTY_FACTOR * u;
            let nearest = numeric.iter().copied().min_by(|a, b| (a - m).abs().total_cmp(&(b - m).abs()));
            RootCheck {
                reference_magnitude: m,
                tolerance,
                numeric_magnitude: nearest,
                ok: nearest.is_some_and(|n| (n - m).abs() <= tolerance),
            }
        })
        .collect();
    let unexpected = numeric
        .into_iter()
        .filter(|n| !refs.iter().any(|&(m, u)| (n - m).abs() <= ROOT_UNCERTAINTY_FACTOR * u))
        .collect();
    (checks, unexpected)
}

pub fn channel_report(name: ChannelName, atom: &AtomModel, scan: &ScanSpec) -> Result<ChannelReport> {
    let products = product_checks(name, atom)?;
    let solution = null_solve_numeric(name, atom, scan)?;
    let reference = published_row(name).roots;
    let (roots, unexpected_roots) = root_checks(&solution, &reference);
    Ok(ChannelReport {
        channel: name,
        products,
        solution,
        roots,
        reference_has_no_solution: matches!(reference, PublishedRoots::None),
        unexpected_roots,
    })
}

pub fn table_report(atom: &AtomModel, scan: &ScanSpec) -> Result<Vec<ChannelReport>> {
    ChannelName::ALL.iter().map(|&n| channel_report(n, atom, scan)).collect()
}
