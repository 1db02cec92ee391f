//! `tpa` subcommands. Frequencies on the command line and in outputs are
//! ordinary THz; delays and entanglement times are ps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tpa_core::atom::{AtomModel, ChannelName, DipoleSource};
use tpa_core::etpa::{default_entanglement_area, EtpaGrid, EtpaPoint};
use tpa_core::rate::total_rate;
use tpa_core::rtpa::{closed_form_roots, null_solve, null_solve_numeric, rtpa_spectrum, DetuningSolution, RootClass, ScanSpec};
use tpa_core::units::{angular_frequency_from_thz, thz_from_angular_frequency, M2_TO_CM2, PS};

use crate::atom_file::{load_or_builtin, LoadedAtom};
use crate::error::{exit, Error, Result};
use crate::output::{manifest_path, write_json, write_spectrum_csv, write_surface_csv, RunManifest};
use crate::report::{channel_report, table_report, ChannelReport};
use crate::surface::{etpa_surface_parallel, te_oscillation, OscillationProbe};

#[derive(Debug, Parser)]
#[command(name = "tpa", version, about = "Random and entangled two-photon absorption through the Rb fine-structure doublet")]
pub struct Cli {
    /// JSON atom file; defaults to the bundled Rb parameters.
    #[arg(long, global = true)]
    pub atom_file: Option<PathBuf>,
    /// Source of the double-dipole products.
    #[arg(long, global = true, value_enum, default_value_t = Dipoles::Derived)]
    pub dipoles: Dipoles,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dipoles {
    /// Angular-momentum algebra.
    Derived,
    /// The bundled reference table.
    Published,
}

impl From<Dipoles> for DipoleSource {
    fn from(d: Dipoles) -> Self {
        match d {
            Dipoles::Derived => DipoleSource::Derived,
            Dipoles::Published => DipoleSource::Published,
        }
    }
}

fn parse_channel(s: &str) -> std::result::Result<ChannelName, String> {
    s.parse::<ChannelName>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct ScanArgs {
    /// Lower end of the root scan, THz.
    #[arg(long = "scan-min", default_value_t = -200.0, allow_hyphen_values = true)]
    pub scan_min: f64,
    /// Upper end of the root scan, THz.
    #[arg(long = "scan-max", default_value_t = 200.0, allow_hyphen_values = true)]
    pub scan_max: f64,
    /// Scan step, THz.
    #[arg(long = "scan-step", default_value_t = 0.001)]
    pub scan_step: f64,
}

impl ScanArgs {
    fn spec(&self) -> ScanSpec {
        ScanSpec::from_thz(self.scan_min, self.scan_max, self.scan_step)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dipole products and null detunings of all four channels against the reference table.
    Table1 {
        /// Accepted for symmetry with null-solve; table1 always compares.
        #[arg(long)]
        reference_check: bool,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Random two-photon cross section versus detuning.
    RtpaSpectrum {
        #[arg(long, value_parser = parse_channel)]
        channel: ChannelName,
        /// THz
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        min: f64,
        /// THz
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        max: f64,
        #[arg(long, default_value_t = 4001)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Entangled cross section over entanglement time and delay.
    EtpaSurface(SurfaceArgs),
    /// Detunings where the random matrix element vanishes.
    NullSolve {
        #[arg(long, value_parser = parse_channel)]
        channel: ChannelName,
        /// Compare with the reference table; exit 1 on mismatch.
        #[arg(long)]
        reference_check: bool,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Total absorption rate `σ_e φ + δ_r φ²`.
    Rate {
        /// Photon flux density, photons/(cm²·s).
        #[arg(long)]
        phi: f64,
        /// cm²
        #[arg(long, default_value_t = 1e-15)]
        sigma_e: f64,
        /// cm⁴·s
        #[arg(long)]
        delta_r: f64,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, value_parser = parse_channel, default_value = "zz")]
    #[serde(skip)]
    pub channel: ChannelName,
    /// Detuning, THz; defaults to the channel's near-resonance null closest to zero.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// ps
    #[arg(long, default_value_t = 0.0005)]
    pub te_min: f64,
    /// ps
    #[arg(long, default_value_t = 0.1)]
    pub te_max: f64,
    #[arg(long, default_value_t = 200)]
    pub n_te: usize,
    /// ps
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    pub tau_min: f64,
    /// ps
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 201)]
    pub n_tau: usize,
    /// Numerical aperture setting the entanglement area.
    #[arg(long, default_value_t = 1.0)]
    pub na: f64,
    /// Entanglement area override, cm².
    #[arg(long)]
    pub area_cm2: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// Runs one command, writing human output to `stdout`.
pub fn run(cli: &Cli, stdout: &mut String) -> Result<u8> {
    let atom = load_or_builtin(cli.atom_file.as_ref(), cli.dipoles.into())?;
    match &cli.command {
        Command::Table1 { scan, .. } => table1(&atom, scan, stdout),
        Command::RtpaSpectrum { channel, min, max, points, out } => {
            spectrum(&atom, *channel, *min, *max, *points, out, stdout)
        }
        Command::EtpaSurface(args) => etpa(&atom, args, stdout),
        Command::NullSolve { channel, reference_check, scan } => null(&atom, *channel, *reference_check, scan, stdout),
        Command::Rate { phi, sigma_e, delta_r } => rate(*phi, *sigma_e, *delta_r, stdout),
    }
}

fn thz(x: f64) -> f64 {
    thz_from_angular_frequency(x)
}

fn write_root_list(out: &mut String, label: &str, roots: impl Iterator<Item = (f64, RootClass)>) {
    let items: Vec<String> = roots
        .map(|(d, c)| {
            let tag = if c == RootClass::NearResonance { "" } else { " (far)" };
            format!("{:+.6}{tag}", thz(d))
        })
        .collect();
    let body = if items.is_empty() { "none".to_string() } else { items.join(", ") };
    let _ = writeln!(out, "  {label:<18}{body}");
}

fn render_report(r: &ChannelReport, atom: &AtomModel, out: &mut String) {
    let ch = atom.channel(r.channel);
    let prep = if ch.requires_state_preparation { "  [needs m_J = +1/2 preparation]" } else { "" };
    let _ = writeln!(out, "{} ({}, {}){prep}", r.channel.short(), ch.pol1.symbol(), ch.pol2.symbol());
    let _ = writeln!(out, "  {:<7} {:<4} {:<12} {:>13} {:>13}  {:<10} status", "level", "path", "exact", "value", "reference", "printed");
    for p in &r.products {
        let _ = writeln!(
            out,
            "  {:<7} {:<4} {:<12} {:>13.9} {:>13.9}  {:<10} {}",
            p.level,
            p.ordering,
            p.exact,
            p.value,
            p.reference,
            p.reference_printed,
            if p.ok { "ok" } else { "MISMATCH" }
        );
    }
    match closed_form_roots(r.channel, atom) {
        Ok(c) => {
            write_root_list(out, "closed form [THz]", c.iter().map(|&d| (d, classify(atom, d))));
        }
        Err(e) => {
            let _ = writeln!(out, "  {:<18}{e}", "closed form [THz]");
        }
    }
    write_root_list(out, "numeric [THz]", r.solution.numeric_roots.iter().map(|x| (x.delta, x.class)));
    if r.reference_has_no_solution {
        let status = if r.solution.no_real_solution { "ok" } else { "MISMATCH" };
        let _ = writeln!(out, "  {:<18}no real solution: {status}", "reference");
    }
    for c in &r.roots {
        let got = c.numeric_magnitude.map_or("none".to_string(), |m| format!("{m:.6}"));
        let status = if c.ok { "ok" } else { "MISMATCH" };
        let _ = writeln!(out, "  {:<18}|δ| = {} ± {:.4} vs {got}: {status}", "reference", c.reference_magnitude, c.tolerance);
    }
    for u in &r.unexpected_roots {
        let _ = writeln!(out, "  {:<18}|δ| = {u:.6} has no reference counterpart: MISMATCH", "numeric");
    }
    for w in &r.solution.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    let _ = writeln!(out, "  status: {}", if r.ok() { "match" } else { "MISMATCH" });
}

fn classify(atom: &AtomModel, d: f64) -> RootClass {
    if d.abs() <= atom.max_half_detuning() {
        RootClass::NearResonance
    } else {
        RootClass::FarOffResonance
    }
}

fn table1(atom: &LoadedAtom, scan: &ScanArgs, out: &mut String) -> Result<u8> {
    let reports = table_report(&atom.model, &scan.spec())?;
    let _ = writeln!(out, "dipole products in units of R_J (J = 3/2 entries with η factored out)");
    let _ = writeln!(out, "convention: {}", tpa_core::rtpa::DETUNING_CONVENTION);
    let _ = writeln!(out, "dipoles: {:?}; atom: {} ({})\n", atom.origin.dipoles, atom.origin.source, &atom.origin.sha256[..12]);
    for r in &reports {
        render_report(r, &atom.model, out);
        out.push('\n');
    }
    let matched = reports.iter().filter(|r| r.ok()).count();
    let _ = writeln!(out, "table1: {matched}/{} channels match", reports.len());
    Ok(if matched == reports.len() { exit::OK } else { exit::MISMATCH })
}

#[derive(Serialize)]
struct SpectrumParams {
    channel: ChannelName,
    min_thz: f64,
    max_thz: f64,
    points: usize,
}

#[derive(Serialize)]
struct SpectrumResult {
    min_sigma_r_cm4s: f64,
    min_at_thz: f64,
    max_sigma_r_cm4s: f64,
    max_at_thz: f64,
}

fn spectrum(atom: &LoadedAtom, channel: ChannelName, min: f64, max: f64, points: usize, path: &Path, out: &mut String) -> Result<u8> {
    let m = &atom.model;
    let samples = rtpa_spectrum(m.channel(channel), angular_frequency_from_thz(min), angular_frequency_from_thz(max), points, m)?;
    write_spectrum_csv(path, &samples)?;
    let lo = samples.iter().min_by(|a, b| a.sigma_r.total_cmp(&b.sigma_r)).expect("at least two samples");
    let hi = samples.iter().max_by(|a, b| a.sigma_r.total_cmp(&b.sigma_r)).expect("at least two samples");
    let result = SpectrumResult {
        min_sigma_r_cm4s: lo.sigma_r,
        min_at_thz: thz(lo.delta),
        max_sigma_r_cm4s: hi.sigma_r,
        max_at_thz: thz(hi.delta),
    };
    let params = SpectrumParams { channel, min_thz: min, max_thz: max, points };
    let manifest = RunManifest::new("rtpa-spectrum", atom.origin.clone(), params, vec![path.display().to_string()], result);
    write_json(&manifest_path(path), &manifest)?;
    let _ = writeln!(out, "wrote {} rows to {}", samples.len(), path.display());
    Ok(exit::OK)
}

#[derive(Serialize)]
struct PointOut {
    te_ps: f64,
    tau_ps: f64,
    sigma_e_cm2: f64,
}

impl From<EtpaPoint> for PointOut {
    fn from(p: EtpaPoint) -> Self {
        Self { te_ps: p.entanglement_time / PS, tau_ps: p.delay / PS, sigma_e_cm2: p.sigma_e }
    }
}

#[derive(Serialize)]
struct SurfaceParams<'a> {
    channel: ChannelName,
    delta_thz: f64,
    delta_source: &'static str,
    #[serde(flatten)]
    args: &'a SurfaceArgs,
}

#[derive(Serialize)]
struct SurfaceResult {
    channel: ChannelName,
    requires_state_preparation: bool,
    delta_thz: f64,
    entanglement_area_cm2: f64,
    lineshape: &'static str,
    peak: PointOut,
    grid_peak: PointOut,
    oscillation_probe: ProbeOut,
    dominant_te_frequency_thz: Option<f64>,
}

#[derive(Serialize)]
struct ProbeOut {
    tau_ps: f64,
    te_max_ps: f64,
    points: usize,
}

pub const LINESHAPE: &str = "lorentzian, FWHM = 1/final_lifetime, evaluated on resonance";

/// Default detuning for a surface: the near-resonance null closest to zero.
pub fn default_null(channel: ChannelName, atom: &AtomModel) -> Result<f64> {
    let sol = null_solve_numeric(channel, atom, &ScanSpec::default())?;
    sol.preferred_null().ok_or_else(|| {
        Error::Unsatisfiable(format!("{} has no real null detuning; pass --delta explicitly", channel.short()))
    })
}

fn etpa(atom: &LoadedAtom, args: &SurfaceArgs, out: &mut String) -> Result<u8> {
    let m = &atom.model;
    let (delta, delta_source) = match args.delta {
        Some(d) => (angular_frequency_from_thz(d), "explicit"),
        None => (default_null(args.channel, m)?, "near-resonance null"),
    };
    let a_e = match args.area_cm2 {
        Some(a) if a > 0.0 && a.is_finite() => a / M2_TO_CM2,
        Some(_) => return Err(tpa_core::Error::InvalidInput { field: "area_cm2", reason: "must be positive".into() }.into()),
        None => default_entanglement_area(m, args.na)?,
    };
    let grid = EtpaGrid {
        te_min: args.te_min * PS,
        te_max: args.te_max * PS,
        n_te: args.n_te,
        tau_min: args.tau_min * PS,
        tau_max: args.tau_max * PS,
        n_tau: args.n_tau,
    };
    let channel = m.channel(args.channel);
    let surface = etpa_surface_parallel(channel, delta, &grid, m, a_e)?;
    let probe = OscillationProbe::at_delay(surface.peak.delay);
    let (_, freq) = te_oscillation(channel, delta, &probe, m, a_e)?;
    write_surface_csv(&args.out, &surface)?;
    let result = SurfaceResult {
        channel: args.channel,
        requires_state_preparation: channel.requires_state_preparation,
        delta_thz: thz(delta),
        entanglement_area_cm2: a_e * M2_TO_CM2,
        lineshape: LINESHAPE,
        peak: surface.peak.into(),
        grid_peak: surface.grid_peak.into(),
        oscillation_probe: ProbeOut { tau_ps: probe.delay / PS, te_max_ps: probe.te_max / PS, points: probe.points },
        dominant_te_frequency_thz: freq.map(|f| f * 1e-12),
    };
    let params = SurfaceParams { channel: args.channel, delta_thz: thz(delta), delta_source, args };
    let manifest = RunManifest::new("etpa-surface", atom.origin.clone(), params, vec![args.out.display().to_string()], result);
    write_json(&manifest_path(&args.out), &manifest)?;
    let p = surface.peak;
    let _ = writeln!(
        out,
        "wrote {}x{} grid to {}; peak σ_e = {:.4e} cm² at T_e = {:.5} ps, τ = {:.5} ps",
        grid.n_te,
        grid.n_tau,
        args.out.display(),
        p.sigma_e,
        p.entanglement_time / PS,
        p.delay / PS
    );
    Ok(exit::OK)
}

#[derive(Serialize)]
struct RootOut {
    delta_thz: f64,
    class: RootClass,
}

#[derive(Serialize)]
struct NullOut {
    channel: ChannelName,
    requires_state_preparation: bool,
    convention: String,
    scan: ScanArgs,
    numeric_roots: Vec<RootOut>,
    root_magnitudes_thz: Vec<f64>,
    no_real_solution: bool,
    closed_form: ClosedOut,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceOut>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ClosedOut {
    Roots { roots_thz: Vec<f64>, consistent_with_numeric: bool },
    Unavailable { error: String },
}

#[derive(Serialize)]
struct ReferenceOut {
    matches: bool,
    roots: Vec<crate::report::RootCheck>,
    reference_has_no_solution: bool,
    unexpected_magnitudes_thz: Vec<f64>,
}

fn roots_out(sol: &DetuningSolution) -> Vec<RootOut> {
    sol.numeric_roots.iter().map(|r| RootOut { delta_thz: thz(r.delta), class: r.class }).collect()
}

fn null(atom: &LoadedAtom, channel: ChannelName, reference_check: bool, scan: &ScanArgs, out: &mut String) -> Result<u8> {
    let m = &atom.model;
    let spec = scan.spec();
    let (sol, closed) = match null_solve(channel, m, &spec) {
        Ok(sol) => {
            let closed = ClosedOut::Roots {
                roots_thz: sol.closed_form_roots.iter().map(|r| thz(r.delta)).collect(),
                consistent_with_numeric: sol.closed_form_consistent(),
            };
            (sol, closed)
        }
        Err(e @ (tpa_core::Error::DegenerateFormula { .. } | tpa_core::Error::Unsupported { .. })) => {
            (null_solve_numeric(channel, m, &spec)?, ClosedOut::Unavailable { error: e.to_string() })
        }
        Err(e) => return Err(e.into()),
    };
    let reference = if reference_check {
        let r = channel_report(channel, m, &spec)?;
        Some(ReferenceOut {
            matches: r.roots_ok(),
            roots: r.roots,
            reference_has_no_solution: r.reference_has_no_solution,
            unexpected_magnitudes_thz: r.unexpected_roots,
        })
    } else {
        None
    };
    let code = match &reference {
        Some(r) if !r.matches => exit::MISMATCH,
        _ => exit::OK,
    };
    let report = NullOut {
        channel,
        requires_state_preparation: m.channel(channel).requires_state_preparation,
        convention: sol.convention.clone(),
        scan: *scan,
        numeric_roots: roots_out(&sol),
        root_magnitudes_thz: sol.numeric_magnitudes().into_iter().map(thz).collect(),
        no_real_solution: sol.no_real_solution,
        closed_form: closed,
        warnings: sol.warnings.clone(),
        reference,
    };
    out.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
    out.push('\n');
    Ok(code)
}

#[derive(Serialize)]
struct RateOut {
    phi: f64,
    sigma_e_cm2: f64,
    delta_r_cm4s: f64,
    entangled_rate: f64,
    random_rate: f64,
    total_rate: f64,
    crossover_flux: Option<f64>,
}

fn rate(phi: f64, sigma_e: f64, delta_r: f64, out: &mut String) -> Result<u8> {
    let r = total_rate(phi, sigma_e, delta_r)?;
    let o = RateOut {
        phi,
        sigma_e_cm2: sigma_e,
        delta_r_cm4s: delta_r,
        entangled_rate: r.entangled_rate,
        random_rate: r.random_rate,
        total_rate: r.total,
        crossover_flux: r.crossover_flux,
    };
    out.push_str(&serde_json::to_string_pretty(&o).expect("rate serializes"));
    out.push('\n');
    Ok(exit::OK)
}
