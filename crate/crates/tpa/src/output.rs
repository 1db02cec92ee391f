//! CSV tables and the JSON manifest written next to every output.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tpa_core::etpa::EtpaSurface;
use tpa_core::rtpa::SpectrumSample;
use tpa_core::units::{thz_from_angular_frequency, PS};

use crate::atom_file::AtomOrigin;
use crate::error::{Error, Result};

pub const SPECTRUM_HEADER: [&str; 2] = ["delta_thz", "sigma_r_cm4s"];
pub const SURFACE_HEADER: [&str; 3] = ["te_ps", "tau_ps", "sigma_e_cm2"];

/// Axis coordinates: fixed nine decimals, enough for sub-femtosecond and sub-MHz grids.
pub fn format_axis(v: f64) -> String {
    let s = format!("{v:.9}");
    if s == "-0.000000000" { "0.000000000".into() } else { s }
}

/// Cross sections: ten significant digits in exponent form.
pub fn format_value(v: f64) -> String {
    format!("{v:.9e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

pub fn write_spectrum_csv(path: &Path, samples: &[SpectrumSample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SPECTRUM_HEADER).map_err(csv_err(path))?;
    for s in samples {
        w.write_record([format_axis(thz_from_angular_frequency(s.delta)), format_value(s.sigma_r)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Row-major, `T_e` outer, matching the surface's storage order.
pub fn write_surface_csv(path: &Path, surface: &EtpaSurface) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SURFACE_HEADER).map_err(csv_err(path))?;
    for (i, te) in surface.te_axis.iter().enumerate() {
        for (j, tau) in surface.tau_axis.iter().enumerate() {
            w.write_record([format_axis(te / PS), format_axis(tau / PS), format_value(surface.value(i, j))])
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<P: Serialize, R: Serialize> {
    pub command: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub atom: AtomOrigin,
    /// Full parameter set after defaults were applied.
    pub parameters: P,
    pub outputs: Vec<String>,
    pub result: R,
}

impl<P: Serialize, R: Serialize> RunManifest<P, R> {
    pub fn new(command: &'static str, atom: AtomOrigin, parameters: P, outputs: Vec<String>, result: R) -> Self {
        Self { command, tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), atom, parameters, outputs, result }
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("manifest always serializes");
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}
