//! JSON atom files: loading, validation and canonical serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tpa_core::atom::{AtomModel, AtomParams, DipoleSource};

use crate::error::{Error, Result};

/// The bundled Rb parameter file, identical to [`AtomParams::rb87`].
pub const BUILTIN_RB87_JSON: &str = include_str!("../data/rb87.json");

/// Where a model came from, for manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomOrigin {
    /// `"builtin:rb87"` or the file path as given.
    pub source: String,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
    pub dipoles: DipoleSource,
}

#[derive(Debug, Clone)]
pub struct LoadedAtom {
    pub model: AtomModel,
    pub origin: AtomOrigin,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_atom_params(text: &str, path: &Path) -> Result<AtomParams> {
    serde_json::from_str(text).map_err(|e| Error::AtomFile { path: path.to_path_buf(), reason: e.to_string() })
}

/// Pretty JSON with a trailing newline; round-trips exactly through [`parse_atom_params`].
pub fn to_json(params: &AtomParams) -> String {
    let mut s = serde_json::to_string_pretty(params).expect("atom parameters always serialize");
    s.push('\n');
    s
}

fn build(text: &str, path: &Path, source: String, dipoles: DipoleSource) -> Result<LoadedAtom> {
    let params = parse_atom_params(text, path)?;
    let model = AtomModel::from_params(&params, dipoles)?;
    Ok(LoadedAtom { model, origin: AtomOrigin { source, sha256: sha256_hex(text.as_bytes()), dipoles } })
}

pub fn builtin(dipoles: DipoleSource) -> LoadedAtom {
    build(BUILTIN_RB87_JSON, Path::new("rb87.json"), "builtin:rb87".into(), dipoles)
        .expect("bundled atom file is valid")
}

pub fn load_atom_file(path: &Path, dipoles: DipoleSource) -> Result<LoadedAtom> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    build(&text, path, path.display().to_string(), dipoles)
}

/// Loads `path` if given, otherwise the bundled model.
pub fn load_or_builtin(path: Option<&PathBuf>, dipoles: DipoleSource) -> Result<LoadedAtom> {
    match path {
        Some(p) => load_atom_file(p, dipoles),
        None => Ok(builtin(dipoles)),
    }
}

pub fn save_atom_file(path: &Path, params: &AtomParams) -> Result<()> {
    fs::write(path, to_json(params)).map_err(|e| Error::io(path, e))
}
