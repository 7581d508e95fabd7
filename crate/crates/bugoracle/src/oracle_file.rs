//! Learned oracles on disk: `oracle.smt` holds the formula text and
//! `oracle.json` records where it came from.

use std::fs;
use std::path::Path;

use bugoracle_core::{formula_to_text, text_to_formula, Formula, LearnedOracle};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ORACLE: &str = "oracle.smt";
pub const SIDECAR: &str = "oracle.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSidecar {
    pub arity: usize,
    pub provenance: String,
    /// Size of the training suite the formula was checked against.
    pub consistent_with: usize,
    /// SHA-256 of the training suite's `manifest.json`.
    pub suite_sha256: String,
}

#[derive(Debug, thiserror::Error)]
pub enum OracleFileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Formula(#[from] bugoracle_core::FormulaError),
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_oracle(
    oracle: &LearnedOracle,
    arity: usize,
    manifest_json: &str,
    dir: &Path,
) -> std::io::Result<OracleSidecar> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(ORACLE), format!("{}\n", formula_to_text(oracle.formula())))?;
    let sidecar = OracleSidecar {
        arity,
        provenance: oracle.provenance().as_str().to_string(),
        consistent_with: oracle.consistent_with(),
        suite_sha256: sha256_hex(manifest_json.as_bytes()),
    };
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    fs::write(dir.join(SIDECAR), json)?;
    Ok(sidecar)
}

pub fn read_formula(path: &Path, arity: usize) -> Result<Formula, OracleFileError> {
    let text = fs::read_to_string(path)?;
    Ok(text_to_formula(text.trim(), arity)?)
}
