//! Content-addressed storage of run records.
//!
//! A record is stored as `<dir>/<id>.json` where `id` is the SHA-256 of its
//! JSON encoding, so storing the same record twice is a no-op.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::digest::content_hash;
use crate::error::Result;
use crate::evolve::forcing::ForcingProfile;
use crate::evolve::mol::{GateReport, OutcomeKind, SimulationOutcome, SolverConfig};
use crate::params::Parameters;
use crate::profile::Profile;

/// Inputs and summary of one solver run; the stored form of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub params: Parameters,
    pub forcing: ForcingProfile,
    pub u0: Profile,
    pub w: Profile,
    pub solver: SolverConfig,
    pub outcome: OutcomeKind,
    pub final_time: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub gate: Option<GateReport>,
}

impl SimulationRecord {
    pub fn new(
        params: &Parameters,
        forcing: &ForcingProfile,
        u0: &Profile,
        w: &Profile,
        solver: &SolverConfig,
        out: &SimulationOutcome,
    ) -> Self {
        SimulationRecord {
            params: *params,
            forcing: *forcing,
            u0: *u0,
            w: *w,
            solver: solver.clone(),
            outcome: out.kind.clone(),
            final_time: out.final_time,
            steps: out.steps,
            rejected_steps: out.rejected_steps,
            gate: out.gate,
        }
    }
}

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "FUJITA_LAB_OUT";

/// `$FUJITA_LAB_OUT` if set, else `default`.
pub fn output_dir(default: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| default.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredRecord {
    pub id: String,
    pub path: PathBuf,
}

pub fn persist_run<T: Serialize>(dir: &Path, record: &T) -> Result<StoredRecord> {
    let id = content_hash(record)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{id}.json"));
    if !path.exists() {
        let tmp = dir.join(format!(".{id}.tmp"));
        std::fs::write(&tmp, serde_json::to_vec_pretty(record)?)?;
        std::fs::rename(&tmp, &path)?;
    }
    Ok(StoredRecord { id, path })
}

pub fn load_run<T: DeserializeOwned>(dir: &Path, id: &str) -> Result<T> {
    let bytes = std::fs::read(dir.join(format!("{id}.json")))?;
    Ok(serde_json::from_slice(&bytes)?)
}
