//! State files: `{"n_qubits": N, "amplitudes": [[re, im], ...]}`.

use std::fs;
use std::path::Path;

use lggm_core::{PureState, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// Reads a state file. The amplitudes must already be normalized.
pub fn read_state(path: &Path) -> Result<PureState, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_state(text: &str) -> Result<PureState, CliError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let cap = lggm_core::qstate::DEFAULT_MAX_QUBITS;
    if file.n_qubits > cap {
        return Err(CliError::Core(lggm_core::Error::DimensionOverflow { n_qubits: file.n_qubits, cap }));
    }
    let expected = 1usize << file.n_qubits;
    if file.amplitudes.len() != expected {
        return Err(CliError::Parse(format!(
            "{} qubits need {expected} amplitudes, found {}",
            file.n_qubits,
            file.amplitudes.len()
        )));
    }
    let amps = file.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    Ok(PureState::from_normalized(amps)?)
}

pub fn state_json(state: &PureState) -> String {
    let file = StateFile {
        n_qubits: state.n_qubits(),
        amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn write_state(path: &Path, state: &PureState) -> Result<(), CliError> {
    fs::write(path, state_json(state)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
