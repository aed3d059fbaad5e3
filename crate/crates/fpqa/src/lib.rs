//! File formats, benchmark generators and IO helpers around `fpqa-core`.

pub mod bench;
pub mod error;
pub mod formats;
pub mod qasm;

use std::path::Path;

use fpqa_core::circuit::Circuit;
use fpqa_core::metrics::Problem;
use fpqa_core::qaoa::qaoa_circuit;
use fpqa_core::qsim::pauli_evolution_circuit;

pub use error::{Error, Result};

/// Rotation angle for Pauli strings without one, and the default QAOA γ.
pub const DEFAULT_ANGLE: f64 = 0.1;

/// Loads a workload, picking the format from the file extension:
/// `.qasm`, `.json` (circuit JSON), `.pauli` or `.edges`.
pub fn load_problem(path: &Path, angle: f64) -> Result<Problem> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "qasm" => Ok(Problem::Circuit(qasm::parse_qasm(&text)?)),
        "pauli" => Ok(Problem::Pauli(formats::parse_pauli(&text, angle)?)),
        "edges" => Ok(Problem::Qaoa { graph: formats::parse_edges(&text)?, gamma: angle }),
        "json" => Ok(Problem::Circuit(serde_json::from_str(&text)?)),
        other => Err(error::parse_err(0, format!("unknown input extension `{other}`"))),
    }
}

/// The gate-level circuit a problem stands for.
pub fn problem_circuit(p: &Problem) -> Result<Circuit> {
    Ok(match p {
        Problem::Circuit(c) => c.clone(),
        Problem::Pauli(t) => pauli_evolution_circuit(t)?,
        Problem::Qaoa { graph, gamma } => qaoa_circuit(graph, *gamma),
    })
}
