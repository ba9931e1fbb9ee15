//! Compilation costs of the ansatz and the phase-flip reflection, and their
//! conversion into per-layer decay and per-layer time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::likelihood::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connectivity {
    /// Square-grid nearest-neighbour coupling.
    #[serde(rename = "2d")]
    TwoDimensional,
    #[serde(rename = "a2a")]
    AllToAll,
}

impl FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "2d" | "two-dimensional" => Ok(Connectivity::TwoDimensional),
            "a2a" | "all-to-all" => Ok(Connectivity::AllToAll),
            other => Err(invalid(format!("unknown connectivity {other:?} (expected 2d or a2a)"))),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connectivity::TwoDimensional => "2d",
            Connectivity::AllToAll => "a2a",
        })
    }
}

/// Two-qubit depths of the circuit components. Single-qubit and Pauli gates
/// are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitCosts {
    pub num_qubits: u64,
    pub connectivity: Connectivity,
    pub ansatz_depth: u64,
    pub phaseflip_depth: u64,
}

impl CircuitCosts {
    /// Effective two-qubit gates: depth times `N/2`, idle slots included.
    fn gates(&self, depth: u64) -> u64 {
        depth * self.num_qubits / 2
    }

    pub fn ansatz_gates(&self) -> u64 {
        self.gates(self.ansatz_depth)
    }

    pub fn phaseflip_gates(&self) -> u64 {
        self.gates(self.phaseflip_depth)
    }

    /// Depth of one amplification layer `A R0 A† P`: `2D_A + D_R`.
    pub fn layer_depth(&self) -> u64 {
        2 * self.ansatz_depth + self.phaseflip_depth
    }

    pub fn gates_per_layer(&self) -> u64 {
        self.gates(self.layer_depth())
    }
}

/// Depths for `n` logical qubits (`n ≥ 4`, even).
///
/// | connectivity | ansatz `D_A` | phase flip `D_R`   |
/// |--------------|--------------|--------------------|
/// | 2D           | `N`          | `192(N−3)(N−1)`    |
/// | all-to-all   | `N/2`        | `32N − 96`         |
pub fn circuit_costs(n: u64, connectivity: Connectivity) -> Result<CircuitCosts> {
    if n < 4 {
        return Err(invalid(format!("need at least 4 qubits, got {n}")));
    }
    if !n.is_multiple_of(2) {
        return Err(invalid(format!("qubit count must be even, got {n}")));
    }
    let (ansatz_depth, phaseflip_depth) = match connectivity {
        Connectivity::TwoDimensional => (n, 192 * (n - 3) * (n - 1)),
        Connectivity::AllToAll => (n / 2, 32 * n - 96),
    };
    Ok(CircuitCosts {
        num_qubits: n,
        connectivity,
        ansatz_depth,
        phaseflip_depth,
    })
}

/// `λ = −(gates per layer)·ln(1 − r̄_g)`, i.e. `e^{−λ} = (1 − r̄_g)^{(2D_A+D_R)N/2}`.
pub fn layer_lambda(costs: &CircuitCosts, logical_gate_error: f64) -> Result<f64> {
    if !(logical_gate_error > 0.0 && logical_gate_error < 1.0) {
        return Err(invalid(format!(
            "logical gate error must lie in (0, 1), got {logical_gate_error}"
        )));
    }
    Ok(-(costs.gates_per_layer() as f64) * (-logical_gate_error).ln_1p())
}

pub fn layer_decay(costs: &CircuitCosts, logical_gate_error: f64, p_bar: f64) -> Result<NoiseModel> {
    NoiseModel::new(layer_lambda(costs, logical_gate_error)?, p_bar)
}

/// `τ_l = (2D_A + D_R)·T̃_g`
pub fn layer_time(costs: &CircuitCosts, logical_gate_time: f64) -> Result<f64> {
    if !(logical_gate_time > 0.0) {
        return Err(invalid(format!("gate time must be positive, got {logical_gate_time}")));
    }
    Ok(costs.layer_depth() as f64 * logical_gate_time)
}
