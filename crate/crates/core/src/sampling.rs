//! Standard-sampling baseline: `M = K/ε̄²` shots of the ansatz circuit,
//! inflated by the variance cost of rescaling out the circuit fidelity.

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitCosts;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::PauliHamiltonian;
use crate::surface_code::CodePoint;

/// Runtime constant `K = (Σ_{i≠identity} |μ_i|)²` in Ha².
///
/// This is the ungrouped bound with unit single-shot variance per term and
/// shots allocated in proportion to `|μ_i|`.
pub fn runtime_constant(h: &PauliHamiltonian) -> Result<f64> {
    if h.measured_terms().next().is_none() {
        return Err(Error::NoNonIdentityTerms);
    }
    Ok(h.one_norm(false).powi(2))
}

/// `1/f² = (1 − r̄_g)^{−D_A·N}`
pub fn mitigation_overhead(costs: &CircuitCosts, logical_gate_error: f64) -> Result<f64> {
    overhead_for_exponent((costs.ansatz_depth * costs.num_qubits) as f64, logical_gate_error)
}

pub(crate) fn overhead_for_exponent(exponent: f64, logical_gate_error: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&logical_gate_error) {
        return Err(invalid(format!(
            "logical gate error must lie in [0, 1), got {logical_gate_error}"
        )));
    }
    Ok((-exponent * (-logical_gate_error).ln_1p()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardSamplingEstimate {
    pub runtime_constant: f64,
    pub shots: f64,
    /// Seconds per shot: `D_A·T̃_g`.
    pub shot_time: f64,
    pub mitigation_overhead: f64,
    pub total_runtime: f64,
}

pub fn standard_runtime(
    h: &PauliHamiltonian,
    target_rmse: f64,
    costs: &CircuitCosts,
    code: &CodePoint,
) -> Result<StandardSamplingEstimate> {
    standard_runtime_from_constant(runtime_constant(h)?, target_rmse, costs, code)
}

/// Same as [`standard_runtime`] for a given (e.g. extrapolated) `K`.
pub fn standard_runtime_from_constant(
    runtime_constant: f64,
    target_rmse: f64,
    costs: &CircuitCosts,
    code: &CodePoint,
) -> Result<StandardSamplingEstimate> {
    if !(target_rmse > 0.0 && target_rmse.is_finite()) {
        return Err(invalid(format!("target RMSE must be positive, got {target_rmse}")));
    }
    if !(runtime_constant > 0.0 && runtime_constant.is_finite()) {
        return Err(invalid(format!(
            "runtime constant must be positive, got {runtime_constant}"
        )));
    }
    let shots = runtime_constant / (target_rmse * target_rmse);
    let shot_time = costs.ansatz_depth as f64 * code.logical_gate_time;
    let overhead = mitigation_overhead(costs, code.logical_gate_error)?;
    Ok(StandardSamplingEstimate {
        runtime_constant,
        shots,
        shot_time,
        mitigation_overhead: overhead,
        total_runtime: shots * shot_time * overhead,
    })
}
