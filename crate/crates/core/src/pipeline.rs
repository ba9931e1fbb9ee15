//! Code-distance sweeps comparing noisy amplitude estimation (RAE) against
//! standard sampling (VQE), and per-molecule runtime reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{circuit_costs, layer_lambda, layer_time, CircuitCosts, Connectivity};
use crate::error::{invalid, Error, Result};
use crate::fit::fit_power_law;
use crate::format::{sig9, to_json_9};
use crate::hamiltonian::PauliHamiltonian;
use crate::likelihood::NoiseModel;
use crate::runtime_model::{allocate, RuntimeModelParams};
use crate::sampling::{runtime_constant, standard_runtime_from_constant};
use crate::surface_code::{code_point, physical_qubits, SurfaceCodeParams, DEFAULT_MAX_DISTANCE, MIN_DISTANCE};

/// Default target RMSE in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.0e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub target_rmse: f64,
    pub connectivity: Connectivity,
    pub code: SurfaceCodeParams,
    pub d_min: u32,
    pub d_max: u32,
    pub p_bar: f64,
    /// Largest per-layer decay at which the RAE runtime model is used. The
    /// model's `e^{−λ}` prefactor makes its runtime fall with added noise once
    /// `λ > 1`; such points are reported with infinite RAE runtime.
    pub max_lambda: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            target_rmse: CHEMICAL_ACCURACY,
            connectivity: Connectivity::AllToAll,
            code: SurfaceCodeParams::default(),
            d_min: MIN_DISTANCE,
            d_max: DEFAULT_MAX_DISTANCE,
            p_bar: 1.0,
            max_lambda: 1.0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rmse > 0.0 && self.target_rmse.is_finite()) {
            return Err(invalid(format!(
                "target RMSE must be positive, got {}",
                self.target_rmse
            )));
        }
        if self.d_min < MIN_DISTANCE || self.d_max > DEFAULT_MAX_DISTANCE || self.d_min > self.d_max {
            return Err(invalid(format!(
                "distance range {}..={} must lie within {MIN_DISTANCE}..={DEFAULT_MAX_DISTANCE}",
                self.d_min, self.d_max
            )));
        }
        if !(self.p_bar > 0.0 && self.p_bar <= 1.0) {
            return Err(invalid(format!("p_bar must lie in (0, 1], got {}", self.p_bar)));
        }
        if !(self.max_lambda > 0.0) {
            return Err(invalid("max_lambda must be positive"));
        }
        self.code.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub distance: u32,
    pub gate_error: f64,
    pub gate_time: f64,
    pub lambda: f64,
    pub layer_time: f64,
    /// Serial RAE runtime in seconds; infinite where the model is not used.
    pub rae_runtime: f64,
    pub rae_parallel_runtime: f64,
    pub vqe_runtime: f64,
    pub rae_physical_qubits: u64,
    pub vqe_physical_qubits: u64,
}

impl SweepPoint {
    pub fn runtime(&self, method: Method) -> f64 {
        match method {
            Method::Rae => self.rae_runtime,
            Method::Vqe => self.vqe_runtime,
        }
    }

    pub fn layer_fidelity(&self) -> f64 {
        (-self.lambda).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Rae,
    Vqe,
}

/// RAE layer totals `(Σ_j t_j, max_j t_j)` for a given per-layer decay.
type LayerTotals<'a> = dyn Fn(&NoiseModel) -> Result<(f64, f64)> + Sync + 'a;

fn evaluate_point(
    distance: u32,
    costs: &CircuitCosts,
    config: &SweepConfig,
    layers: &LayerTotals<'_>,
    k: f64,
) -> Result<SweepPoint> {
    let code = code_point(distance, &config.code)?;
    let lambda = layer_lambda(costs, code.logical_gate_error)?;
    let tau = layer_time(costs, code.logical_gate_time)?;
    let (rae_runtime, rae_parallel_runtime) = if lambda <= config.max_lambda {
        let noise = NoiseModel::new(lambda, config.p_bar)?;
        let (total, parallel) = layers(&noise)?;
        (tau * total, tau * parallel.min(total))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let vqe = standard_runtime_from_constant(k, config.target_rmse, costs, &code)?;
    let qubits = physical_qubits(costs.num_qubits, distance);
    Ok(SweepPoint {
        distance,
        gate_error: code.logical_gate_error,
        gate_time: code.logical_gate_time,
        lambda,
        layer_time: tau,
        rae_runtime,
        rae_parallel_runtime,
        vqe_runtime: vqe.total_runtime,
        rae_physical_qubits: qubits,
        vqe_physical_qubits: qubits,
    })
}

fn sweep_with(num_qubits: u64, config: &SweepConfig, layers: &LayerTotals<'_>, k: f64) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let costs = circuit_costs(num_qubits, config.connectivity)?;
    (config.d_min..=config.d_max)
        .into_par_iter()
        .map(|d| evaluate_point(d, &costs, config, layers, k))
        .collect()
}

/// Both methods' runtimes at every code distance in the configured range.
pub fn sweep(h: &PauliHamiltonian, config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let k = runtime_constant(h)?;
    let layers = |noise: &NoiseModel| -> Result<(f64, f64)> {
        let a = allocate(h, config.target_rmse, &RuntimeModelParams::in_layers(noise)?)?;
        Ok((a.total_runtime, a.parallel_runtime))
    };
    sweep_with(h.num_qubits() as u64, config, &layers, k)
}

/// Point with the smallest runtime for `method`; ties go to the smaller distance.
pub fn optimal_point(points: &[SweepPoint], method: Method) -> Result<SweepPoint> {
    let best = points.iter().filter(|p| p.runtime(method).is_finite()).min_by(|a, b| {
        a.runtime(method)
            .total_cmp(&b.runtime(method))
            .then(a.distance.cmp(&b.distance))
    });
    match best {
        Some(p) => Ok(*p),
        None if points.is_empty() => Err(Error::Empty("sweep has no points")),
        None if method == Method::Rae => Err(Error::NoValidRaePoint),
        None => Err(invalid("no finite standard-sampling runtime in sweep")),
    }
}

/// Largest swept gate error at which RAE beats VQE there and at every smaller
/// swept gate error.
pub fn crossover_error_rate(points: &[SweepPoint]) -> Option<f64> {
    let mut sorted: Vec<&SweepPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.gate_error.total_cmp(&b.gate_error));
    sorted
        .iter()
        .take_while(|p| p.rae_runtime < p.vqe_runtime)
        .last()
        .map(|p| p.gate_error)
}

pub const SWEEP_CSV_HEADER: &str =
    "d,gate_error,gate_time_s,lambda,tau_l_s,rae_runtime_s,vqe_runtime_s,rae_physical_qubits,vqe_physical_qubits";

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.distance,
            sig9(p.gate_error),
            sig9(p.gate_time),
            sig9(p.lambda),
            sig9(p.layer_time),
            sig9(p.rae_runtime),
            sig9(p.vqe_runtime),
            p.rae_physical_qubits,
            p.vqe_physical_qubits
        ));
    }
    out
}

/// Hamiltonians of one molecule at increasing qubit counts.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub label: String,
    pub hamiltonians: Vec<PauliHamiltonian>,
    /// Qubit count to extrapolate to; defaults to the largest in the series.
    pub target_qubits: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuntimePrediction {
    pub label: String,
    pub logical_qubits: u64,
    pub vqe_physical_qubits: u64,
    pub rae_physical_qubits: u64,
    pub vqe_code_distance: u32,
    pub rae_code_distance: u32,
    pub vqe_optimal_gate_error: f64,
    pub rae_optimal_gate_error: f64,
    pub crossover_gate_error: Option<f64>,
    pub vqe_runtime_s: f64,
    pub rae_runtime_s: f64,
    /// `vqe_runtime_s / rae_runtime_s`, each at its own optimum.
    pub runtime_ratio: f64,
    pub rae_parallel_runtime_s: f64,
    /// `e^{−λ}` at the RAE optimum.
    pub rae_layer_fidelity: f64,
}

/// Sweep for one series, extrapolated to the series' target qubit count.
///
/// At every distance the per-layer decay of the target-size circuit is
/// applied to each series member; the resulting RAE layer totals and the
/// standard-sampling constant `K` are fitted with `aN^b + c` and evaluated at
/// the target size. A single-member series is evaluated directly.
pub fn series_sweep(series: &LabeledSeries, config: &SweepConfig) -> Result<(u64, Vec<SweepPoint>)> {
    let mut members: Vec<&PauliHamiltonian> = series.hamiltonians.iter().collect();
    if members.is_empty() {
        return Err(Error::Empty("series has no Hamiltonians"));
    }
    members.sort_by_key(|h| h.num_qubits());
    let sizes: Vec<f64> = members.iter().map(|h| h.num_qubits() as f64).collect();
    let largest = members[members.len() - 1].num_qubits() as u64;
    let target = series.target_qubits.unwrap_or(largest);

    if members.len() == 1 {
        let h = members[0];
        if target != h.num_qubits() as u64 {
            return Err(invalid(format!(
                "series {:?} has a single Hamiltonian on {} qubits and cannot be extrapolated to {target}",
                series.label,
                h.num_qubits()
            )));
        }
        return Ok((target, sweep(h, config)?));
    }

    let ks: Vec<(f64, f64)> = members
        .iter()
        .zip(&sizes)
        .map(|(h, &n)| Ok((n, runtime_constant(h)?)))
        .collect::<Result<_>>()?;
    let k = fit_power_law(&ks)?.extrapolate(target)?;
    let layers = |noise: &NoiseModel| -> Result<(f64, f64)> {
        let params = RuntimeModelParams::in_layers(noise)?;
        let mut totals = Vec::with_capacity(members.len());
        let mut maxima = Vec::with_capacity(members.len());
        for (h, &n) in members.iter().zip(&sizes) {
            let a = allocate(h, config.target_rmse, &params)?;
            totals.push((n, a.total_runtime));
            maxima.push((n, a.parallel_runtime));
        }
        Ok((
            fit_power_law(&totals)?.extrapolate(target)?,
            fit_power_law(&maxima)?.extrapolate(target)?,
        ))
    };
    Ok((target, sweep_with(target, config, &layers, k)?))
}

pub fn predict(label: &str, logical_qubits: u64, points: &[SweepPoint]) -> Result<RuntimePrediction> {
    let rae = optimal_point(points, Method::Rae)?;
    let vqe = optimal_point(points, Method::Vqe)?;
    Ok(RuntimePrediction {
        label: label.to_string(),
        logical_qubits,
        vqe_physical_qubits: vqe.vqe_physical_qubits,
        rae_physical_qubits: rae.rae_physical_qubits,
        vqe_code_distance: vqe.distance,
        rae_code_distance: rae.distance,
        vqe_optimal_gate_error: vqe.gate_error,
        rae_optimal_gate_error: rae.gate_error,
        crossover_gate_error: crossover_error_rate(points),
        vqe_runtime_s: vqe.vqe_runtime,
        rae_runtime_s: rae.rae_runtime,
        runtime_ratio: vqe.vqe_runtime / rae.rae_runtime,
        rae_parallel_runtime_s: rae.rae_parallel_runtime,
        rae_layer_fidelity: rae.layer_fidelity(),
    })
}

/// One prediction per series, in input order.
pub fn build_report(series: &[LabeledSeries], config: &SweepConfig) -> Result<Vec<RuntimePrediction>> {
    config.validate()?;
    series
        .par_iter()
        .map(|s| {
            let (n, points) = series_sweep(s, config)?;
            predict(&s.label, n, &points)
        })
        .collect()
}

pub fn report_json(report: &[RuntimePrediction]) -> Result<String> {
    Ok(to_json_9(&report)?)
}
