//! Runtime predictions for Hamiltonian energy estimation on fault-tolerant
//! hardware, comparing noisy amplitude estimation with Bayesian inference
//! against standard sampling.

// Checks like `!(x > 0.0)` are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod fit;
pub mod format;
pub mod hamiltonian;
pub mod inference;
pub mod likelihood;
pub mod pipeline;
pub mod runtime_model;
pub mod sampling;
pub mod surface_code;
pub mod validation;

pub use circuit::{circuit_costs, layer_decay, layer_lambda, layer_time, CircuitCosts, Connectivity};
pub use error::{Error, Result};
pub use fit::{extrapolate, fit_power_law, PowerLawFit};
pub use hamiltonian::{
    parse_hamiltonian, synthesize_hamiltonian, CoefficientLaw, Pauli, PauliHamiltonian, PauliString, PauliTerm,
};
pub use inference::{
    bayes_update, choose_layer_count, ensemble_stats, run_ensemble, run_trial, GridPosterior, GridSpec, LayerPolicy,
    TrialConfig, TrialTrace,
};
pub use likelihood::{fisher_information, likelihood_noiseless, likelihood_noisy, NoiseModel, Outcome, PhasePoint};
pub use pipeline::{
    build_report, crossover_error_rate, optimal_point, sweep, LabeledSeries, Method, RuntimePrediction, SweepConfig,
    SweepPoint,
};
pub use runtime_model::{allocate, runtime_model, AllocationResult, RuntimeModelParams};
pub use sampling::{runtime_constant, standard_runtime, StandardSamplingEstimate};
pub use surface_code::{code_point, CodePoint, SurfaceCodeParams};
pub use validation::{validate_model, ValidationConfig, ValidationReport};
