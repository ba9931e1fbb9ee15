use std::path::{Path, PathBuf};

use rae_core::format::{sig9, to_json_9};
use rae_core::inference::{ensemble_csv, TRACE_CSV_HEADER};
use rae_core::pipeline::{report_json, sweep_csv};
use rae_core::{
    allocate, build_report, circuit_costs, code_point, crossover_error_rate, ensemble_stats, fit_power_law,
    layer_decay, layer_time, optimal_point, parse_hamiltonian, run_ensemble, standard_runtime, sweep,
    synthesize_hamiltonian, validate_model, CoefficientLaw, GridSpec, LabeledSeries, LayerPolicy, Method, NoiseModel,
    PauliHamiltonian, RuntimeModelParams, RuntimePrediction, SurfaceCodeParams, SweepConfig, SweepPoint, TrialConfig,
    ValidationConfig,
};
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::error::CliError;
use crate::output::{emit, read_input, write_atomic};

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::ValidateModel(a) => validate(a),
        Command::Allocate(a) => allocate_cmd(a),
        Command::Estimate(a) => estimate(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Fit(a) => fit(a),
        Command::Report(a) => report(a),
        Command::Synthesize(a) => synthesize(a),
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    to_json_9(value).map_err(|e| CliError::Runtime(e.to_string()))
}

fn load_hamiltonian(path: &Path) -> Result<PauliHamiltonian, CliError> {
    parse_hamiltonian(&read_input(path)?).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn noise_from(fidelity: Option<f64>, lambda: Option<f64>, p_bar: f64) -> Result<NoiseModel, CliError> {
    Ok(match (fidelity, lambda) {
        (Some(f), _) => NoiseModel::from_layer_fidelity(f, p_bar)?,
        (None, Some(l)) => NoiseModel::new(l, p_bar)?,
        (None, None) => NoiseModel::new(0.0, p_bar)?,
    })
}

fn check_trim(trim: f64) -> Result<(), CliError> {
    if (0.0..1.0).contains(&trim) {
        Ok(())
    } else {
        Err(config_err(format!("trim fraction must lie in [0, 1), got {trim}")))
    }
}

fn sweep_config(cost: &CostArgs, d_min: u32, d_max: u32) -> Result<SweepConfig, CliError> {
    let config = SweepConfig {
        target_rmse: cost.target_rmse,
        connectivity: cost.connectivity.into(),
        code: SurfaceCodeParams {
            cycle_time: cost.cycle_time,
            ..SurfaceCodeParams::default()
        },
        d_min,
        d_max,
        p_bar: cost.p_bar,
        max_lambda: cost.max_lambda,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    config: &'a TrialConfig,
    trials: usize,
    trim_fraction: f64,
    curve: &'a [rae_core::inference::EnsemblePoint],
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let noise = noise_from(a.layer_fidelity, a.lambda, a.p_bar)?;
    check_trim(a.trim)?;
    if a.trials == 0 {
        return Err(config_err("trials must be at least 1"));
    }
    let layer_policy = match a.fixed_layers {
        Some(layers) => LayerPolicy::Fixed { layers },
        None => LayerPolicy::FisherPerTime {
            max_layers: a.max_layers,
        },
    };
    let config = TrialConfig {
        true_pi: a.pi,
        noise,
        prior_sd: a.prior_sd,
        prior_mean_jitter_sd: a.jitter_sd,
        max_steps: a.steps,
        seed: a.seed,
        stream: 0,
        layer_policy,
        grid: GridSpec {
            points: a.grid_points,
            window_sds: a.grid_window,
        },
    };
    config.validate()?;

    let traces = run_ensemble(&config, a.trials)?;
    let curve = ensemble_stats(&traces, a.trim)?;
    if let Some(path) = &a.traces {
        let body = match a.format {
            Format::Csv => {
                let mut out = format!("trial,{TRACE_CSV_HEADER}\n");
                for (i, t) in traces.iter().enumerate() {
                    for line in t.to_csv().lines().skip(1) {
                        out.push_str(&format!("{i},{line}\n"));
                    }
                }
                out
            }
            Format::Json => json(&traces)?,
        };
        write_atomic(path, &body)?;
    }
    let body = match a.format {
        Format::Csv => ensemble_csv(&curve, a.trim),
        Format::Json => json(&SimulateOutput {
            config: &config,
            trials: a.trials,
            trim_fraction: a.trim,
            curve: &curve,
        })?,
    };
    write_atomic(&a.out, &body)
}

fn validate(a: ValidateArgs) -> Result<(), CliError> {
    let defaults = ValidationConfig::default();
    let config = ValidationConfig {
        pis: a.pis.unwrap_or(defaults.pis),
        layer_fidelities: a.layer_fidelities.unwrap_or(defaults.layer_fidelities),
        trials: a.trials,
        prior_sd: a.prior_sd,
        p_bar: a.p_bar,
        trim_fraction: a.trim,
        seed: a.seed,
        grid: GridSpec {
            points: a.grid_points,
            window_sds: (a.grid_window != 0.0).then_some(a.grid_window),
        },
        target_fractions: a.targets.unwrap_or(defaults.target_fractions),
        max_steps: a.max_steps,
        ..defaults
    };
    check_trim(config.trim_fraction)?;
    config.validate()?;
    let report = validate_model(&config)?;
    let passing = report.settings.iter().filter(|s| s.within_bounds).count();
    eprintln!(
        "{passing}/{} settings within simulated/model ratio bounds [{}, {}]",
        report.settings.len(),
        config.ratio_bounds.0,
        config.ratio_bounds.1
    );
    let body = match a.format {
        Format::Csv => report.to_csv(),
        Format::Json => json(&report)?,
    };
    emit(a.out.as_deref(), &body)
}

fn allocate_cmd(a: AllocateArgs) -> Result<(), CliError> {
    let h = load_hamiltonian(&a.hamiltonian)?;
    let params = match a.distance {
        Some(d) => {
            let costs = circuit_costs(h.num_qubits() as u64, a.connectivity.into())?;
            let code = code_point(
                d,
                &SurfaceCodeParams {
                    cycle_time: a.cycle_time,
                    ..SurfaceCodeParams::default()
                },
            )?;
            let noise = layer_decay(&costs, code.logical_gate_error, a.p_bar)?;
            RuntimeModelParams::calibrated(&noise, layer_time(&costs, code.logical_gate_time)?)?
        }
        None => {
            let noise = noise_from(a.layer_fidelity, a.lambda, a.p_bar)?;
            match a.layer_time {
                Some(tau) => RuntimeModelParams::calibrated(&noise, tau)?,
                None => RuntimeModelParams::in_layers(&noise)?,
            }
        }
    };
    let result = allocate(&h, a.target_rmse, &params)?;
    let body = match a.format {
        Format::Csv => result.to_csv(),
        Format::Json => json(&result)?,
    };
    emit(a.out.as_deref(), &body)
}

#[derive(Serialize)]
struct EstimateOutput {
    point: SweepPoint,
    standard_sampling: rae_core::StandardSamplingEstimate,
}

fn estimate(a: EstimateArgs) -> Result<(), CliError> {
    let h = load_hamiltonian(&a.hamiltonian)?;
    let base = sweep_config(&a.cost, 3, 51)?;
    let distance = match (a.distance, a.gate_error) {
        (Some(d), _) => d,
        (None, Some(target)) => rae_core::surface_code::distance_for_error(target, &base.code)?.distance,
        (None, None) => return Err(config_err("give --distance or --gate-error")),
    };
    let config = sweep_config(&a.cost, distance, distance)?;
    let point = sweep(&h, &config)?[0];
    let costs = circuit_costs(h.num_qubits() as u64, config.connectivity)?;
    let code = code_point(distance, &config.code)?;
    let standard_sampling = standard_runtime(&h, config.target_rmse, &costs, &code)?;
    let body = match a.format {
        Format::Csv => sweep_csv(&[point]),
        Format::Json => json(&EstimateOutput {
            point,
            standard_sampling,
        })?,
    };
    emit(a.out.as_deref(), &body)
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    points: &'a [SweepPoint],
    rae_optimum: Option<SweepPoint>,
    vqe_optimum: Option<SweepPoint>,
    crossover_gate_error: Option<f64>,
}

fn sweep_cmd(a: SweepArgs) -> Result<(), CliError> {
    let h = load_hamiltonian(&a.hamiltonian)?;
    let config = sweep_config(&a.cost, a.d_min, a.d_max)?;
    let points = sweep(&h, &config)?;
    let rae = optimal_point(&points, Method::Rae).ok();
    let vqe = optimal_point(&points, Method::Vqe).ok();
    let crossover = crossover_error_rate(&points);
    for (name, method, p) in [("RAE", Method::Rae, rae), ("VQE", Method::Vqe, vqe)] {
        match p {
            Some(p) => eprintln!("{name} optimum: d={} runtime={} s", p.distance, sig9(p.runtime(method))),
            None => eprintln!("{name} optimum: none in range"),
        }
    }
    match crossover {
        Some(g) => eprintln!("crossover gate error: {}", sig9(g)),
        None => eprintln!("crossover gate error: none in range"),
    }
    let body = match a.format {
        Format::Csv => sweep_csv(&points),
        Format::Json => json(&SweepOutput {
            points: &points,
            rae_optimum: rae,
            vqe_optimum: vqe,
            crossover_gate_error: crossover,
        })?,
    };
    emit(a.out.as_deref(), &body)
}

fn parse_points(text: &str, path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [n, y] => n.parse::<f64>().ok().zip(y.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => points.push(p),
            None if points.is_empty() && i == 0 => {}
            None => return Err(config_err(format!("{}:{}: expected `N,y`", path.display(), i + 1))),
        }
    }
    Ok(points)
}

#[derive(Serialize)]
struct FitOutput {
    fit: rae_core::PowerLawFit,
    target_qubits: Option<u64>,
    prediction: Option<f64>,
}

fn fit(a: FitArgs) -> Result<(), CliError> {
    let points = parse_points(&read_input(&a.input)?, &a.input)?;
    let fit = fit_power_law(&points)?;
    let prediction = a.target.map(|n| fit.extrapolate(n)).transpose()?;
    let body = match a.format {
        Format::Csv => {
            let mut head = String::from("a,b,c,residual_norm,points_used,c_pinned");
            let mut row = format!(
                "{},{},{},{},{},{}",
                sig9(fit.a),
                sig9(fit.b),
                sig9(fit.c),
                sig9(fit.residual_norm),
                fit.points_used,
                fit.c_pinned
            );
            if let (Some(n), Some(y)) = (a.target, prediction) {
                head.push_str(",target_qubits,prediction");
                row.push_str(&format!(",{n},{}", sig9(y)));
            }
            format!("{head}\n{row}\n")
        }
        Format::Json => json(&FitOutput {
            fit,
            target_qubits: a.target,
            prediction,
        })?,
    };
    emit(a.out.as_deref(), &body)
}

/// One entry of a `report --series` manifest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesEntry {
    label: String,
    hamiltonians: Vec<PathBuf>,
    #[serde(default)]
    target_qubits: Option<u64>,
}

fn load_series(path: &Path) -> Result<Vec<LabeledSeries>, CliError> {
    let entries: Vec<SeriesEntry> =
        serde_json::from_str(&read_input(path)?).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    entries
        .into_iter()
        .map(|e| {
            let hamiltonians = e
                .hamiltonians
                .iter()
                .map(|p| load_hamiltonian(&base.join(p)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(LabeledSeries {
                label: e.label,
                hamiltonians,
                target_qubits: e.target_qubits,
            })
        })
        .collect()
}

const REPORT_CSV_HEADER: &str = "label,logical_qubits,vqe_physical_qubits,rae_physical_qubits,vqe_code_distance,\
rae_code_distance,vqe_optimal_gate_error,rae_optimal_gate_error,crossover_gate_error,vqe_runtime_s,rae_runtime_s,\
runtime_ratio,rae_parallel_runtime_s,rae_layer_fidelity";

fn report_csv(report: &[RuntimePrediction]) -> String {
    let mut out = format!("{REPORT_CSV_HEADER}\n");
    for r in report {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.label,
            r.logical_qubits,
            r.vqe_physical_qubits,
            r.rae_physical_qubits,
            r.vqe_code_distance,
            r.rae_code_distance,
            sig9(r.vqe_optimal_gate_error),
            sig9(r.rae_optimal_gate_error),
            r.crossover_gate_error.map(sig9).unwrap_or_default(),
            sig9(r.vqe_runtime_s),
            sig9(r.rae_runtime_s),
            sig9(r.runtime_ratio),
            sig9(r.rae_parallel_runtime_s),
            sig9(r.rae_layer_fidelity),
        ));
    }
    out
}

fn report(a: ReportArgs) -> Result<(), CliError> {
    let series = match (&a.series, &a.hamiltonian) {
        (Some(path), _) => load_series(path)?,
        (None, Some(paths)) => vec![LabeledSeries {
            label: a.label.clone(),
            hamiltonians: paths.iter().map(|p| load_hamiltonian(p)).collect::<Result<_, _>>()?,
            target_qubits: a.target_qubits,
        }],
        (None, None) => return Err(config_err("give --series or --hamiltonian")),
    };
    let config = sweep_config(&a.cost, a.d_min, a.d_max)?;
    let report = build_report(&series, &config)?;
    let body = match a.format {
        Format::Csv => report_csv(&report),
        Format::Json => report_json(&report)?,
    };
    emit(a.out.as_deref(), &body)
}

fn synthesize(a: SynthesizeArgs) -> Result<(), CliError> {
    let law = match (a.scale, a.log_min, a.log_max) {
        (_, Some(min), Some(max)) => CoefficientLaw::LogUniform { min, max },
        (scale, _, _) => CoefficientLaw::Uniform {
            scale: scale.unwrap_or(1.0),
        },
    };
    let h = synthesize_hamiltonian(a.qubits, a.terms, law, a.seed)?;
    let body = match a.format {
        HamiltonianFormat::Text => h.to_text(),
        HamiltonianFormat::Json => h.to_json()?,
    };
    emit(a.out.as_deref(), &body)
}
