//! Checks the closed-form layer-count model against simulated adaptive
//! estimation ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::format::sig9;
use crate::inference::{
    best_layers, ensemble_stats, layer_cap, run_ensemble, EnsemblePoint, GridSpec, LayerPolicy, TrialConfig,
};
use crate::likelihood::{amplification, NoiseModel, PhasePoint};
use crate::runtime_model::runtime_model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationConfig {
    pub pis: Vec<f64>,
    pub layer_fidelities: Vec<f64>,
    pub trials: usize,
    pub prior_sd: f64,
    pub p_bar: f64,
    pub trim_fraction: f64,
    pub seed: u64,
    pub grid: GridSpec,
    /// Accuracy targets as fractions of the prior's standard deviation in Π.
    pub target_fractions: Vec<f64>,
    /// Step budget; derived from the model cost of the tightest target when unset.
    pub max_steps: Option<usize>,
    /// Multiple of the expected step count used as the first budget when
    /// `max_steps` is unset.
    pub budget_factor: f64,
    /// Accepted range of simulated over modeled cost.
    pub ratio_bounds: (f64, f64),
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            pis: vec![0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9],
            layer_fidelities: vec![0.9, 0.99, 0.999],
            trials: 50,
            prior_sd: 0.01,
            p_bar: 1.0,
            trim_fraction: 0.1,
            seed: 0,
            grid: GridSpec {
                points: 2001,
                window_sds: Some(10.0),
            },
            target_fractions: vec![1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0],
            max_steps: None,
            budget_factor: 1.0,
            ratio_bounds: (0.25, 4.0),
        }
    }
}

impl ValidationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pis.is_empty() || self.layer_fidelities.is_empty() || self.target_fractions.is_empty() {
            return Err(invalid("validation grid must be non-empty"));
        }
        for &pi in &self.pis {
            if !(pi > -1.0 && pi < 1.0) {
                return Err(invalid(format!("Π must lie strictly inside (-1, 1), got {pi}")));
            }
        }
        for &f in &self.layer_fidelities {
            NoiseModel::from_layer_fidelity(f, self.p_bar)?;
        }
        if self.target_fractions.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(invalid("target fractions must lie in (0, 1]"));
        }
        if self.trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        if !(self.budget_factor > 0.0) {
            return Err(invalid("budget factor must be positive"));
        }
        if !(self.ratio_bounds.0 > 0.0 && self.ratio_bounds.0 < self.ratio_bounds.1) {
            return Err(invalid("ratio bounds must satisfy 0 < lower < upper"));
        }
        self.trial_config(
            self.pis[0],
            NoiseModel::from_layer_fidelity(self.layer_fidelities[0], self.p_bar)?,
            1,
        )
        .validate()
    }

    fn trial_config(&self, pi: f64, noise: NoiseModel, max_steps: usize) -> TrialConfig {
        TrialConfig {
            true_pi: pi,
            noise,
            prior_sd: self.prior_sd,
            prior_mean_jitter_sd: self.prior_sd,
            max_steps,
            seed: self.seed,
            stream: 0,
            layer_policy: LayerPolicy::default(),
            grid: self.grid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub pi: f64,
    pub layer_fidelity: f64,
    pub epsilon: f64,
    /// Mean layer cost at which the trimmed Π MSE first reaches `ε²`. When
    /// the budget runs out first this is the final cost, a lower bound.
    pub simulated_layers: f64,
    pub model_layers: f64,
    pub ratio: f64,
    pub reached: bool,
}

impl ValidationRow {
    pub fn reached(&self) -> bool {
        self.reached
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingResult {
    pub pi: f64,
    pub layer_fidelity: f64,
    pub max_steps: usize,
    pub rows: Vec<ValidationRow>,
    pub within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub settings: Vec<SettingResult>,
}

impl ValidationReport {
    pub fn rows(&self) -> impl Iterator<Item = &ValidationRow> {
        self.settings.iter().flat_map(|s| s.rows.iter())
    }

    pub fn fraction_within_bounds(&self) -> f64 {
        let ok = self.settings.iter().filter(|s| s.within_bounds).count();
        ok as f64 / self.settings.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(VALIDATION_CSV_HEADER);
        out.push('\n');
        for r in self.rows() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                sig9(r.pi),
                sig9(r.layer_fidelity),
                sig9(r.epsilon),
                sig9(r.simulated_layers),
                sig9(r.model_layers),
                sig9(r.ratio),
                r.reached()
            ));
        }
        out
    }
}

/// Largest step budget tried when doubling.
pub const MAX_STEP_BUDGET: usize = 1 << 20;

pub const VALIDATION_CSV_HEADER: &str = "pi,layer_fidelity,epsilon,simulated_layers,model_layers,ratio,reached";

/// Accuracy targets in Π for one setting.
pub fn targets(pi: f64, config: &ValidationConfig) -> Vec<f64> {
    let sin = (1.0 - pi * pi).sqrt();
    config
        .target_fractions
        .iter()
        .map(|f| f * config.prior_sd * sin)
        .collect()
}

/// First step budget: the modeled layer cost of the tightest target divided
/// by the per-shot cost at the Fisher-optimal layer count, times
/// `budget_factor`.
pub fn default_step_budget(pi: f64, noise: &NoiseModel, tightest: f64, config: &ValidationConfig) -> Result<usize> {
    let theta = PhasePoint::from_expectation(pi)?.theta();
    let sd_theta = tightest / theta.sin();
    let cap = layer_cap(sd_theta, 0.0, noise);
    let per_shot = amplification(best_layers(theta, noise, cap));
    let layers = runtime_model(tightest, noise)?;
    Ok(((config.budget_factor * layers / per_shot).ceil() as usize).max(100))
}

/// Mean layer cost where the trimmed Π MSE first drops to `target²`,
/// interpolating log-linearly between steps.
pub fn layers_to_reach(curve: &[EnsemblePoint], target: f64) -> Option<f64> {
    let goal = target * target;
    let k = curve.iter().position(|p| p.trimmed_mse_pi <= goal)?;
    if k == 0 {
        return Some(curve[0].mean_layers);
    }
    let (a, b) = (&curve[k - 1], &curve[k]);
    let (la, lb) = (a.mean_layers.ln(), b.mean_layers.ln());
    let (ea, eb) = (a.trimmed_mse_pi.ln(), b.trimmed_mse_pi.ln());
    let t = if ea > eb && eb.is_finite() {
        (ea - goal.ln()) / (ea - eb)
    } else {
        1.0
    };
    Some((la + t.clamp(0.0, 1.0) * (lb - la)).exp())
}

pub fn validate_setting(pi: f64, fidelity: f64, config: &ValidationConfig) -> Result<SettingResult> {
    let noise = NoiseModel::from_layer_fidelity(fidelity, config.p_bar)?;
    let eps = targets(pi, config);
    let tightest = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let (lo, hi) = config.ratio_bounds;
    // Budgets double until every target is reached or the cost passes the
    // upper ratio bound. Trials are prefix-stable in the step count, so a
    // longer run extends the shorter one.
    let layer_ceiling = hi * runtime_model(tightest, &noise)?;
    let mut max_steps = match config.max_steps {
        Some(s) => s,
        None => default_step_budget(pi, &noise, tightest, config)?,
    };
    let curve = loop {
        let traces = run_ensemble(&config.trial_config(pi, noise, max_steps), config.trials)?;
        let curve = ensemble_stats(&traces, config.trim_fraction)?;
        let done = config.max_steps.is_some()
            || layers_to_reach(&curve, tightest).is_some()
            || curve.last().is_none_or(|p| p.mean_layers >= layer_ceiling)
            || max_steps >= MAX_STEP_BUDGET;
        if done {
            break curve;
        }
        max_steps = (2 * max_steps).min(MAX_STEP_BUDGET);
    };
    let mut rows = Vec::with_capacity(eps.len());
    for epsilon in eps {
        let model_layers = runtime_model(epsilon, &noise)?;
        let hit = layers_to_reach(&curve, epsilon);
        let simulated_layers = hit.unwrap_or_else(|| curve.last().map_or(0.0, |p| p.mean_layers));
        rows.push(ValidationRow {
            pi,
            layer_fidelity: fidelity,
            epsilon,
            simulated_layers,
            model_layers,
            ratio: simulated_layers / model_layers,
            reached: hit.is_some(),
        });
    }
    let within_bounds = rows.iter().all(|r| r.reached() && r.ratio >= lo && r.ratio <= hi);
    Ok(SettingResult {
        pi,
        layer_fidelity: fidelity,
        max_steps,
        rows,
        within_bounds,
    })
}

/// Runs every (fidelity, Π) setting in order.
pub fn validate_model(config: &ValidationConfig) -> Result<ValidationReport> {
    config.validate()?;
    let mut settings = Vec::with_capacity(config.pis.len() * config.layer_fidelities.len());
    for &f in &config.layer_fidelities {
        for &pi in &config.pis {
            settings.push(validate_setting(pi, f, config)?);
        }
    }
    Ok(ValidationReport { settings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, f64)]) -> Vec<EnsemblePoint> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(l, e))| EnsemblePoint {
                step: i + 1,
                mean_layers: l,
                trimmed_mse_pi: e,
                trimmed_mse_theta: e,
            })
            .collect()
    }

    #[test]
    fn crossing_interpolates_in_logs() {
        let c = curve(&[(10.0, 1e-2), (100.0, 1e-4), (1000.0, 1e-6)]);
        let l = layers_to_reach(&c, 10f64.powf(-1.5)).unwrap();
        approx::assert_relative_eq!(l, 10f64.powf(1.5), max_relative = 1e-12);
        assert_eq!(layers_to_reach(&c, 1.0).unwrap(), 10.0);
        approx::assert_relative_eq!(layers_to_reach(&c, 1e-3).unwrap(), 1000.0, max_relative = 1e-12);
        assert!(layers_to_reach(&c, 1e-4).is_none());
    }

    #[test]
    fn targets_scale_with_slope() {
        let cfg = ValidationConfig::default();
        let t0 = targets(0.0, &cfg);
        let t9 = targets(0.9, &cfg);
        assert_eq!(t0.len(), 3);
        approx::assert_relative_eq!(t0[0], 0.005, max_relative = 1e-12);
        approx::assert_relative_eq!(t9[0] / t0[0], (1.0f64 - 0.81).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn small_setting_runs() {
        let cfg = ValidationConfig {
            pis: vec![0.3],
            layer_fidelities: vec![0.99],
            trials: 8,
            max_steps: Some(200),
            ..ValidationConfig::default()
        };
        let report = validate_model(&cfg).unwrap();
        assert_eq!(report.settings.len(), 1);
        assert_eq!(report.to_csv().lines().count(), 4);
        for r in report.rows() {
            assert!(r.model_layers > 0.0);
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let bad = ValidationConfig {
            pis: vec![1.0],
            ..ValidationConfig::default()
        };
        assert!(validate_model(&bad).is_err());
        let bad = ValidationConfig {
            layer_fidelities: vec![1.5],
            ..ValidationConfig::default()
        };
        assert!(validate_model(&bad).is_err());
    }
}
