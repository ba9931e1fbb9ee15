//! Simulation of adaptive amplitude-estimation inference on a grid posterior.
//!
//! Each step picks a layer count from the current posterior, draws an outcome
//! from the noisy likelihood at the true phase, and applies an exact Bayes
//! update on the grid. Trials are independent; trial `i` of an ensemble uses
//! stream `i` of a ChaCha generator keyed by the master seed, so results do
//! not depend on scheduling.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::format::sig9;
use crate::likelihood::{amplification, fisher_information, likelihood_noisy, NoiseModel, Outcome, PhasePoint};

/// Evidence below this is treated as numerically impossible data.
pub const MIN_EVIDENCE: f64 = 1e-300;

const FLUSH_BELOW: f64 = 1e-250;

/// Discretized distribution over `θ` on a uniform grid `lo + i·step`.
///
/// Weights are probability masses (trapezoid-weighted densities) and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    lo: f64,
    step: f64,
    weights: Vec<f64>,
    /// Index range outside of which every weight is zero.
    support: Range<usize>,
}

impl GridPosterior {
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::from_density(lo, hi, points, |_| 1.0)
    }

    /// Gaussian density truncated to `[lo, hi]`.
    pub fn gaussian(mean: f64, sd: f64, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(sd > 0.0) {
            return Err(invalid(format!("prior sd must be positive, got {sd}")));
        }
        Self::from_density(lo, hi, points, |t| {
            let z = (t - mean) / sd;
            (-0.5 * z * z).exp()
        })
    }

    fn from_density(lo: f64, hi: f64, points: usize, density: impl Fn(f64) -> f64) -> Result<Self> {
        if points < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        if !(0.0 <= lo && lo < hi && hi <= PI) {
            return Err(invalid(format!("grid window [{lo}, {hi}] not inside [0, pi]")));
        }
        let step = (hi - lo) / (points - 1) as f64;
        let mut weights: Vec<f64> = (0..points)
            .map(|i| {
                let end = i == 0 || i == points - 1;
                density(lo + i as f64 * step) * if end { 0.5 } else { 1.0 }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::EvidenceUnderflow(total));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            lo,
            step,
            support: 0..points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.step
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self) -> f64 {
        self.mean_and_sd().0
    }

    pub fn sd(&self) -> f64 {
        self.mean_and_sd().1
    }

    pub fn mean_and_sd(&self) -> (f64, f64) {
        // offsets from lo keep the variance sum well conditioned
        let start = self.support.start;
        let live = &self.weights[self.support.clone()];
        let mut m1 = 0.0;
        for (i, w) in live.iter().enumerate() {
            m1 += w * i as f64;
        }
        let mut m2 = 0.0;
        for (i, w) in live.iter().enumerate() {
            let dev = i as f64 - m1;
            m2 += w * dev * dev;
        }
        let m1 = m1 + start as f64;
        (self.lo + m1 * self.step, m2.sqrt() * self.step)
    }

    /// Index of the largest weight (first one on ties).
    pub fn mode_index(&self) -> usize {
        let mut best = self.support.start;
        for (i, &w) in self.weights.iter().enumerate().skip(self.support.start) {
            if w > self.weights[best] {
                best = i;
            }
        }
        best
    }

    /// Multiplies by `P(d | θ_i)` and renormalizes. On failure the posterior
    /// is left unchanged.
    pub fn update_in_place(&mut self, d: Outcome, layers: u32, noise: &NoiseModel) -> Result<()> {
        let amp = d.sign() * noise.contrast(layers);
        let k = amplification(layers);
        let start = self.support.start;
        let mut updated = self.weights[self.support.clone()].to_vec();
        let evidence = weigh(&mut updated, self.node(start), self.step, k, amp);
        if !(evidence >= MIN_EVIDENCE) || !evidence.is_finite() {
            return Err(Error::EvidenceUnderflow(evidence));
        }
        let inv = 1.0 / evidence;
        for w in updated.iter_mut() {
            *w *= inv;
            // keep negligible tails out of the slow subnormal range
            if *w < FLUSH_BELOW {
                *w = 0.0;
            }
        }
        let first = updated.iter().position(|&w| w > 0.0).unwrap_or(0);
        let last = updated.iter().rposition(|&w| w > 0.0).map_or(0, |i| i + 1);
        self.weights[self.support.clone()].copy_from_slice(&updated);
        self.support = start + first..start + last.max(first + 1);
        Ok(())
    }
}

/// Multiplies `weights[i]` by `½(1 + amp·cos(k·(θ0 + i·h)))` and returns the
/// new total. The cosines come from a complex rotation by `k·h`, re-anchored
/// every block; several blocks advance together to shorten the dependency
/// chain.
fn weigh(weights: &mut [f64], theta0: f64, h: f64, k: f64, amp: f64) -> f64 {
    const BLOCK: usize = 64;
    const LANES: usize = 4;
    let (rot_s, rot_c) = (k * h).sin_cos();
    let anchor = |i: usize| (k * (theta0 + i as f64 * h)).sin_cos();
    let mut total = [0.0; LANES];
    let mut groups = weights.chunks_exact_mut(BLOCK * LANES);
    let mut base = 0;
    for group in &mut groups {
        let mut s = [0.0; LANES];
        let mut c = [0.0; LANES];
        for j in 0..LANES {
            (s[j], c[j]) = anchor(base + j * BLOCK);
        }
        for i in 0..BLOCK {
            for j in 0..LANES {
                let w = &mut group[j * BLOCK + i];
                *w *= 0.5 * (1.0 + amp * c[j]);
                total[j] += *w;
                let next_c = c[j] * rot_c - s[j] * rot_s;
                s[j] = s[j] * rot_c + c[j] * rot_s;
                c[j] = next_c;
            }
        }
        base += BLOCK * LANES;
    }
    let mut sum: f64 = total.iter().sum();
    for (b, chunk) in groups.into_remainder().chunks_mut(BLOCK).enumerate() {
        let (mut s, mut c) = anchor(base + b * BLOCK);
        for w in chunk.iter_mut() {
            *w *= 0.5 * (1.0 + amp * c);
            sum += *w;
            let next_c = c * rot_c - s * rot_s;
            s = s * rot_c + c * rot_s;
            c = next_c;
        }
    }
    sum
}

/// Returns the posterior after observing `d`; the input is not modified.
pub fn bayes_update(posterior: &GridPosterior, d: Outcome, layers: u32, noise: &NoiseModel) -> Result<GridPosterior> {
    let mut next = posterior.clone();
    next.update_in_place(d, layers, noise)?;
    Ok(next)
}

/// Grid layout for trial posteriors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    /// Half-width of the grid window in prior standard deviations, centered on
    /// the prior mean and clipped to `[0, π]`. `None` spans all of `[0, π]`.
    pub window_sds: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 2001,
            window_sds: None,
        }
    }
}

/// How each shot's layer count is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum LayerPolicy {
    /// Maximize Fisher information per layer cost at the posterior mean over
    /// `0..=cap`, see [`layer_cap`]. `max_layers` optionally lowers the cap.
    FisherPerTime {
        max_layers: Option<u32>,
    },
    Fixed {
        layers: u32,
    },
}

impl Default for LayerPolicy {
    fn default() -> Self {
        LayerPolicy::FisherPerTime { max_layers: None }
    }
}

/// Upper end of the layer search: `min(⌈π/(4σ)⌉, ⌈3/λ⌉)`, where `σ` is the
/// posterior sd floored at the grid spacing.
pub fn layer_cap(posterior_sd: f64, grid_spacing: f64, noise: &NoiseModel) -> u32 {
    let sd = posterior_sd.max(grid_spacing);
    let mut cap = (PI / (4.0 * sd)).ceil();
    if noise.lambda() > 0.0 {
        cap = cap.min((3.0 / noise.lambda()).ceil());
    }
    if cap.is_finite() {
        cap.clamp(0.0, f64::from(u32::MAX)) as u32
    } else {
        u32::MAX
    }
}

/// Chooses the layer count for the next shot. Ties go to the smaller count.
pub fn choose_layer_count(posterior: &GridPosterior, noise: &NoiseModel, policy: &LayerPolicy) -> u32 {
    match *policy {
        LayerPolicy::Fixed { layers } => layers,
        LayerPolicy::FisherPerTime { max_layers } => {
            let (mean, sd) = posterior.mean_and_sd();
            let mut cap = layer_cap(sd, posterior.spacing(), noise);
            if let Some(m) = max_layers {
                cap = cap.min(m);
            }
            best_layers(mean, noise, cap)
        }
    }
}

pub(crate) fn best_layers(theta_hat: f64, noise: &NoiseModel, cap: u32) -> u32 {
    let theta = PhasePoint::new(theta_hat.clamp(0.0, PI)).expect("clamped");
    let mut best = 0;
    let mut best_rate = f64::NEG_INFINITY;
    for l in 0..=cap {
        let rate = fisher_information(theta, noise, l) / amplification(l);
        if rate > best_rate {
            best_rate = rate;
            best = l;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub true_pi: f64,
    pub noise: NoiseModel,
    pub prior_sd: f64,
    pub prior_mean_jitter_sd: f64,
    pub max_steps: usize,
    pub seed: u64,
    /// Random stream within `seed`; ensembles set this to the trial index.
    pub stream: u64,
    pub layer_policy: LayerPolicy,
    pub grid: GridSpec,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            true_pi: 0.0,
            noise: NoiseModel::noiseless(),
            prior_sd: 0.01,
            prior_mean_jitter_sd: 0.01,
            max_steps: 100,
            seed: 0,
            stream: 0,
            layer_policy: LayerPolicy::default(),
            grid: GridSpec::default(),
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        PhasePoint::from_expectation(self.true_pi)?;
        if !(self.prior_sd > 0.0 && self.prior_sd.is_finite()) {
            return Err(invalid("prior_sd must be positive"));
        }
        if !(self.prior_mean_jitter_sd > 0.0 && self.prior_mean_jitter_sd.is_finite()) {
            return Err(invalid("prior_mean_jitter_sd must be positive"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps must be at least 1"));
        }
        if self.grid.points < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        if let Some(w) = self.grid.window_sds {
            if !(w > 0.0) {
                return Err(invalid("grid window must be positive"));
            }
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Gaussian prior with sd `prior_sd` centered at `true_theta` plus a
/// `N(0, jitter²)` offset, truncated to the grid window.
pub fn init_prior<R: Rng>(true_theta: PhasePoint, config: &TrialConfig, rng: &mut R) -> Result<GridPosterior> {
    config.validate()?;
    let jitter = Normal::new(0.0, config.prior_mean_jitter_sd).map_err(|e| invalid(e.to_string()))?;
    let mean = true_theta.theta() + jitter.sample(rng);
    let (lo, hi) = match config.grid.window_sds {
        None => (0.0, PI),
        Some(w) => {
            let center = mean.clamp(0.0, PI);
            let half = w * config.prior_sd;
            // shifted rather than clipped at a boundary, so the width is kept
            let lo = (center - half).clamp(0.0, (PI - 2.0 * half).max(0.0));
            (lo, (lo + 2.0 * half).min(PI))
        }
    };
    GridPosterior::gaussian(mean, config.prior_sd, lo, hi, config.grid.points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub layers: u32,
    pub outcome: u8,
    pub cum_layers: u64,
    pub theta_hat: f64,
    pub sd: f64,
    pub pi_hat: f64,
    pub sq_err_pi: f64,
    pub sq_err_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub true_pi: f64,
    pub steps: Vec<TraceStep>,
}

pub const TRACE_CSV_HEADER: &str = "step,L,d,cum_layers,theta_hat,sd,pi_hat,sq_err_pi,sq_err_theta";

impl TrialTrace {
    pub fn final_step(&self) -> Option<&TraceStep> {
        self.steps.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.steps.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.step,
                s.layers,
                s.outcome,
                s.cum_layers,
                sig9(s.theta_hat),
                sig9(s.sd),
                sig9(s.pi_hat),
                sig9(s.sq_err_pi),
                sig9(s.sq_err_theta)
            ));
        }
        out
    }
}

/// Runs one adaptive estimation trial.
pub fn run_trial(config: &TrialConfig) -> Result<TrialTrace> {
    config.validate()?;
    let truth = PhasePoint::from_expectation(config.true_pi)?;
    let mut rng = config.rng();
    let mut posterior = init_prior(truth, config, &mut rng)?;
    let mut cum_layers: u64 = 0;
    let mut steps = Vec::with_capacity(config.max_steps);
    for step in 1..=config.max_steps {
        let layers = choose_layer_count(&posterior, &config.noise, &config.layer_policy);
        let p0 = likelihood_noisy(Outcome::Zero, truth, &config.noise, layers);
        let d = if rng.random::<f64>() < p0 {
            Outcome::Zero
        } else {
            Outcome::One
        };
        posterior.update_in_place(d, layers, &config.noise)?;
        cum_layers += 2 * u64::from(layers) + 1;
        let (theta_hat, sd) = posterior.mean_and_sd();
        let pi_hat = theta_hat.cos();
        steps.push(TraceStep {
            step,
            layers,
            outcome: d.bit(),
            cum_layers,
            theta_hat,
            sd,
            pi_hat,
            sq_err_pi: (pi_hat - config.true_pi).powi(2),
            sq_err_theta: (theta_hat - truth.theta()).powi(2),
        });
    }
    Ok(TrialTrace {
        true_pi: config.true_pi,
        steps,
    })
}

/// Runs `trials` independent trials; trial `i` uses random stream `i`.
pub fn run_ensemble(config: &TrialConfig, trials: usize) -> Result<Vec<TrialTrace>> {
    if trials == 0 {
        return Err(Error::Empty("ensemble needs at least one trial"));
    }
    config.validate()?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut cfg = config.clone();
            cfg.stream = i;
            run_trial(&cfg)
        })
        .collect()
}

/// Trimmed statistics across an ensemble at one step index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePoint {
    pub step: usize,
    /// Mean cumulative layer cost over the trials retained in Π space.
    pub mean_layers: f64,
    pub trimmed_mse_pi: f64,
    pub trimmed_mse_theta: f64,
}

pub const ENSEMBLE_CSV_HEADER: &str = "step,cum_layers,trimmed_mse_pi,trimmed_mse_theta,trim_fraction";

pub fn ensemble_csv(points: &[EnsemblePoint], trim_fraction: f64) -> String {
    let mut out = String::from(ENSEMBLE_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.step,
            sig9(p.mean_layers),
            sig9(p.trimmed_mse_pi),
            sig9(p.trimmed_mse_theta),
            sig9(trim_fraction)
        ));
    }
    out
}

/// Number of trials dropped from each end-of-step average.
pub fn trimmed_count(n: usize, trim_fraction: f64) -> usize {
    let drop = (trim_fraction * n as f64 - 1e-9).ceil().max(0.0) as usize;
    drop.min(n.saturating_sub(1))
}

/// At every step, drops the `⌈trim·n⌉` largest squared errors and averages the
/// rest. Layer costs are averaged over the trials kept in Π space.
pub fn ensemble_stats(traces: &[TrialTrace], trim_fraction: f64) -> Result<Vec<EnsemblePoint>> {
    if traces.is_empty() {
        return Err(Error::Empty("ensemble has no traces"));
    }
    if !(0.0..1.0).contains(&trim_fraction) {
        return Err(invalid(format!("trim fraction {trim_fraction} not in [0, 1)")));
    }
    let len = traces[0].steps.len();
    if traces.iter().any(|t| t.steps.len() != len) {
        return Err(invalid("traces have different lengths"));
    }
    let n = traces.len();
    let keep = n - trimmed_count(n, trim_fraction);
    let mut out = Vec::with_capacity(len);
    let mut by_pi: Vec<(f64, u64)> = Vec::with_capacity(n);
    let mut theta_errs: Vec<f64> = Vec::with_capacity(n);
    for k in 0..len {
        by_pi.clear();
        theta_errs.clear();
        for t in traces {
            let s = &t.steps[k];
            by_pi.push((s.sq_err_pi, s.cum_layers));
            theta_errs.push(s.sq_err_theta);
        }
        by_pi.sort_by(|a, b| a.0.total_cmp(&b.0));
        theta_errs.sort_by(f64::total_cmp);
        let kept = &by_pi[..keep];
        out.push(EnsemblePoint {
            step: traces[0].steps[k].step,
            mean_layers: kept.iter().map(|&(_, l)| l as f64).sum::<f64>() / keep as f64,
            trimmed_mse_pi: kept.iter().map(|&(e, _)| e).sum::<f64>() / keep as f64,
            trimmed_mse_theta: theta_errs[..keep].iter().sum::<f64>() / keep as f64,
        });
    }
    Ok(out)
}
