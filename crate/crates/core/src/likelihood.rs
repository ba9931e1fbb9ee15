//! Outcome likelihoods of the amplified measurement circuit and their Fisher
//! information.
//!
//! A circuit with `L` layers measures `P` after preparing the ansatz state and
//! applying `L` iterates of `A R0 A† P`. The outcome `d` then follows the
//! Chebyshev likelihood `½(1 + (-1)^d cos((2L+1)θ))`, attenuated under the
//! exponential-decay noise model by the contrast `p̄·e^{-λL}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Phase angle `θ = arccos Π` in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhasePoint(f64);

impl PhasePoint {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(invalid(format!("phase {theta} outside [0, pi]")));
        }
        Ok(Self(theta))
    }

    pub fn from_expectation(pi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&pi) {
            return Err(invalid(format!("expectation value {pi} outside [-1, 1]")));
        }
        Ok(Self(pi.acos()))
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    pub fn expectation(self) -> f64 {
        self.0.cos()
    }
}

/// Measurement outcome bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    /// `(-1)^d`
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Zero => 1.0,
            Outcome::One => -1.0,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Zero => Outcome::One,
            Outcome::One => Outcome::Zero,
        }
    }
}

/// Exponential-decay noise model: per-layer decay `λ` and the
/// preparation/measurement factor `p̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    lambda: f64,
    p_bar: f64,
}

impl NoiseModel {
    pub fn new(lambda: f64, p_bar: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(invalid(format!("decay lambda must be >= 0, got {lambda}")));
        }
        if !(p_bar > 0.0 && p_bar <= 1.0) {
            return Err(invalid(format!("p_bar must lie in (0, 1], got {p_bar}")));
        }
        Ok(Self { lambda, p_bar })
    }

    pub fn noiseless() -> Self {
        Self {
            lambda: 0.0,
            p_bar: 1.0,
        }
    }

    /// Builds the model from the layer fidelity `e^{-λ}`, which must lie in `(0, 1]`.
    pub fn from_layer_fidelity(fidelity: f64, p_bar: f64) -> Result<Self> {
        if !(fidelity > 0.0 && fidelity <= 1.0) {
            return Err(invalid(format!("layer fidelity must lie in (0, 1], got {fidelity}")));
        }
        Self::new(-fidelity.ln(), p_bar)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p_bar(&self) -> f64 {
        self.p_bar
    }

    pub fn layer_fidelity(&self) -> f64 {
        (-self.lambda).exp()
    }

    /// Signal contrast `p̄·e^{-λL}` after `layers` iterates.
    pub fn contrast(&self, layers: u32) -> f64 {
        if self.lambda == 0.0 || layers == 0 {
            self.p_bar
        } else {
            self.p_bar * (-self.lambda * f64::from(layers)).exp()
        }
    }

    /// `1 - contrast²`, computed without cancellation for small decay.
    fn contrast_deficit(&self, layers: u32) -> f64 {
        let decay = if layers == 0 {
            0.0
        } else {
            self.lambda * f64::from(layers)
        };
        let log_c = self.p_bar.ln() - decay;
        -(2.0 * log_c).exp_m1()
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

/// Amplification factor `2L+1`, which is also the per-shot cost in layer units.
#[inline]
pub fn amplification(layers: u32) -> f64 {
    2.0 * f64::from(layers) + 1.0
}

pub fn likelihood_noiseless(d: Outcome, theta: PhasePoint, layers: u32) -> f64 {
    likelihood_raw(d, theta.0, 1.0, layers)
}

pub fn likelihood_noisy(d: Outcome, theta: PhasePoint, noise: &NoiseModel, layers: u32) -> f64 {
    likelihood_raw(d, theta.0, noise.contrast(layers), layers)
}

#[inline]
pub(crate) fn likelihood_raw(d: Outcome, theta: f64, contrast: f64, layers: u32) -> f64 {
    0.5 * (1.0 + d.sign() * contrast * (amplification(layers) * theta).cos())
}

/// Fisher information of one shot about `θ`:
///
/// `I = (2L+1)² c² sin²((2L+1)θ) / (1 − c² cos²((2L+1)θ))` with `c = p̄e^{-λL}`.
///
/// Returns 0 when both numerator and denominator vanish.
pub fn fisher_information(theta: PhasePoint, noise: &NoiseModel, layers: u32) -> f64 {
    let k = amplification(layers);
    let c = noise.contrast(layers);
    let s = (k * theta.0).sin();
    let c2s2 = c * c * s * s;
    // 1 - c²cos² = (1 - c²) + c²sin²
    let denom = noise.contrast_deficit(layers) + c2s2;
    if denom <= 0.0 {
        return 0.0;
    }
    k * k * c2s2 / denom
}
