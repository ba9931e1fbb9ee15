//! Closed-form runtime model for noisy amplitude estimation and the optimal
//! split of an energy accuracy target across Pauli terms.
//!
//! The single-term model counts queried layers needed to reach RMSE `ε`:
//!
//! `t_ε = e²/(e−1) · e^{−λ}/(2p̄²) · [λ/ε² + 1/(√2ε) + √((λ/ε²)² + (2√2/ε)²)]`
//!
//! It interpolates between shot-noise `1/ε²` scaling (large `λ/ε`) and
//! Heisenberg `1/ε` scaling (`λ = 0`).

use std::f64::consts::{E, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::format::sig9;
use crate::hamiltonian::PauliHamiltonian;
use crate::likelihood::NoiseModel;

/// `e²/(e−1)`
pub fn model_prefactor() -> f64 {
    E * E / (E - 1.0)
}

/// `α = ½(√(1/2) + √8)`
pub fn heisenberg_weight() -> f64 {
    0.5 * ((0.5f64).sqrt() + 8f64.sqrt())
}

/// Bracketed sum shared by the single-term and per-term models.
fn bracket(epsilon: f64, lambda: f64) -> f64 {
    let shot = lambda / (epsilon * epsilon);
    let heis = 2.0 * SQRT_2 / epsilon;
    shot + 1.0 / (SQRT_2 * epsilon) + shot.hypot(heis)
}

/// Queried layers needed to reach RMSE `epsilon` in `Π`.
pub fn runtime_model(epsilon: f64, noise: &NoiseModel) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("target RMSE must be positive, got {epsilon}")));
    }
    let lambda = noise.lambda();
    let p2 = noise.p_bar() * noise.p_bar();
    Ok(model_prefactor() * (-lambda).exp() / (2.0 * p2) * bracket(epsilon, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeModelParams {
    pub lambda: f64,
    pub p_bar: f64,
    /// Time weight per unit of the bracketed sum.
    pub omega: f64,
}

impl RuntimeModelParams {
    pub fn new(lambda: f64, p_bar: f64, omega: f64) -> Result<Self> {
        NoiseModel::new(lambda, p_bar)?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { lambda, p_bar, omega })
    }

    /// Calibrates `ω = τ_l · e²/(e−1) · e^{−λ}/p̄²` so that
    /// [`per_term_runtime`] equals `τ_l ·` [`runtime_model`].
    pub fn calibrated(noise: &NoiseModel, layer_time: f64) -> Result<Self> {
        let omega = layer_time * model_prefactor() * (-noise.lambda()).exp() / (noise.p_bar() * noise.p_bar());
        Self::new(noise.lambda(), noise.p_bar(), omega)
    }

    /// Calibration with `τ_l = 1`: runtimes come out in layers.
    pub fn in_layers(noise: &NoiseModel) -> Result<Self> {
        Self::calibrated(noise, 1.0)
    }
}

/// `T_i = (ω/2)[λ/ε_i² + 1/(√2ε_i) + √((λ/ε_i²)² + (√8/ε_i)²)]`
pub fn per_term_runtime(epsilon_i: f64, params: &RuntimeModelParams) -> f64 {
    0.5 * params.omega * bracket(epsilon_i, params.lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermAllocation {
    /// Index into the Hamiltonian's term list.
    pub term_index: usize,
    pub mu: f64,
    pub epsilon: f64,
    pub runtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub terms: Vec<TermAllocation>,
    /// Lagrange multiplier `Λ = x⁶` of the accuracy constraint.
    pub multiplier: f64,
    /// Sum of per-term runtimes.
    pub total_runtime: f64,
    /// Largest per-term runtime (all terms estimated concurrently).
    pub parallel_runtime: f64,
}

impl AllocationResult {
    /// `Σ μ_i² ε_i²`
    pub fn achieved_mse(&self) -> f64 {
        self.terms.iter().map(|t| (t.mu * t.epsilon).powi(2)).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("term_index,mu,epsilon_i,T_i_seconds\n");
        for t in &self.terms {
            out.push_str(&format!(
                "{},{},{},{}\n",
                t.term_index,
                sig9(t.mu),
                sig9(t.epsilon),
                sig9(t.runtime)
            ));
        }
        out.push_str(&format!("Lambda,{},,\n", sig9(self.multiplier)));
        out.push_str(&format!("T_star,{},,\n", sig9(self.total_runtime)));
        out.push_str(&format!("T_parallel,{},,\n", sig9(self.parallel_runtime)));
        out
    }
}

/// Positive root of `ε̄²x⁴ = Bx + C` by bisection.
///
/// The left side is convex and increasing on `x > 0` and starts below the
/// affine right side (since `C > 0`), so there is exactly one crossing.
pub fn solve_multiplier_root(target_mse: f64, linear: f64, constant: f64) -> f64 {
    let f = |x: f64| target_mse * x.powi(4) - linear * x - constant;
    let mut lo = 0.0;
    let mut hi = (constant / target_mse)
        .powf(0.25)
        .max((linear / target_mse).cbrt())
        .max(f64::MIN_POSITIVE);
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_coefficients(mu: &[f64], target_rmse: f64) -> Result<()> {
    if !(target_rmse > 0.0 && target_rmse.is_finite()) {
        return Err(invalid(format!("target RMSE must be positive, got {target_rmse}")));
    }
    if mu.is_empty() {
        return Err(Error::NoNonIdentityTerms);
    }
    if mu.iter().any(|m| !m.is_finite()) {
        return Err(invalid("coefficients must be finite"));
    }
    if mu.iter().all(|&m| m == 0.0) {
        return Err(invalid("coefficient one-norm is zero"));
    }
    if mu.contains(&0.0) {
        return Err(invalid("zero coefficients need no estimation; drop them first"));
    }
    Ok(())
}

/// Allocates per-term accuracies for coefficients `mu`.
///
/// Stationarity of `Σ T_i + Λ'(Σ μ_i²ε_i² − ε̄²)` with the square root bounded
/// by the sum of its legs gives `ε_i⁴ = a_i ε_i + b_i`, with
/// `a_i = α/(Λμ_i²)`, `b_i = 2λ/(Λμ_i²)` and `Λ = 2Λ'/ω`. Approximating
/// the root by `ε_i² ≈ b_i^{1/2} + a_i^{2/3}` and enforcing the constraint
/// yields a quartic in `x = Λ^{1/6}`, solved numerically.
pub fn allocate_coefficients(mu: &[f64], target_rmse: f64, params: &RuntimeModelParams) -> Result<AllocationResult> {
    check_coefficients(mu, target_rmse)?;
    let target_mse = target_rmse * target_rmse;
    let shot = (2.0 * params.lambda).sqrt();
    let heis = heisenberg_weight().powf(2.0 / 3.0);
    let sum_abs: f64 = mu.iter().map(|m| m.abs()).sum();
    let sum_23: f64 = mu.iter().map(|m| m.abs().powf(2.0 / 3.0)).sum();
    let x = solve_multiplier_root(target_mse, shot * sum_abs, heis * sum_23);
    let (x3, x4) = (x.powi(3), x.powi(4));
    let mut eps2: Vec<f64> = mu
        .iter()
        .map(|m| {
            let a = m.abs();
            shot / (x3 * a) + heis / (x4 * a.powf(4.0 / 3.0))
        })
        .collect();
    let achieved: f64 = mu.iter().zip(&eps2).map(|(m, e)| m * m * e).sum();
    let scale = target_mse / achieved;
    eps2.iter_mut().for_each(|e| *e *= scale);

    let terms: Vec<TermAllocation> = mu
        .iter()
        .zip(&eps2)
        .enumerate()
        .map(|(i, (&m, &e2))| {
            let epsilon = e2.sqrt();
            TermAllocation {
                term_index: i,
                mu: m,
                epsilon,
                runtime: per_term_runtime(epsilon, params),
            }
        })
        .collect();
    Ok(summarize(terms, x.powi(6)))
}

fn summarize(terms: Vec<TermAllocation>, multiplier: f64) -> AllocationResult {
    let total_runtime = terms.iter().map(|t| t.runtime).sum();
    let parallel_runtime = terms.iter().map(|t| t.runtime).fold(0.0, f64::max);
    AllocationResult {
        terms,
        multiplier,
        total_runtime,
        parallel_runtime,
    }
}

/// Optimal allocation over the non-identity terms of `h`.
pub fn allocate(h: &PauliHamiltonian, target_rmse: f64, params: &RuntimeModelParams) -> Result<AllocationResult> {
    let measured: Vec<(usize, f64)> = h.measured_terms().map(|(i, t)| (i, t.coefficient)).collect();
    let mu: Vec<f64> = measured.iter().map(|&(_, m)| m).collect();
    let mut result = allocate_coefficients(&mu, target_rmse, params)?;
    for (t, &(idx, _)) in result.terms.iter_mut().zip(&measured) {
        t.term_index = idx;
    }
    Ok(result)
}

/// Runtime when every term gets the same accuracy `ε_i² = ε̄²/Σμ_j²`.
pub fn uniform_allocation_coefficients(mu: &[f64], target_rmse: f64, params: &RuntimeModelParams) -> Result<f64> {
    check_coefficients(mu, target_rmse)?;
    let sum_sq: f64 = mu.iter().map(|m| m * m).sum();
    let epsilon = target_rmse / sum_sq.sqrt();
    Ok(mu.len() as f64 * per_term_runtime(epsilon, params))
}

pub fn uniform_allocation_runtime(h: &PauliHamiltonian, target_rmse: f64, params: &RuntimeModelParams) -> Result<f64> {
    uniform_allocation_coefficients(&h.measured_coefficients(), target_rmse, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, omega: f64) -> RuntimeModelParams {
        RuntimeModelParams::new(lambda, 1.0, omega).unwrap()
    }

    #[test]
    fn runtime_model_reference_values() {
        // reference values evaluated independently with 30-digit arithmetic
        let t = runtime_model(0.1, &NoiseModel::noiseless()).unwrap();
        assert_relative_eq!(t, 76.018_549_279_650_56, max_relative = 1e-13);
        let t = runtime_model(1e-2, &NoiseModel::new(1e-3, 1.0).unwrap()).unwrap();
        assert_relative_eq!(t, 781.285_083_658_294_5, max_relative = 1e-13);
        assert!(runtime_model(0.0, &NoiseModel::noiseless()).is_err());
    }

    #[test]
    fn runtime_model_limits() {
        let noiseless = NoiseModel::noiseless();
        let heis: Vec<f64> = [1e-3, 1e-5, 1e-7]
            .iter()
            .map(|&e| runtime_model(e, &noiseless).unwrap() * e)
            .collect();
        for w in heis.windows(2) {
            assert_relative_eq!(w[0], w[1], max_relative = 1e-9);
        }
        let noise = NoiseModel::new(1e-2, 0.9).unwrap();
        let limit = model_prefactor() * (-1e-2f64).exp() / 0.81 * 1e-2;
        let eps = 1e-9;
        assert_relative_eq!(
            runtime_model(eps, &noise).unwrap() * eps * eps,
            limit,
            max_relative = 1e-5
        );
    }

    #[test]
    fn per_term_examples() {
        assert_relative_eq!(
            per_term_runtime(1.0, &params(0.0, 2.0)),
            3.535_533_905_932_737_6,
            max_relative = 1e-14
        );
        let noise = NoiseModel::new(3e-4, 0.8).unwrap();
        let tau = 0.37;
        let p = RuntimeModelParams::calibrated(&noise, tau).unwrap();
        for eps in [1e-1, 1e-3, 1e-5] {
            assert_relative_eq!(
                per_term_runtime(eps, &p),
                tau * runtime_model(eps, &noise).unwrap(),
                max_relative = 1e-14
            );
        }
        let mut prev = f64::INFINITY;
        for k in 1..100 {
            let t = per_term_runtime(k as f64 * 1e-3, &params(1e-3, 1.0));
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn single_term_is_constraint_forced() {
        for lambda in [0.0, 1e-4, 1e-1] {
            let r = allocate_coefficients(&[1.0], 0.01, &params(lambda, 3.0)).unwrap();
            assert_relative_eq!(r.terms[0].epsilon, 0.01, max_relative = 1e-12);
            let u = uniform_allocation_coefficients(&[1.0], 0.01, &params(lambda, 3.0)).unwrap();
            assert_relative_eq!(r.total_runtime, u, max_relative = 1e-12);
        }
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let r = allocate_coefficients(&[1.0, 1.0], 0.01, &params(0.0, 1.0)).unwrap();
        for t in &r.terms {
            assert_relative_eq!(t.epsilon, 0.01 / 2f64.sqrt(), max_relative = 1e-12);
        }
        let u = uniform_allocation_coefficients(&[1.0, 1.0], 0.01, &params(0.0, 1.0)).unwrap();
        assert_relative_eq!(r.total_runtime, u, max_relative = 1e-12);
    }

    #[test]
    fn noiseless_closed_form() {
        let mu = [2.0, -0.5, 0.1];
        let r = allocate_coefficients(&mu, 1e-3, &params(0.0, 1.0)).unwrap();
        let s23: f64 = mu.iter().map(|m: &f64| m.abs().powf(2.0 / 3.0)).sum();
        for t in &r.terms {
            let expect = 1e-6 / (s23 * t.mu.abs().powf(4.0 / 3.0));
            assert_relative_eq!(t.epsilon * t.epsilon, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn quartic_residual_is_small() {
        for (mse, b, c) in [
            (1e-6, 0.0, 3.0),
            (1e-6, 14.0, 2.0),
            (1e-2, 1e3, 1e-3),
            (1e-12, 1e-5, 50.0),
        ] {
            let x = solve_multiplier_root(mse, b, c);
            let lhs = mse * x.powi(4);
            assert!(((lhs - b * x - c) / lhs).abs() < 1e-10);
        }
    }

    #[test]
    fn allocation_errors() {
        let p = params(0.0, 1.0);
        assert!(matches!(
            allocate_coefficients(&[], 0.01, &p),
            Err(Error::NoNonIdentityTerms)
        ));
        assert!(allocate_coefficients(&[1.0], 0.0, &p).is_err());
        assert!(allocate_coefficients(&[1.0], -1.0, &p).is_err());
        assert!(allocate_coefficients(&[0.0, 0.0], 0.01, &p).is_err());
        let h = PauliHamiltonian::from_pairs([(1.0, "II")]).unwrap();
        assert!(matches!(allocate(&h, 0.01, &p), Err(Error::NoNonIdentityTerms)));
        assert!(RuntimeModelParams::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn allocate_skips_identity_and_keeps_indices() {
        let h = PauliHamiltonian::from_pairs([(5.0, "II"), (0.5, "ZZ"), (-0.25, "XI"), (-0.25, "IX")]).unwrap();
        let r = allocate(&h, 1e-3, &params(1e-4, 1.0)).unwrap();
        let idx: Vec<usize> = r.terms.iter().map(|t| t.term_index).collect();
        assert_eq!(idx, vec![1, 2, 3]);
        assert_relative_eq!(r.achieved_mse(), 1e-6, max_relative = 1e-12);
        assert!(r.parallel_runtime <= r.total_runtime);
        let csv = r.to_csv();
        assert!(csv.starts_with("term_index,mu,epsilon_i,T_i_seconds\n"));
        assert!(csv.contains("\nT_star,"));
    }
}
