use proptest::prelude::*;
use rae_core::{fisher_information, likelihood_noisy, NoiseModel, Outcome, PhasePoint};

fn five_point(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// `Σ_d (∂θ P_d)² / P_d` with `P_d` from the library.
fn fisher_oracle(theta: f64, noise: &NoiseModel, layers: u32) -> f64 {
    let h = 1e-3 / (2.0 * f64::from(layers) + 1.0);
    [Outcome::Zero, Outcome::One]
        .into_iter()
        .map(|d| {
            let p = |t: f64| likelihood_noisy(d, PhasePoint::new(t).unwrap(), noise, layers);
            five_point(p, theta, h).powi(2) / p(theta)
        })
        .sum()
}

/// Same score oracle written on the signal `s = P_0 − P_1`, so that a
/// vanishing contrast does not round `P_d` to exactly ½:
/// `Σ_d (∂P_d)²/P_d = (∂s)²/(1 − s²)`.
fn fisher_signal_oracle(theta: f64, lambda: f64, p_bar: f64, layers: u32) -> f64 {
    let k = 2.0 * f64::from(layers) + 1.0;
    let signal = |t: f64| p_bar * (-lambda * f64::from(layers)).exp() * (k * t).cos();
    let ds = five_point(signal, theta, 1e-3 / k);
    ds * ds / (1.0 - signal(theta).powi(2))
}

fn grid() -> impl Iterator<Item = (f64, f64, u32)> {
    let thetas: Vec<f64> = (0..10).map(|i| 0.05 + 0.3031 * f64::from(i)).collect();
    let lambdas = [0.0, 1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.3, 0.5, 1.0, 2.0];
    let layers = [0u32, 1, 2, 3, 5, 8, 13, 21, 34, 55];
    thetas.into_iter().flat_map(move |t| {
        lambdas
            .into_iter()
            .flat_map(move |l| layers.into_iter().map(move |n| (t, l, n)))
    })
}

#[test]
fn fisher_matches_finite_difference_on_grid() {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (theta, lambda, layers) in grid() {
        let noise = NoiseModel::new(lambda, 1.0).unwrap();
        let exact = fisher_information(PhasePoint::new(theta).unwrap(), &noise, layers);
        let oracle = fisher_signal_oracle(theta, lambda, 1.0, layers);
        let t = PhasePoint::new(theta).unwrap();
        let gap =
            likelihood_noisy(Outcome::Zero, t, &noise, layers) - likelihood_noisy(Outcome::One, t, &noise, layers);
        let s = (-lambda * f64::from(layers)).exp() * ((2.0 * f64::from(layers) + 1.0) * theta).cos();
        assert!((gap - s).abs() < 1e-15);
        worst = worst.max((exact - oracle).abs() / oracle);
        count += 1;
    }
    assert_eq!(count, 1000);
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn fisher_with_spam_contrast() {
    let noise = NoiseModel::new(0.01, 0.9).unwrap();
    let theta = std::f64::consts::FRAC_PI_4;
    let exact = fisher_information(PhasePoint::new(theta).unwrap(), &noise, 10);
    for oracle in [
        fisher_oracle(theta, &noise, 10),
        fisher_signal_oracle(theta, 0.01, 0.9, 10),
    ] {
        assert!((exact - oracle).abs() / oracle < 1e-6, "{exact} vs {oracle}");
    }
}

proptest! {
    #[test]
    fn fisher_never_exceeds_noiseless_bound(theta in 0.01f64..3.13, lambda in 0.0f64..3.0, p_bar in 0.1f64..=1.0, layers in 0u32..200) {
        let noise = NoiseModel::new(lambda, p_bar).unwrap();
        let i = fisher_information(PhasePoint::new(theta).unwrap(), &noise, layers);
        let bound = (2.0 * f64::from(layers) + 1.0).powi(2);
        prop_assert!(i >= 0.0);
        prop_assert!(i <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn outcome_probabilities_sum_to_one(theta in 0.0f64..=std::f64::consts::PI, lambda in 0.0f64..5.0, p_bar in 0.0f64..=1.0, layers in 0u32..1000) {
        let noise = NoiseModel::new(lambda, p_bar).unwrap();
        let t = PhasePoint::new(theta).unwrap();
        let p0 = likelihood_noisy(Outcome::Zero, t, &noise, layers);
        let p1 = likelihood_noisy(Outcome::One, t, &noise, layers);
        prop_assert!((0.0..=1.0).contains(&p0) && (0.0..=1.0).contains(&p1));
        prop_assert!((p0 + p1 - 1.0).abs() <= 1e-15);
    }
}
