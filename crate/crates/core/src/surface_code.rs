//! Surface-code overhead model.
//!
//! At distance `d` the per-cycle logical error is `10^{−(d+3)/2}`, a logical
//! gate takes `100d` code cycles, and each logical qubit occupies `2d²`
//! physical qubits. The physical gate error (10⁻³) is already built into the
//! per-cycle error formula.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MIN_DISTANCE: u32 = 3;
pub const DEFAULT_MAX_DISTANCE: u32 = 51;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCodeParams {
    /// Seconds per surface-code cycle.
    pub cycle_time: f64,
    pub cycles_per_gate_per_distance: f64,
    /// Physical two-qubit gate error; informational only.
    pub physical_gate_error: f64,
}

impl Default for SurfaceCodeParams {
    fn default() -> Self {
        Self {
            cycle_time: 1e-6,
            cycles_per_gate_per_distance: 100.0,
            physical_gate_error: 1e-3,
        }
    }
}

impl SurfaceCodeParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(self.cycle_time) || !ok(self.cycles_per_gate_per_distance) || !ok(self.physical_gate_error) {
            return Err(invalid(format!("surface-code parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodePoint {
    pub distance: u32,
    /// Logical error per code cycle.
    pub cycle_error: f64,
    /// Logical gate error `1 − (1 − cycle_error)^{cycles}`.
    pub logical_gate_error: f64,
    /// Seconds per logical gate.
    pub logical_gate_time: f64,
    pub physical_qubits_per_logical: u64,
}

pub fn cycle_error(distance: u32) -> f64 {
    10f64.powf(-(f64::from(distance) + 3.0) / 2.0)
}

pub fn code_point(distance: u32, params: &SurfaceCodeParams) -> Result<CodePoint> {
    if distance < MIN_DISTANCE {
        return Err(invalid(format!(
            "code distance must be >= {MIN_DISTANCE}, got {distance}"
        )));
    }
    params.validate()?;
    let eps = cycle_error(distance);
    let cycles = params.cycles_per_gate_per_distance * f64::from(distance);
    Ok(CodePoint {
        distance,
        cycle_error: eps,
        logical_gate_error: -(cycles * (-eps).ln_1p()).exp_m1(),
        logical_gate_time: cycles * params.cycle_time,
        physical_qubits_per_logical: 2 * u64::from(distance).pow(2),
    })
}

/// First-order form `cycles·d·10^{−(d+3)/2}` of the logical gate error.
pub fn approximate_gate_error(distance: u32, params: &SurfaceCodeParams) -> f64 {
    params.cycles_per_gate_per_distance * f64::from(distance) * cycle_error(distance)
}

/// Smallest distance whose logical gate error is at most `target`.
pub fn distance_for_error(target: f64, params: &SurfaceCodeParams) -> Result<CodePoint> {
    distance_for_error_capped(target, params, DEFAULT_MAX_DISTANCE)
}

pub fn distance_for_error_capped(target: f64, params: &SurfaceCodeParams, max_distance: u32) -> Result<CodePoint> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!("target gate error must lie in (0, 1), got {target}")));
    }
    for d in MIN_DISTANCE..=max_distance {
        let point = code_point(d, params)?;
        if point.logical_gate_error <= target {
            return Ok(point);
        }
    }
    Err(Error::DistanceOutOfRange { target, max_distance })
}

pub fn physical_qubits(n_logical: u64, distance: u32) -> u64 {
    2 * u64::from(distance).pow(2) * n_logical
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn defaults() -> SurfaceCodeParams {
        SurfaceCodeParams::default()
    }

    #[test]
    fn distance_seven() {
        let p = code_point(7, &defaults()).unwrap();
        assert_relative_eq!(p.cycle_error, 1e-5, max_relative = 1e-12);
        assert_relative_eq!(p.logical_gate_time, 700e-6, max_relative = 1e-12);
        assert_eq!(p.physical_qubits_per_logical, 98);
    }

    #[test]
    fn distance_thirteen() {
        let p = code_point(13, &defaults()).unwrap();
        // 1 - (1 - 1e-8)^1300 = 1.29999155654e-5
        assert_relative_eq!(p.logical_gate_error, 1.299_991_556_537e-5, max_relative = 1e-10);
        assert_eq!(p.physical_qubits_per_logical, 338);
    }

    #[test]
    fn cycle_time_scales_gate_time() {
        let params = SurfaceCodeParams {
            cycle_time: 2e-6,
            ..defaults()
        };
        assert_relative_eq!(
            code_point(3, &params).unwrap().logical_gate_time,
            600e-6,
            max_relative = 1e-12
        );
        assert!(code_point(2, &params).is_err());
    }

    #[test]
    fn distance_search() {
        assert_eq!(distance_for_error(1.3e-5, &defaults()).unwrap().distance, 13);
        assert_eq!(distance_for_error(0.5, &defaults()).unwrap().distance, 3);
        assert!(matches!(
            distance_for_error(1e-40, &defaults()),
            Err(Error::DistanceOutOfRange { .. })
        ));
        assert!(distance_for_error(0.0, &defaults()).is_err());
        let mut prev = 0;
        for k in 1..230 {
            let target = 10f64.powf(-(k as f64) / 10.0);
            let d = distance_for_error(target, &defaults()).unwrap().distance;
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn distance_round_trip() {
        for d in 3..=35 {
            let r = code_point(d, &defaults()).unwrap().logical_gate_error;
            assert_eq!(distance_for_error(r, &defaults()).unwrap().distance, d);
        }
    }

    #[test]
    fn monotone_in_distance() {
        let pts: Vec<CodePoint> = (3..=51).map(|d| code_point(d, &defaults()).unwrap()).collect();
        for w in pts.windows(2) {
            assert!(w[1].logical_gate_error < w[0].logical_gate_error);
            assert!(w[1].logical_gate_time > w[0].logical_gate_time);
            assert!(w[1].physical_qubits_per_logical > w[0].physical_qubits_per_logical);
        }
        assert!(pts.last().unwrap().logical_gate_error > 0.0);
    }

    #[test]
    fn first_order_form_agrees_from_distance_six() {
        for d in 6..=35 {
            let exact = code_point(d, &defaults()).unwrap().logical_gate_error;
            let approx = approximate_gate_error(d, &defaults());
            assert!(((exact - approx) / exact).abs() < 0.01, "d={d}");
        }
        // at d = 5 the second-order term is still 2.5%
        let exact = code_point(5, &defaults()).unwrap().logical_gate_error;
        let rel = (approximate_gate_error(5, &defaults()) - exact) / exact;
        assert!(rel > 0.02 && rel < 0.03);
    }

    #[test]
    fn physical_qubit_counts() {
        assert_eq!(physical_qubits(104, 13), 35_152);
        assert_eq!(physical_qubits(104, 24), 119_808);
        assert_eq!(physical_qubits(1, 3), 18);
    }
}
