//! Least-squares fits of `y = a·N^b + c` used to extrapolate cost figures to
//! larger qubit counts.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Euclidean norm of the residuals at the solution.
    pub residual_norm: f64,
    pub points_used: usize,
    /// `c` was held at zero (two-point fits).
    pub c_pinned: bool,
}

impl PowerLawFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.a * n.powf(self.b) + self.c
    }

    pub fn extrapolate(&self, n_target: u64) -> Result<f64> {
        if n_target == 0 {
            return Err(invalid("extrapolation target must be positive"));
        }
        Ok(self.eval(n_target as f64))
    }
}

pub fn extrapolate(fit: &PowerLawFit, n_target: u64) -> Result<f64> {
    fit.extrapolate(n_target)
}

/// Fits `y = a·N^b + c`. With exactly two points `c` is fixed at zero and the
/// fit is exact.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    validate(points)?;
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    if pts.len() == 2 {
        let [(n1, y1), (n2, y2)] = [pts[0], pts[1]];
        let b = (y2 / y1).ln() / (n2 / n1).ln();
        let a = y1 / n1.powf(b);
        let fit = PowerLawFit {
            a,
            b,
            c: 0.0,
            residual_norm: 0.0,
            points_used: 2,
            c_pinned: true,
        };
        return Ok(PowerLawFit {
            residual_norm: rss(&pts, [a, b, 0.0]).sqrt(),
            ..fit
        });
    }

    let start = projected_start(&pts);
    let [a, b, c] = levenberg_marquardt(&pts, start)?;
    if !b.is_finite() {
        return Err(Error::FitDidNotConverge(MAX_ITERATIONS));
    }
    Ok(PowerLawFit {
        a,
        b,
        c,
        residual_norm: rss(&pts, [a, b, c]).sqrt(),
        points_used: pts.len(),
        c_pinned: false,
    })
}

fn validate(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 2 {
        return Err(invalid(format!("need at least 2 points to fit, got {}", points.len())));
    }
    for &(n, y) in points {
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid(format!("qubit counts must be positive, got {n}")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(invalid(format!("fitted values must be positive, got {y}")));
        }
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| q.0 == p.0) {
            return Err(invalid(format!("duplicate qubit count {}", p.0)));
        }
    }
    Ok(())
}

fn rss(pts: &[(f64, f64)], [a, b, c]: [f64; 3]) -> f64 {
    pts.iter().map(|&(n, y)| (y - a * n.powf(b) - c).powi(2)).sum()
}

/// Best `(a, c)` for a fixed exponent, by linear least squares.
fn linear_part(pts: &[(f64, f64)], b: f64) -> Option<(f64, f64)> {
    let m = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, y) in pts {
        let x = n.powf(b);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = m * sxx - sx * sx;
    if !(det.abs() > 1e-12 * m * sxx) {
        return None;
    }
    let a = (m * sxy - sx * sy) / det;
    Some((a, (sy - a * sx) / m))
}

/// Starting point: the log-log slope guess, improved by a scan and golden
/// search over the exponent with `(a, c)` eliminated.
fn projected_start(pts: &[(f64, f64)]) -> [f64; 3] {
    let (n0, y0) = pts[0];
    let (n1, y1) = pts[pts.len() - 1];
    let y_min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let delta = 1e-3 * (y1 - y0).abs().max(y_min);
    let b0 = ((y1 - y_min + delta) / (y0 - y_min + delta)).ln() / (n1 / n0).ln();
    let b0 = if b0.is_finite() { b0 } else { 1.0 };
    let fallback = [y1 / n1.powf(b0), b0, 0.0];

    let profile = |b: f64| match linear_part(pts, b) {
        Some((a, c)) => rss(pts, [a, b, c]),
        None => f64::INFINITY,
    };
    let mut best = (profile(b0), b0);
    let step = 0.05;
    let grid: Vec<f64> = (-80..=160).map(|k| k as f64 * step).collect();
    for &b in &grid {
        let r = profile(b);
        if r < best.0 {
            best = (r, b);
        }
    }
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (profile(x1), profile(x2));
    for _ in 0..100 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = profile(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = profile(x2);
        }
    }
    let b = 0.5 * (lo + hi);
    let b = if profile(b) <= best.0 { b } else { best.1 };
    match linear_part(pts, b) {
        Some((a, c)) => [a, b, c],
        None => fallback,
    }
}

fn levenberg_marquardt(pts: &[(f64, f64)], start: [f64; 3]) -> Result<[f64; 3]> {
    let scale: f64 = pts.iter().map(|p| p.1 * p.1).sum();
    let mut p = start;
    let mut cost = rss(pts, p);
    let mut damping = 1e-3;
    for _ in 0..MAX_ITERATIONS {
        if cost <= 1e-28 * scale {
            return Ok(p);
        }
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(n, y) in pts {
            let x = n.powf(p[1]);
            let row = [x, p[0] * x * n.ln(), 1.0];
            let r = y - p[0] * x - p[2];
            for i in 0..3 {
                jtr[i] += row[i] * r;
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        let grad = jtr.iter().map(|g| g * g).sum::<f64>().sqrt();
        let jnorm = (0..3).map(|i| jtj[i][i]).sum::<f64>().sqrt();
        if grad <= 1e-14 * jnorm * cost.sqrt().max(f64::MIN_POSITIVE) {
            return Ok(p);
        }
        loop {
            let mut m = jtj;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += damping * jtj[i][i].max(1e-300);
            }
            let Some(step) = solve3(m, jtr) else {
                damping *= 10.0;
                if damping > 1e30 {
                    return Ok(p);
                }
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = rss(pts, trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let small = (0..3).all(|i| step[i].abs() <= 1e-15 * (p[i].abs() + 1e-12));
                let gain = cost - trial_cost;
                p = trial;
                cost = trial_cost;
                damping = (damping / 3.0).max(1e-15);
                if small || gain <= 1e-15 * cost {
                    return Ok(p);
                }
                break;
            }
            damping *= 4.0;
            if damping > 1e30 {
                // no descent direction left: a stationary point
                return Ok(p);
            }
        }
    }
    Err(Error::FitDidNotConverge(MAX_ITERATIONS))
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            let pivot = m[col];
            for (x, p) in m[r].iter_mut().zip(pivot).skip(col) {
                *x -= f * p;
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| m[r][k] * x[k]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    x.iter().all(|e| e.is_finite()).then_some(x)
}
