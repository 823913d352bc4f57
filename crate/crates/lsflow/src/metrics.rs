//! Trajectory diagnostics: consensus and solution errors, log-corrected
//! series, log-log slope fitting, and the conserved-component limit oracle.

use serde::Serialize;
use thiserror::Error;

use crate::flow::Trajectory;
use crate::numerics::{dot, norm};
use crate::problem::{LeastSquaresSet, LinearEquationProblem, ProblemError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("insufficient window: need at least {need} positive samples in [{t_lo}, {t_hi}], found {found}")]
    InsufficientWindow { need: usize, found: usize, t_lo: f64, t_hi: f64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Timestamped nonnegative scalar diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl ErrorSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: &str) -> Result<Self, MetricsError> {
        if times.len() != values.len() {
            return Err(MetricsError::Dimension(format!(
                "{} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MetricsError::Dimension("times must be increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MetricsError::Dimension(
                "values must be finite and nonnegative".into(),
            ));
        }
        Ok(ErrorSeries { times, values, label: label.to_string() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn terminal_value(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Ordinary least-squares line through (log₁₀ t, log₁₀ value).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub rms_residual: f64,
}

/// `x̄ = (1/N)Σᵢ xᵢ` for a stacked node-major state.
pub fn mean_state(x: &[f64], n: usize, m: usize) -> Result<Vec<f64>, MetricsError> {
    if x.len() != n * m || n == 0 {
        return Err(MetricsError::Dimension(format!(
            "state length {} vs N·m = {}",
            x.len(),
            n * m
        )));
    }
    let mut mean = vec![0.0; m];
    for i in 0..n {
        for d in 0..m {
            mean[d] += x[i * m + d];
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    Ok(mean)
}

/// `‖x − 1_N ⊗ x̄‖`: Euclidean norm of the stacked deviation from the mean.
pub fn consensus_error(x: &[f64], n: usize, m: usize) -> Result<f64, MetricsError> {
    let mean = mean_state(x, n, m)?;
    let mut s = 0.0;
    for i in 0..n {
        for d in 0..m {
            let dev = x[i * m + d] - mean[d];
            s += dev * dev;
        }
    }
    Ok(s.sqrt())
}

/// `Φ = maxᵢⱼ ‖xᵢ − xⱼ‖`.
pub fn disagreement_diameter(x: &[f64], n: usize, m: usize) -> Result<f64, MetricsError> {
    if x.len() != n * m || n == 0 {
        return Err(MetricsError::Dimension(format!(
            "state length {} vs N·m = {}",
            x.len(),
            n * m
        )));
    }
    let mut phi = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let mut s = 0.0;
            for d in 0..m {
                let diff = x[i * m + d] - x[j * m + d];
                s += diff * diff;
            }
            phi = phi.max(s.sqrt());
        }
    }
    Ok(phi)
}

/// Consensus error per recorded sample.
pub fn consensus_error_series(traj: &Trajectory) -> Result<ErrorSeries, MetricsError> {
    let (n, m) = (traj.node_count, traj.unknown_dim);
    let mut times = Vec::with_capacity(traj.samples.len());
    let mut values = Vec::with_capacity(traj.samples.len());
    for (t, x) in &traj.samples {
        times.push(*t);
        values.push(consensus_error(x, n, m)?);
    }
    ErrorSeries::new(times, values, "consensus_error")
}

/// Disagreement diameter Φ per recorded sample.
pub fn disagreement_series(traj: &Trajectory) -> Result<ErrorSeries, MetricsError> {
    let (n, m) = (traj.node_count, traj.unknown_dim);
    let mut times = Vec::with_capacity(traj.samples.len());
    let mut values = Vec::with_capacity(traj.samples.len());
    for (t, x) in &traj.samples {
        times.push(*t);
        values.push(disagreement_diameter(x, n, m)?);
    }
    ErrorSeries::new(times, values, "phi")
}

/// Distance from `x̄(t)` to the least-squares set per sample: `‖x̄ − y*‖`
/// when the solution is unique, orthogonal distance to the affine set
/// otherwise.
pub fn solution_error(traj: &Trajectory, ls: &LeastSquaresSet) -> Result<ErrorSeries, MetricsError> {
    let (n, m) = (traj.node_count, traj.unknown_dim);
    if ls.y_min_norm.len() != m {
        return Err(MetricsError::Dimension(format!(
            "solution dim {} vs unknown dim {}",
            ls.y_min_norm.len(),
            m
        )));
    }
    let mut times = Vec::with_capacity(traj.samples.len());
    let mut values = Vec::with_capacity(traj.samples.len());
    for (t, x) in &traj.samples {
        times.push(*t);
        values.push(ls.distance(&mean_state(x, n, m)?));
    }
    ErrorSeries::new(times, values, "solution_error")
}

/// Values divided by `log(t+1)`; samples where the divisor is not positive
/// are dropped.
pub fn log_corrected(series: &ErrorSeries) -> ErrorSeries {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        let d = (t + 1.0).ln();
        if d > 0.0 {
            times.push(t);
            values.push(v / d);
        }
    }
    ErrorSeries {
        times,
        values,
        label: format!("{}_logcorr", series.label),
    }
}

/// OLS fit of `log₁₀(value)` against `log₁₀(t)` over a window; only samples
/// with positive value and time participate, and at least 10 are required.
pub fn fit_loglog_slope(
    series: &ErrorSeries,
    t_lo: f64,
    t_hi: f64,
) -> Result<SlopeFit, MetricsError> {
    assert!(t_lo < t_hi, "window must satisfy t_lo < t_hi");
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, &v)| t >= t_lo && t <= t_hi && t > 0.0 && v > 0.0)
        .map(|(&t, &v)| (t.log10(), v.log10()))
        .collect();
    if pts.len() < 10 {
        return Err(MetricsError::InsufficientWindow {
            need: 10,
            found: pts.len(),
            t_lo,
            t_hi,
        });
    }
    let k = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let (mx, my) = (sx / k, sy / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        t_lo,
        t_hi,
        rms_residual: (ss_res / k).sqrt(),
    })
}

/// Predicted consensus limit: the mean dynamics never move in null(HᵀH), so
/// the limit is `y_mn` plus the conserved nullspace component of `x̄(0)`.
/// For full-rank problems this is simply `y*`.
pub fn limit_oracle(
    p: &LinearEquationProblem,
    x0: &[f64],
    ls: &LeastSquaresSet,
) -> Result<Vec<f64>, MetricsError> {
    let (n, m) = (p.node_count(), p.unknown_dim());
    let mean0 = mean_state(x0, n, m)?;
    let mut y = ls.y_min_norm.clone();
    for v in &ls.nullspace_basis {
        let c = dot(&mean0, v);
        for d in 0..m {
            y[d] += c * v[d];
        }
    }
    Ok(y)
}

/// Max `‖x(t)‖` over the recorded samples.
pub fn boundedness_monitor(traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(|(_, x)| norm(x))
        .fold(0.0f64, f64::max)
}
