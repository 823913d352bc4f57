//! Assembly and integration of the switched linear time-varying flow
//! `ẋ = −M(t)x + α(t)z_H` with `M(t) = K(L(t)⊗I_m) + α(t)H̃`.

use thiserror::Error;

use crate::network::{NetworkError, SwitchingSignal, WeightedGraph};
use crate::numerics::{solve_spd, DenseMatrix, NumericsError};
use crate::problem::{LinearEquationProblem, ProblemError};
use crate::stepsize::StepSizeSchedule;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid flow system: {0}")]
    Invalid(String),
    #[error("simulation diverged at t = {t:.6e} (max |x| = {max_abs:.6e})")]
    Diverged { t: f64, max_abs: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// The assembled flow: problem data, communication schedule, consensus gain
/// `K`, and step-size schedule `α`.
#[derive(Debug, Clone)]
pub struct FlowSystem {
    problem: LinearEquationProblem,
    signal: SwitchingSignal,
    k: f64,
    schedule: StepSizeSchedule,
    /// Stacked forcing `[z₁h₁ᵀ … z_Nh_Nᵀ]ᵀ`.
    z_h: Vec<f64>,
}

impl FlowSystem {
    pub fn new(
        problem: LinearEquationProblem,
        signal: SwitchingSignal,
        k: f64,
        schedule: StepSizeSchedule,
    ) -> Result<Self, FlowError> {
        if signal.node_count() != problem.node_count() {
            return Err(FlowError::Invalid(format!(
                "signal has {} nodes, problem has {}",
                signal.node_count(),
                problem.node_count()
            )));
        }
        if !(k > 0.0) {
            return Err(FlowError::Invalid(format!("consensus gain K = {k} must be positive")));
        }
        if !schedule.is_valid() {
            return Err(FlowError::Invalid("invalid step-size schedule".into()));
        }
        let n = problem.node_count();
        let m = problem.unknown_dim();
        let mut z_h = Vec::with_capacity(n * m);
        for i in 1..=n {
            let hi = problem.row(i)?;
            let zi = problem.z_at(i)?;
            z_h.extend(hi.iter().map(|h| zi * h));
        }
        Ok(FlowSystem {
            problem,
            signal,
            k,
            schedule,
            z_h,
        })
    }

    pub fn problem(&self) -> &LinearEquationProblem {
        &self.problem
    }

    pub fn signal(&self) -> &SwitchingSignal {
        &self.signal
    }

    pub fn gain(&self) -> f64 {
        self.k
    }

    pub fn schedule(&self) -> &StepSizeSchedule {
        &self.schedule
    }

    pub fn state_dim(&self) -> usize {
        self.problem.node_count() * self.problem.unknown_dim()
    }

    pub fn forcing(&self) -> &[f64] {
        &self.z_h
    }

    /// `M = K(L⊗I_m) + α·H̃` for an explicit graph and step-size value.
    fn assemble_m(&self, graph: &WeightedGraph, alpha: f64) -> DenseMatrix {
        let n = self.problem.node_count();
        let m = self.problem.unknown_dim();
        let l = graph.laplacian();
        let mut mat = DenseMatrix::zeros(n * m, n * m);
        for bi in 0..n {
            for bj in 0..n {
                let lij = l.get(bi, bj);
                if lij != 0.0 {
                    for d in 0..m {
                        mat.add_to(bi * m + d, bj * m + d, self.k * lij);
                    }
                }
            }
            let hi = self.problem.matrix().row(bi);
            for a in 0..m {
                for b in 0..m {
                    mat.add_to(bi * m + a, bi * m + b, alpha * hi[a] * hi[b]);
                }
            }
        }
        mat
    }

    /// `M(t)` with the right-continuous graph at `t`.
    pub fn build_m(&self, t: f64) -> DenseMatrix {
        self.assemble_m(self.signal.graph_at(t), self.schedule.evaluate(t))
    }

    /// Vector-form right-hand side `−M(t)x + α(t)z_H`.
    pub fn rhs(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, FlowError> {
        self.rhs_frozen(self.signal.graph_at(t), t, x)
    }

    fn rhs_frozen(&self, graph: &WeightedGraph, t: f64, x: &[f64]) -> Result<Vec<f64>, FlowError> {
        if x.len() != self.state_dim() {
            return Err(FlowError::Invalid(format!(
                "state length {} vs N·m = {}",
                x.len(),
                self.state_dim()
            )));
        }
        let alpha = self.schedule.evaluate(t);
        let m = self.assemble_m(graph, alpha);
        let mx = m.matvec(x)?;
        Ok(mx
            .iter()
            .zip(&self.z_h)
            .map(|(mx_i, zh_i)| -mx_i + alpha * zh_i)
            .collect())
    }

    /// Node-wise form of the right-hand side:
    /// `ẋᵢ = K Σⱼ Aᵢⱼ(xⱼ − xᵢ) − α(t)(hᵢhᵢᵀxᵢ − zᵢhᵢ)`.
    pub fn rhs_nodewise(&self, t: f64, x: &[f64]) -> Result<Vec<f64>, FlowError> {
        if x.len() != self.state_dim() {
            return Err(FlowError::Invalid(format!(
                "state length {} vs N·m = {}",
                x.len(),
                self.state_dim()
            )));
        }
        let n = self.problem.node_count();
        let md = self.problem.unknown_dim();
        let alpha = self.schedule.evaluate(t);
        let graph = self.signal.graph_at(t);
        let mut out = vec![0.0; n * md];
        for e in graph.edges() {
            let (i, j) = (e.i - 1, e.j - 1);
            for d in 0..md {
                let diff = x[j * md + d] - x[i * md + d];
                out[i * md + d] += self.k * e.w * diff;
                out[j * md + d] -= self.k * e.w * diff;
            }
        }
        for i in 1..=n {
            let gi = self.problem.local_gradient(i, &x[(i - 1) * md..i * md])?;
            for d in 0..md {
                out[(i - 1) * md + d] -= 0.5 * alpha * gi[d];
            }
        }
        Ok(out)
    }

    /// One classical fourth-order Runge-Kutta step; `[t, t+h]` must not
    /// contain a switch instant in its interior.
    pub fn step_rk4(&self, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>, FlowError> {
        self.step_rk4_frozen(self.signal.graph_at(t), t, x, h)
    }

    fn step_rk4_frozen(
        &self,
        graph: &WeightedGraph,
        t: f64,
        x: &[f64],
        h: f64,
    ) -> Result<Vec<f64>, FlowError> {
        let k1 = self.rhs_frozen(graph, t, x)?;
        let x2: Vec<f64> = x.iter().zip(&k1).map(|(xi, k)| xi + 0.5 * h * k).collect();
        let k2 = self.rhs_frozen(graph, t + 0.5 * h, &x2)?;
        let x3: Vec<f64> = x.iter().zip(&k2).map(|(xi, k)| xi + 0.5 * h * k).collect();
        let k3 = self.rhs_frozen(graph, t + 0.5 * h, &x3)?;
        let x4: Vec<f64> = x.iter().zip(&k3).map(|(xi, k)| xi + h * k).collect();
        let k4 = self.rhs_frozen(graph, t + h, &x4)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, xi)| xi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    /// One trapezoidal (Crank-Nicolson) step, exploiting linearity:
    /// `(I + (h/2)M(t+h)) x⁺ = (I − (h/2)M(t)) x + h·(α(t)+α(t+h))/2·z_H`.
    pub fn step_trapezoidal(&self, t: f64, x: &[f64], h: f64) -> Result<Vec<f64>, FlowError> {
        self.step_trapezoidal_frozen(self.signal.graph_at(t), t, x, h)
    }

    fn step_trapezoidal_frozen(
        &self,
        graph: &WeightedGraph,
        t: f64,
        x: &[f64],
        h: f64,
    ) -> Result<Vec<f64>, FlowError> {
        let dim = self.state_dim();
        if x.len() != dim {
            return Err(FlowError::Invalid(format!(
                "state length {} vs N·m = {}",
                x.len(),
                dim
            )));
        }
        let a0 = self.schedule.evaluate(t);
        let a1 = self.schedule.evaluate(t + h);
        let m0 = self.assemble_m(graph, a0);
        let m1 = self.assemble_m(graph, a1);

        let m0x = m0.matvec(x)?;
        let abar = 0.5 * (a0 + a1);
        let rhs: Vec<f64> = (0..dim)
            .map(|i| x[i] - 0.5 * h * m0x[i] + h * abar * self.z_h[i])
            .collect();

        // I + (h/2)M is SPD because M is positive semidefinite
        let mut lhs = m1;
        for i in 0..dim {
            for j in 0..dim {
                let v = 0.5 * h * lhs.get(i, j) + if i == j { 1.0 } else { 0.0 };
                lhs.set(i, j, v);
            }
        }
        Ok(solve_spd(&lhs, &rhs)?)
    }

    /// RK4 stability bound `h < 2.78/(K·λ_max(L) + α(0)·maxᵢ‖hᵢ‖²)` over the
    /// referenced graphs.
    pub fn rk4_stable_step(&self) -> Result<f64, FlowError> {
        let mut lam_max = 0.0f64;
        for &gi in &self.signal.referenced_graphs() {
            lam_max = lam_max.max(self.signal.graphs()[gi].laplacian_max_eigenvalue()?);
        }
        let h_max_row = (0..self.problem.node_count())
            .map(|i| {
                self.problem
                    .matrix()
                    .row(i)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max);
        Ok(2.78 / (self.k * lam_max + self.schedule.evaluate(0.0) * h_max_row))
    }

    /// Integrate from `x0` to at least `horizon`, sampling near the requested
    /// record times. Steps never straddle a switch instant.
    pub fn simulate(
        &self,
        x0: &[f64],
        spec: &IntegratorSpec,
        horizon: f64,
    ) -> Result<Trajectory, FlowError> {
        if x0.len() != self.state_dim() {
            return Err(FlowError::Invalid(format!(
                "x0 length {} vs N·m = {}",
                x0.len(),
                self.state_dim()
            )));
        }
        if !(horizon > 0.0) {
            return Err(FlowError::Invalid("horizon must be positive".into()));
        }
        spec.validate(horizon)?;

        let nseg = self.signal.segments().len() as u64;
        let period = self.signal.period();
        let boundary_offsets: Vec<f64> = {
            let mut acc = 0.0;
            self.signal
                .segments()
                .iter()
                .map(|&(_, d)| {
                    let b = acc;
                    acc += d;
                    b
                })
                .collect()
        };
        let switching = self.signal.is_switching()
            && (self.signal.is_periodic() || period < horizon);
        // absolute time of the idx-th segment boundary (idx >= 1)
        let boundary_time = |idx: u64| -> Option<f64> {
            if !self.signal.is_periodic() && idx >= nseg {
                return None;
            }
            let periods = idx / nseg;
            let j = (idx % nseg) as usize;
            Some(periods as f64 * period + boundary_offsets[j])
        };

        let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(spec.record_times.len() + 2);
        samples.push((0.0, x0.to_vec()));
        let mut record_idx = spec
            .record_times
            .iter()
            .position(|&r| r > 0.0)
            .unwrap_or(spec.record_times.len());

        let mut t = 0.0f64;
        let mut x = x0.to_vec();
        let mut h_cur = spec.h;
        let mut next_boundary_idx: u64 = 1;

        while t < horizon {
            if spec.method == IntegratorMethod::Trapezoidal && t >= spec.fixed_until {
                h_cur = (h_cur * spec.growth).min(spec.h_max);
            }
            let mut t_next = t + h_cur;
            let mut hit_boundary = false;
            if switching {
                if let Some(nb) = boundary_time(next_boundary_idx) {
                    if t_next >= nb - 1e-12 * nb.max(1.0) {
                        t_next = nb;
                        hit_boundary = true;
                    }
                }
            }
            if t_next >= horizon {
                if t_next > horizon {
                    t_next = horizon;
                    hit_boundary = false;
                }
            }
            let h = t_next - t;
            if h <= 0.0 {
                // degenerate clip; advance the boundary pointer and retry
                next_boundary_idx += 1;
                continue;
            }
            let graph = self.signal.graph_at(t);
            let x_next = match spec.method {
                IntegratorMethod::Rk4 => self.step_rk4_frozen(graph, t, &x, h)?,
                IntegratorMethod::Trapezoidal => self.step_trapezoidal_frozen(graph, t, &x, h)?,
            };
            let max_abs = x_next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if !max_abs.is_finite() || max_abs > 1e12 {
                return Err(FlowError::Diverged { t: t_next, max_abs });
            }

            // record requested times at the nearest completed step time
            while record_idx < spec.record_times.len() && spec.record_times[record_idx] <= t_next {
                let r = spec.record_times[record_idx];
                let (ts, xs) = if (r - t).abs() < (t_next - r).abs() {
                    (t, &x)
                } else {
                    (t_next, &x_next)
                };
                if samples.last().map(|(lt, _)| *lt < ts).unwrap_or(true) {
                    samples.push((ts, xs.clone()));
                }
                record_idx += 1;
            }

            t = t_next;
            x = x_next;
            if hit_boundary {
                next_boundary_idx += 1;
            }
        }
        if samples.last().map(|(lt, _)| *lt < t).unwrap_or(true) {
            samples.push((t, x.clone()));
        }

        Ok(Trajectory {
            samples,
            terminal_time: t,
            terminal_state: x,
            node_count: self.problem.node_count(),
            unknown_dim: self.problem.unknown_dim(),
            method: spec.method,
            initial_step: spec.h,
            gain: self.k,
            schedule: self.schedule,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegratorMethod {
    Rk4,
    Trapezoidal,
}

impl IntegratorMethod {
    pub fn name(&self) -> &'static str {
        match self {
            IntegratorMethod::Rk4 => "rk4",
            IntegratorMethod::Trapezoidal => "trapezoidal",
        }
    }
}

/// Fixed-step integrator description. The trapezoidal method keeps `h` fixed
/// until `fixed_until`, then grows it geometrically up to `h_max`; RK4 always
/// keeps the fixed step.
#[derive(Debug, Clone)]
pub struct IntegratorSpec {
    pub method: IntegratorMethod,
    pub h: f64,
    pub h_max: f64,
    pub growth: f64,
    pub fixed_until: f64,
    /// Strictly increasing sample-request times within `[0, horizon]`.
    pub record_times: Vec<f64>,
}

impl IntegratorSpec {
    pub fn trapezoidal(h: f64, record_times: Vec<f64>) -> Self {
        IntegratorSpec {
            method: IntegratorMethod::Trapezoidal,
            h,
            h_max: 0.5,
            growth: 1.05,
            fixed_until: 10.0,
            record_times,
        }
    }

    pub fn rk4(h: f64, record_times: Vec<f64>) -> Self {
        IntegratorSpec {
            method: IntegratorMethod::Rk4,
            h,
            h_max: h,
            growth: 1.0,
            fixed_until: f64::INFINITY,
            record_times,
        }
    }

    fn validate(&self, horizon: f64) -> Result<(), FlowError> {
        if !(self.h > 0.0) {
            return Err(FlowError::Invalid("step h must be positive".into()));
        }
        if !(self.h_max >= self.h) || !(self.growth >= 1.0) {
            return Err(FlowError::Invalid(
                "need h_max >= h and growth >= 1".into(),
            ));
        }
        let mut prev = -1.0;
        for &r in &self.record_times {
            if r <= prev {
                return Err(FlowError::Invalid(
                    "record times must be strictly increasing".into(),
                ));
            }
            if r < 0.0 || r > horizon {
                return Err(FlowError::Invalid(format!(
                    "record time {r} outside [0, {horizon}]"
                )));
            }
            prev = r;
        }
        Ok(())
    }
}

/// Geometric recording grid: `points` times from `t_min` to `horizon`.
pub fn geometric_record_times(t_min: f64, horizon: f64, points: usize) -> Vec<f64> {
    assert!(t_min > 0.0 && horizon > t_min && points >= 2);
    let ratio = (horizon / t_min).ln() / (points - 1) as f64;
    let mut times: Vec<f64> = (0..points)
        .map(|k| t_min * (ratio * k as f64).exp())
        .collect();
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * a.abs().max(1.0));
    let last = times.len() - 1;
    times[last] = horizon;
    times
}

/// Recorded solution samples of a flow simulation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `(t, x)` pairs with strictly increasing `t`; the first is `(0, x0)`.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub terminal_time: f64,
    pub terminal_state: Vec<f64>,
    pub node_count: usize,
    pub unknown_dim: usize,
    pub method: IntegratorMethod,
    pub initial_step: f64,
    pub gain: f64,
    pub schedule: StepSizeSchedule,
}
