//! JSON experiment configuration: problem data, named graphs, switching
//! schedule, step size, initial state, integrator, and output options.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{FlowError, FlowSystem, IntegratorMethod, IntegratorSpec};
use crate::network::{NetworkError, SwitchingSignal, WeightedGraph};
use crate::problem::{LinearEquationProblem, ProblemError};
use crate::stepsize::StepSizeSchedule;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("config problem: {0}")]
    Problem(#[from] ProblemError),
    #[error("config graph/signal: {0}")]
    Network(#[from] NetworkError),
    #[error("config flow: {0}")]
    Flow(#[from] FlowError),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    /// Row-major measurement matrix; row i belongs to node i.
    pub h: Vec<Vec<f64>>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: usize,
    /// `[i, j, weight]` with 1-based endpoints.
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalSpec {
    /// `(graph name, dwell duration)` segments, played in order.
    pub segments: Vec<(String, f64)>,
    #[serde(default = "default_true")]
    pub periodic: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// Explicit stacked node-major state of length N·m.
    Values(Vec<f64>),
    /// Reproducible random state: uniform in [−scale, scale] per component.
    Seeded { seed: u64, #[serde(default = "default_scale")] scale: f64 },
}

fn default_scale() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegratorConfig {
    #[serde(default = "default_method")]
    pub method: String,
    pub h: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_growth")]
    pub growth: f64,
}

fn default_method() -> String {
    "trapezoidal".to_string()
}
fn default_h_max() -> f64 {
    0.5
}
fn default_growth() -> f64 {
    1.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
}

fn default_points() -> usize {
    400
}
fn default_t_min() -> f64 {
    1e-2
}

impl Default for RecordConfig {
    fn default() -> Self {
        RecordConfig {
            points: default_points(),
            t_min: default_t_min(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub emit_svg: bool,
}

fn default_dir() -> String {
    "out".to_string()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            emit_svg: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub problem: ProblemSpec,
    /// Named graphs referenced by the signal; BTreeMap keeps JSON output
    /// deterministic.
    pub graphs: BTreeMap<String, GraphSpec>,
    pub signal: SignalSpec,
    pub k: f64,
    pub stepsize: StepSizeSchedule,
    pub x0: InitialState,
    pub integrator: IntegratorConfig,
    pub horizon: f64,
    #[serde(default)]
    pub record: RecordConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

/// Everything needed to run an experiment, validated and assembled.
pub struct ResolvedExperiment {
    pub system: FlowSystem,
    pub spec: IntegratorSpec,
    pub horizon: f64,
    pub x0: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn build_problem(&self) -> Result<LinearEquationProblem, ConfigError> {
        Ok(LinearEquationProblem::from_rows(
            &self.problem.h,
            self.problem.z.clone(),
        )?)
    }

    pub fn build_signal(&self) -> Result<SwitchingSignal, ConfigError> {
        if self.signal.segments.is_empty() {
            return Err(invalid("signal.segments", "at least one segment required"));
        }
        let mut names: Vec<&String> = Vec::new();
        for (name, _) in &self.signal.segments {
            if !names.contains(&name) {
                names.push(name);
            }
        }
        let mut graphs = Vec::with_capacity(names.len());
        for name in &names {
            let gs = self
                .graphs
                .get(*name)
                .ok_or_else(|| invalid("signal.segments", format!("unknown graph `{name}`")))?;
            let edges: Vec<(usize, usize, f64)> = gs.edges.clone();
            graphs.push(WeightedGraph::new(gs.nodes, &edges)?);
        }
        let segments: Vec<(usize, f64)> = self
            .signal
            .segments
            .iter()
            .map(|(name, d)| (names.iter().position(|n| *n == name).unwrap(), *d))
            .collect();
        Ok(SwitchingSignal::new(graphs, segments, self.signal.periodic)?)
    }

    pub fn resolve_x0(&self, n: usize, m: usize) -> Result<Vec<f64>, ConfigError> {
        match &self.x0 {
            InitialState::Values(v) => {
                if v.len() != n * m {
                    return Err(invalid(
                        "x0",
                        format!("expected {} components (N·m), found {}", n * m, v.len()),
                    ));
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("x0", "components must be finite"));
                }
                Ok(v.clone())
            }
            InitialState::Seeded { seed, scale } => {
                if !(*scale > 0.0) {
                    return Err(invalid("x0.scale", "must be positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n * m).map(|_| rng.gen_range(-scale..*scale)).collect())
            }
        }
    }

    pub fn build_integrator(&self) -> Result<IntegratorSpec, ConfigError> {
        let method = match self.integrator.method.as_str() {
            "trapezoidal" => IntegratorMethod::Trapezoidal,
            "rk4" => IntegratorMethod::Rk4,
            other => {
                return Err(invalid(
                    "integrator.method",
                    format!("unknown method `{other}` (expected trapezoidal or rk4)"),
                ))
            }
        };
        if !(self.integrator.h > 0.0) {
            return Err(invalid("integrator.h", "must be positive"));
        }
        if self.record.points < 2 {
            return Err(invalid("record.points", "need at least 2 record points"));
        }
        if !(self.record.t_min > 0.0 && self.record.t_min < self.horizon) {
            return Err(invalid("record.t_min", "must lie in (0, horizon)"));
        }
        let record_times =
            crate::flow::geometric_record_times(self.record.t_min, self.horizon, self.record.points);
        Ok(match method {
            IntegratorMethod::Trapezoidal => IntegratorSpec {
                h_max: self.integrator.h_max.max(self.integrator.h),
                growth: self.integrator.growth.max(1.0),
                ..IntegratorSpec::trapezoidal(self.integrator.h, record_times)
            },
            IntegratorMethod::Rk4 => IntegratorSpec::rk4(self.integrator.h, record_times),
        })
    }

    /// Full validation and assembly. Admissibility of the (scenario,
    /// step-size) pair is checked separately by the caller so `--force` can
    /// override it.
    pub fn resolve(&self) -> Result<ResolvedExperiment, ConfigError> {
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", "must be positive"));
        }
        let problem = self.build_problem()?;
        let signal = self.build_signal()?;
        if signal.node_count() != problem.node_count() {
            return Err(invalid(
                "graphs",
                format!(
                    "graphs have {} nodes but the problem has {} rows",
                    signal.node_count(),
                    problem.node_count()
                ),
            ));
        }
        let x0 = self.resolve_x0(problem.node_count(), problem.unknown_dim())?;
        let spec = self.build_integrator()?;
        let system = FlowSystem::new(problem, signal, self.k, self.stepsize)?;
        Ok(ResolvedExperiment {
            system,
            spec,
            horizon: self.horizon,
            x0,
        })
    }
}
