//! Simulation library for a distributed least-squares flow over fixed and
//! switching networks: problem data, graph schedules, step-size admissibility,
//! the switched linear ODE, and its error metrics.

pub mod config;
pub mod flow;
pub mod metrics;
pub mod network;
pub mod numerics;
pub mod presets;
pub mod problem;
pub mod runner;
pub mod stepsize;

pub use flow::{FlowError, FlowSystem, IntegratorMethod, IntegratorSpec, Trajectory};
pub use network::{Edge, NetworkError, ScenarioClass, SwitchingSignal, WeightedGraph};
pub use numerics::{DenseMatrix, MinNormSolution, NumericsError, SymEig};
pub use problem::{
    LeastSquaresSet, LinearEquationProblem, ProblemError, RatePrediction, RateRegime,
};
pub use stepsize::{AssumptionProfile, StepSizeSchedule};
