//! Diminishing step-size schedules and their analytic classification against
//! the nonintegrability / vanishing / square-integrability conditions.

use serde::{Deserialize, Serialize};

use crate::network::ScenarioClass;

/// The step-size family. `Power` evaluates to `c/(t0 + t)^lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepSizeSchedule {
    Power { c: f64, t0: f64, lambda: f64 },
    Constant { c: f64 },
}

impl StepSizeSchedule {
    /// `1/(t0+t)^lambda` with the conventional offset `t0 = 1`.
    pub fn power(lambda: f64) -> Self {
        StepSizeSchedule::Power {
            c: 1.0,
            t0: 1.0,
            lambda,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            StepSizeSchedule::Power { c, t0, lambda } => c > 0.0 && t0 > 0.0 && lambda >= 0.0,
            StepSizeSchedule::Constant { c } => c > 0.0,
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match *self {
            StepSizeSchedule::Power { c, t0, lambda } => c / (t0 + t).powf(lambda),
            StepSizeSchedule::Constant { c } => c,
        }
    }

    /// Exponent `lambda` if this is a power schedule.
    pub fn power_exponent(&self) -> Option<f64> {
        match *self {
            StepSizeSchedule::Power { lambda, .. } => Some(lambda),
            StepSizeSchedule::Constant { .. } => None,
        }
    }

    /// Classification against the three step-size conditions, derived from the
    /// closed form, never numerically.
    pub fn assumption_profile(&self) -> AssumptionProfile {
        match *self {
            StepSizeSchedule::Power { lambda, .. } => AssumptionProfile {
                nonintegrable: lambda <= 1.0,
                vanishing: lambda > 0.0,
                square_integrable: lambda > 0.5,
            },
            StepSizeSchedule::Constant { .. } => AssumptionProfile {
                nonintegrable: true,
                vanishing: false,
                square_integrable: false,
            },
        }
    }

    /// Whether this schedule satisfies the step-size hypotheses of the
    /// convergence theorem that covers `scenario`.
    pub fn admissible_for(&self, scenario: &ScenarioClass) -> bool {
        let p = self.assumption_profile();
        match scenario {
            ScenarioClass::FixedConnected => p.nonintegrable && p.vanishing,
            ScenarioClass::SwitchingAllConnected
            | ScenarioClass::UniformlyJointlyConnected { .. } => {
                p.nonintegrable && p.vanishing && p.square_integrable
            }
            ScenarioClass::Unsupported => false,
        }
    }
}

/// Truth values of the three step-size conditions:
/// (i) `∫α = ∞`, (ii) `α(t) → 0`, (iii) `∫α² < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionProfile {
    pub nonintegrable: bool,
    pub vanishing: bool,
    pub square_integrable: bool,
}
