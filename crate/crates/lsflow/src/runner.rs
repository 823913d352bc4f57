//! Experiment execution: admissibility checks, simulation, and deterministic
//! CSV/JSON/SVG artifact emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::flow::{FlowError, Trajectory};
use crate::metrics::{
    self, boundedness_monitor, fit_loglog_slope, limit_oracle, log_corrected, ErrorSeries,
    MetricsError, SlopeFit,
};
use crate::network::{NetworkError, ScenarioClass};
use crate::problem::{RatePrediction, DEFAULT_RANK_TOL};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
    #[error("simulation diverged at t = {t:.6e} (max |x| = {max_abs:.6e})")]
    Diverged { t: f64, max_abs: f64 },
    #[error(transparent)]
    Flow(FlowError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Problem(#[from] crate::problem::ProblemError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("analyze error: {0}")]
    Analyze(String),
    #[error("{0}")]
    Usage(String),
}

impl From<FlowError> for RunnerError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Diverged { t, max_abs } => RunnerError::Diverged { t, max_abs },
            other => RunnerError::Flow(other),
        }
    }
}

impl RunnerError {
    /// Process exit code: 1 inadmissible, 2 config error, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Inadmissible(_) => 1,
            RunnerError::Diverged { .. } => 3,
            _ => 2,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunnerError> {
    fs::write(path, contents).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// 17 significant digits, bit-exact across runs.
fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn series_csv(series: &ErrorSeries) -> String {
    let mut out = String::with_capacity(series.len() * 48 + 16);
    out.push_str("t,value\n");
    for (t, v) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{},{}", fmt_num(*t), fmt_num(*v));
    }
    out
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    out.push_str("t");
    for i in 1..=traj.node_count {
        for d in 1..=traj.unknown_dim {
            let _ = write!(out, ",x_{i}_{d}");
        }
    }
    out.push('\n');
    for (t, x) in &traj.samples {
        out.push_str(&fmt_num(*t));
        for v in x {
            out.push(',');
            out.push_str(&fmt_num(*v));
        }
        out.push('\n');
    }
    out
}

fn slope_json(fit: &SlopeFit) -> String {
    format!(
        "{{\"slope\": {}, \"intercept\": {}, \"t_lo\": {}, \"t_hi\": {}, \"rms_residual\": {}}}\n",
        fmt_num(fit.slope),
        fmt_num(fit.intercept),
        fmt_num(fit.t_lo),
        fmt_num(fit.t_hi),
        fmt_num(fit.rms_residual)
    )
}

/// Minimal log-log SVG: the series as a polyline plus the fitted line.
fn series_svg(series: &ErrorSeries, fit: Option<&SlopeFit>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 50.0;
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, &v)| t > 0.0 && v > 0.0)
        .map(|(&t, &v)| (t.log10(), v.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    if pts.len() >= 2 {
        let (x_lo, x_hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        let (y_lo, y_hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.1), hi.max(p.1))
            });
        let xs = |x: f64| PAD + (x - x_lo) / (x_hi - x_lo).max(1e-300) * (W - 2.0 * PAD);
        let ys = |y: f64| H - PAD - (y - y_lo) / (y_hi - y_lo).max(1e-300) * (H - 2.0 * PAD);
        let _ = writeln!(
            svg,
            "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", xs(p.0), ys(p.1)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>",
            path.join(" ")
        );
        if let Some(f) = fit {
            let fx = [f.t_lo.log10(), f.t_hi.log10()];
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"crimson\" stroke-dasharray=\"6 3\"/>",
                xs(fx[0]),
                ys(f.slope * fx[0] + f.intercept),
                xs(fx[1]),
                ys(f.slope * fx[1] + f.intercept)
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\">slope {:.4}</text>",
                PAD + 8.0,
                PAD + 18.0,
                f.slope
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\">log10 t in [{:.2}, {:.2}], log10 {} in [{:.2}, {:.2}]</text>",
            PAD,
            H - PAD / 3.0,
            x_lo,
            x_hi,
            series.label,
            y_lo,
            y_hi
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Admissibility and scenario report.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub scenario: ScenarioClass,
    pub dwell_floor: f64,
    pub nonintegrable: bool,
    pub vanishing: bool,
    pub square_integrable: bool,
    pub admissible: bool,
    pub sigma2_star: f64,
    pub sigmam_star: f64,
}

impl CheckReport {
    pub fn render(&self) -> String {
        let window = match self.scenario {
            ScenarioClass::UniformlyJointlyConnected { window } => format!("{window}"),
            _ => "n/a".to_string(),
        };
        format!(
            "scenario: {}\njoint window T: {}\ndwell floor: {}\nassumption profile: nonintegrable={} vanishing={} square_integrable={}\nspectral floors: sigma2*={:.6e} sigmam*={:.6e}\nadmissible: {}\n",
            self.scenario.name(),
            window,
            self.dwell_floor,
            self.nonintegrable,
            self.vanishing,
            self.square_integrable,
            self.sigma2_star,
            self.sigmam_star,
            self.admissible
        )
    }
}

pub fn check(cfg: &ExperimentConfig) -> Result<CheckReport, RunnerError> {
    let resolved = cfg.resolve()?;
    let signal = resolved.system.signal();
    let scenario = signal.classify_scenario()?;
    let profile = resolved.system.schedule().assumption_profile();
    let admissible = resolved.system.schedule().admissible_for(&scenario)
        && scenario != ScenarioClass::Unsupported;
    let (sigma2_star, sigmam_star) = signal.spectral_floors(resolved.system.problem())?;
    Ok(CheckReport {
        scenario,
        dwell_floor: signal.dwell_floor(),
        nonintegrable: profile.nonintegrable,
        vanishing: profile.vanishing,
        square_integrable: profile.square_integrable,
        admissible,
        sigma2_star,
        sigmam_star,
    })
}

/// Outcome of one experiment run, with the artifact directory.
#[derive(Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub scenario: ScenarioClass,
    pub rate_prediction: Option<RatePrediction>,
    pub oracle_limit: Vec<f64>,
    pub terminal_time: f64,
    pub terminal_mean: Vec<f64>,
    pub terminal_consensus_error: f64,
    pub terminal_solution_error: f64,
    pub terminal_phi: f64,
    pub terminal_residual: f64,
    pub min_residual: f64,
    pub boundedness: f64,
    pub slope_consensus: Option<SlopeFit>,
    pub slope_solution: Option<SlopeFit>,
    pub slope_solution_logcorr: Option<SlopeFit>,
    pub files: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig, force: bool) -> Result<RunReport, RunnerError> {
    let report = check(cfg)?;
    if !report.admissible && !force {
        return Err(RunnerError::Inadmissible(format!(
            "scenario {} with the configured step size violates the convergence assumptions \
             (nonintegrable={}, vanishing={}, square_integrable={}); pass --force to run anyway",
            report.scenario.name(),
            report.nonintegrable,
            report.vanishing,
            report.square_integrable
        )));
    }

    let resolved = cfg.resolve()?;
    let problem = resolved.system.problem().clone();
    let ls = problem.least_squares_set(DEFAULT_RANK_TOL)?;
    let rate_prediction = problem.predict_rate(resolved.system.schedule()).ok();
    let oracle = limit_oracle(&problem, &resolved.x0, &ls)?;

    let traj = resolved
        .system
        .simulate(&resolved.x0, &resolved.spec, resolved.horizon)?;

    let consensus = metrics::consensus_error_series(&traj)?;
    let solution = metrics::solution_error(&traj, &ls)?;
    let phi = metrics::disagreement_series(&traj)?;
    let solution_logcorr = log_corrected(&solution);

    // asymptotic tail: the last two decades
    let (t_lo, t_hi) = (resolved.horizon / 100.0, resolved.horizon);
    let slope_consensus = fit_loglog_slope(&consensus, t_lo, t_hi).ok();
    let slope_solution = fit_loglog_slope(&solution, t_lo, t_hi).ok();
    let slope_solution_logcorr = fit_loglog_slope(&solution_logcorr, t_lo, t_hi).ok();

    let out_dir = PathBuf::from(&cfg.outputs.dir);
    fs::create_dir_all(&out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    let mut files = Vec::new();
    let emit = |name: &str, contents: String, files: &mut Vec<String>| {
        let path = out_dir.join(name);
        files.push(name.to_string());
        write_file(&path, &contents)
    };
    emit("trajectory.csv", trajectory_csv(&traj), &mut files)?;
    emit("consensus_error.csv", series_csv(&consensus), &mut files)?;
    emit("solution_error.csv", series_csv(&solution), &mut files)?;
    emit("phi.csv", series_csv(&phi), &mut files)?;
    emit(
        "solution_error_logcorr.csv",
        series_csv(&solution_logcorr),
        &mut files,
    )?;
    for (name, fit) in [
        ("slope_consensus.json", &slope_consensus),
        ("slope_solution.json", &slope_solution),
        ("slope_solution_logcorr.json", &slope_solution_logcorr),
    ] {
        if let Some(f) = fit {
            emit(name, slope_json(f), &mut files)?;
        }
    }
    if cfg.outputs.emit_svg {
        emit(
            "solution_error.svg",
            series_svg(&solution, slope_solution.as_ref()),
            &mut files,
        )?;
        emit(
            "consensus_error.svg",
            series_svg(&consensus, slope_consensus.as_ref()),
            &mut files,
        )?;
    }

    let terminal_mean =
        metrics::mean_state(&traj.terminal_state, traj.node_count, traj.unknown_dim)?;
    let terminal_consensus_error = consensus.terminal_value().unwrap_or(0.0);
    let terminal_solution_error = solution.terminal_value().unwrap_or(0.0);
    let terminal_phi = phi.terminal_value().unwrap_or(0.0);
    let terminal_residual = problem.cost(&terminal_mean)?;
    let boundedness = boundedness_monitor(&traj);

    let sigma_ratio = problem.sigma_ratio().ok();
    let fit_value = |f: &Option<SlopeFit>| {
        f.as_ref().map(|f| {
            json!({
                "slope": f.slope,
                "intercept": f.intercept,
                "t_lo": f.t_lo,
                "t_hi": f.t_hi,
                "rms_residual": f.rms_residual,
            })
        })
    };
    let manifest = json!({
        "label": cfg.label,
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "resolved_x0": resolved.x0,
        "scenario": report.scenario.name(),
        "joint_window": match report.scenario {
            ScenarioClass::UniformlyJointlyConnected { window } => Some(window),
            _ => None,
        },
        "dwell_floor": report.dwell_floor,
        "assumption_profile": {
            "nonintegrable": report.nonintegrable,
            "vanishing": report.vanishing,
            "square_integrable": report.square_integrable,
        },
        "admissible": report.admissible,
        "spectral_report": {
            "sigma_ratio": sigma_ratio,
            "sigma2_star": report.sigma2_star,
            "sigmam_star": report.sigmam_star,
        },
        "rate_prediction": rate_prediction.as_ref().map(|r| json!({
            "regime": format!("{:?}", r.regime),
            "expected_slope": r.regime.expected_slope(),
            "sigma_ratio": r.sigma_ratio,
        })),
        "oracle_limit": oracle,
        "terminal": {
            "time": traj.terminal_time,
            "mean_state": terminal_mean,
            "consensus_error": terminal_consensus_error,
            "solution_error": terminal_solution_error,
            "phi": terminal_phi,
            "residual": terminal_residual,
            "min_residual": ls.min_residual,
            "boundedness_monitor": boundedness,
        },
        "slopes": {
            "consensus": fit_value(&slope_consensus),
            "solution": fit_value(&slope_solution),
            "solution_logcorr": fit_value(&slope_solution_logcorr),
        },
        "files": files,
    });
    let mut manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_text.push('\n');
    emit("manifest.json", manifest_text, &mut files)?;

    Ok(RunReport {
        out_dir,
        scenario: report.scenario,
        rate_prediction,
        oracle_limit: oracle,
        terminal_time: traj.terminal_time,
        terminal_mean,
        terminal_consensus_error,
        terminal_solution_error,
        terminal_phi,
        terminal_residual,
        min_residual: ls.min_residual,
        boundedness,
        slope_consensus,
        slope_solution,
        slope_solution_logcorr,
        files,
    })
}

/// Re-fit a slope on an existing two-column error-series CSV.
pub fn analyze(csv_path: &Path, t_lo: f64, t_hi: f64) -> Result<SlopeFit, RunnerError> {
    if !(t_lo < t_hi) {
        return Err(RunnerError::Analyze("need t_lo < t_hi".into()));
    }
    let text = fs::read_to_string(csv_path).map_err(|source| RunnerError::Io {
        path: csv_path.display().to_string(),
        source,
    })?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line.starts_with('t') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let parse = |s: Option<&str>| -> Result<f64, RunnerError> {
            s.and_then(|v| v.trim().parse().ok()).ok_or_else(|| {
                RunnerError::Analyze(format!(
                    "{}:{}: expected `t,value`",
                    csv_path.display(),
                    lineno + 1
                ))
            })
        };
        times.push(parse(parts.next())?);
        values.push(parse(parts.next())?);
    }
    let series = ErrorSeries::new(times, values, "analyze")
        .map_err(|e| RunnerError::Analyze(e.to_string()))?;
    Ok(fit_loglog_slope(&series, t_lo, t_hi)?)
}
