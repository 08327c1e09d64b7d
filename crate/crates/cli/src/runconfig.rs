//! JSON run configuration: schema, validation, figure presets, and the
//! mapping onto the simulator types.

use serde::{Deserialize, Serialize};

use jumpfb::dynamics::DensityMatrix;
use jumpfb::operators::{basis, ket, singlet_ket, Feedback, StateVector};
use jumpfb::sweeps::{AxisSpec, Quantity};
use jumpfb::{C64, SystemConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Steady,
    Evolve,
    Traj,
    Sweep,
    Figure,
}

impl Mode {
    pub fn parse(name: &str) -> Result<Mode, CliError> {
        match name {
            "steady" => Ok(Mode::Steady),
            "evolve" => Ok(Mode::Evolve),
            "traj" => Ok(Mode::Traj),
            "sweep" => Ok(Mode::Sweep),
            "figure" => Ok(Mode::Figure),
            other => Err(CliError::Config(format!(
                "unknown subcommand '{other}' (expected steady, evolve, traj, sweep, figure)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Steady => "steady",
            Mode::Evolve => "evolve",
            Mode::Traj => "traj",
            Mode::Sweep => "sweep",
            Mode::Figure => "figure",
        }
    }
}

fn default_gamma_collective() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_gamma_collective")]
    pub gamma_collective: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub gamma_deph: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            omega: 0.0,
            gamma_collective: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma_deph: 0.0,
            eta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackConfig {
    #[serde(default)]
    pub kind: FeedbackKind,
    #[serde(default)]
    pub lambda: f64,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        FeedbackConfig { kind: FeedbackKind::None, lambda: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackKind {
    #[default]
    None,
    Collective,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Named(String),
    /// 4x4 complex matrix, each entry as `[re, im]`.
    Matrix(Box<[[[f64; 2]; 4]; 4]>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Named("gg".to_string())
    }
}

fn default_t_final() -> f64 {
    50.0
}
fn default_samples() -> usize {
    201
}
fn default_dt() -> f64 {
    0.005
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Trajectory step; deterministic evolution chooses its own step.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_final: default_t_final(),
            samples: default_samples(),
            dt: default_dt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl From<AxisConfig> for AxisSpec {
    fn from(axis: AxisConfig) -> AxisSpec {
        AxisSpec { min: axis.min, max: axis.max, count: axis.count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QuantityConfig {
    #[default]
    Concurrence,
    Fidelity,
    Purity,
}

impl From<QuantityConfig> for Quantity {
    fn from(q: QuantityConfig) -> Quantity {
        match q {
            QuantityConfig::Concurrence => Quantity::SteadyConcurrence,
            QuantityConfig::Fidelity => Quantity::SteadyFidelity,
            QuantityConfig::Purity => Quantity::SteadyPurity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub omega_axis: AxisConfig,
    pub lambda_axis: AxisConfig,
    #[serde(default)]
    pub quantity: QuantityConfig,
}

fn default_n() -> usize {
    2000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Required: randomized runs never fall back to a time-based seed.
    #[serde(default)]
    pub base_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: String,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

/// The full run configuration. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub feedback: FeedbackConfig,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<TrajectoriesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn system_config(&self) -> Result<SystemConfig, CliError> {
        let feedback = match self.feedback.kind {
            FeedbackKind::None => Feedback::None,
            FeedbackKind::Collective => Feedback::Collective { lambda: self.feedback.lambda },
            FeedbackKind::Local => Feedback::Local { lambda: self.feedback.lambda },
        };
        let config = SystemConfig {
            omega: self.physics.omega,
            gamma_collective: self.physics.gamma_collective,
            gamma1: self.physics.gamma1,
            gamma2: self.physics.gamma2,
            gamma_deph: self.physics.gamma_deph,
            eta: self.physics.eta,
            feedback,
        };
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn initial_density(&self) -> Result<DensityMatrix, CliError> {
        match &self.initial_state {
            InitialState::Named(name) => match name.as_str() {
                "gg" => Ok(DensityMatrix::ground()),
                "ee" => Ok(DensityMatrix::doubly_excited()),
                "singlet" => Ok(DensityMatrix::singlet()),
                "mixed" => Ok(DensityMatrix::maximally_mixed()),
                other => Err(CliError::Config(format!(
                    "unknown initial_state '{other}' (expected gg, ee, singlet, mixed, or a matrix)"
                ))),
            },
            InitialState::Matrix(rows) => {
                let m = jumpfb::nalgebra::Matrix4::from_fn(|i, j| {
                    C64::new(rows[i][j][0], rows[i][j][1])
                });
                DensityMatrix::new(m).map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    /// Pure initial state for trajectory runs. Named pure states are used
    /// directly; an explicit matrix must be a projector.
    pub fn initial_pure(&self) -> Result<StateVector, CliError> {
        match &self.initial_state {
            InitialState::Named(name) => match name.as_str() {
                "gg" => Ok(ket(basis::GG)),
                "ee" => Ok(ket(basis::EE)),
                "singlet" => Ok(singlet_ket()),
                other => Err(CliError::Config(format!(
                    "trajectory runs need a pure initial state, got '{other}'"
                ))),
            },
            InitialState::Matrix(_) => {
                let rho = self.initial_density()?;
                let (weight, psi) = rho.dominant_eigenvector();
                if weight < 1.0 - 1e-9 {
                    return Err(CliError::Config(format!(
                        "trajectory runs need a pure initial state (largest eigenvalue {weight})"
                    )));
                }
                Ok(psi)
            }
        }
    }
}

/// Fully specified configurations reproducing the published data sets.
///
/// `2a`-`2d` are steady-state surfaces over driving and feedback strength;
/// `3` and `4` are time-series bundles (decay robustness and detection
/// efficiency). The runner expands the bundles into labeled series.
pub fn figure_presets(name: &str) -> Result<RunConfig, CliError> {
    let pi = std::f64::consts::PI;
    let half_pi = std::f64::consts::FRAC_PI_2;
    // dense enough to resolve the narrow low-omega structure of the
    // collective surfaces; odd counts put gridlines on lambda = 0, +-pi/2
    let surface_axes = SweepConfig {
        omega_axis: AxisConfig { min: 0.01, max: 3.0, count: 121 },
        lambda_axis: AxisConfig { min: -pi, max: pi, count: 121 },
        quantity: QuantityConfig::Concurrence,
    };
    let base = |figure: &str| RunConfig {
        mode: Mode::Figure,
        physics: Physics::default(),
        feedback: FeedbackConfig::default(),
        initial_state: InitialState::default(),
        time: TimeConfig::default(),
        sweep: None,
        trajectories: None,
        figure: Some(figure.to_string()),
        output: OutputConfig {
            path: format!("figure_{figure}.csv"),
            format: OutputFormat::Csv,
        },
    };
    let surface = |figure: &str, kind: FeedbackKind, gamma: f64| {
        let mut config = base(figure);
        config.physics.gamma1 = gamma;
        config.physics.gamma2 = gamma;
        config.feedback = FeedbackConfig { kind, lambda: 1.0 };
        config.sweep = Some(surface_axes);
        config
    };
    match name {
        "2a" => Ok(surface("2a", FeedbackKind::Collective, 0.0)),
        "2b" => Ok(surface("2b", FeedbackKind::Collective, 0.01)),
        "2c" => Ok(surface("2c", FeedbackKind::Local, 0.0)),
        "2d" => Ok(surface("2d", FeedbackKind::Local, 0.01)),
        "3" => {
            let mut config = base("3");
            config.physics.omega = 3.0;
            config.feedback = FeedbackConfig { kind: FeedbackKind::Local, lambda: half_pi };
            config.initial_state = InitialState::Named("singlet".to_string());
            config.time = TimeConfig { t_final: 300.0, samples: 301, dt: default_dt() };
            Ok(config)
        }
        "4" => {
            let mut config = base("4");
            config.physics.omega = 0.4;
            config.feedback = FeedbackConfig { kind: FeedbackKind::Local, lambda: half_pi };
            config.initial_state = InitialState::Named("gg".to_string());
            config.time = TimeConfig { t_final: 200.0, samples: 401, dt: default_dt() };
            Ok(config)
        }
        other => Err(CliError::Config(format!(
            "unknown figure '{other}' (expected 2a, 2b, 2c, 2d, 3, 4)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_idempotent() {
        let text = r#"{
            "mode": "steady",
            "physics": {"omega": 0.4, "eta": 1.0},
            "feedback": {"kind": "local", "lambda": 1.5707963267948966},
            "initial_state": "gg",
            "output": {"path": "out.csv"}
        }"#;
        let first: RunConfig = serde_json::from_str(text).unwrap();
        let serialized = serde_json::to_string_pretty(&first).unwrap();
        let second: RunConfig = serde_json::from_str(&serialized).unwrap();
        let serialized_again = serde_json::to_string_pretty(&second).unwrap();
        assert_eq!(serialized, serialized_again);
        assert_eq!(first, second);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"mode": "steady", "outpt": {"path": "x.csv"}, "output": {"path": "x.csv"}}"#;
        assert!(serde_json::from_str::<RunConfig>(text).is_err());
        let nested = r#"{"mode": "steady", "physics": {"omge": 1.0}, "output": {"path": "x.csv"}}"#;
        assert!(serde_json::from_str::<RunConfig>(nested).is_err());
    }

    #[test]
    fn matrix_initial_state_parses() {
        let text = r#"{
            "mode": "evolve",
            "initial_state": [
                [[0.5,0],[0,0],[0,0],[0,0]],
                [[0,0],[0.5,0],[0,0],[0,0]],
                [[0,0],[0,0],[0,0],[0,0]],
                [[0,0],[0,0],[0,0],[0,0]]
            ],
            "output": {"path": "x.csv"}
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        let rho = config.initial_density().unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn preset_operating_points() {
        assert_eq!(figure_presets("3").unwrap().physics.omega, 3.0);
        assert_eq!(figure_presets("4").unwrap().physics.omega, 0.4);
        let fig2c = figure_presets("2c").unwrap();
        assert_eq!(fig2c.physics.gamma1, 0.0);
        assert_eq!(fig2c.physics.gamma2, 0.0);
        assert_eq!(fig2c.feedback.kind, FeedbackKind::Local);
        let fig2b = figure_presets("2b").unwrap();
        assert_eq!(fig2b.physics.gamma1, 0.01);
        assert!(figure_presets("5").is_err());
    }

    #[test]
    fn traj_initial_state_must_be_pure() {
        let mut config = figure_presets("4").unwrap();
        config.initial_state = InitialState::Named("mixed".to_string());
        assert!(config.initial_pure().is_err());
        config.initial_state = InitialState::Named("singlet".to_string());
        assert!(config.initial_pure().is_ok());
    }
}
