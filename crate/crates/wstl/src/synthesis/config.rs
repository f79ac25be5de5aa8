//! JSON problem configuration and result file formats.
//!
//! A problem file looks like:
//!
//! ```json
//! {
//!   "system": {"type": "unicycle", "params": {"input_lo": [-2,-2], "input_hi": [2,2]}},
//!   "q0": [1.0, 1.0, 0.7853981633974483],
//!   "T": 20,
//!   "formula": "F[1,10] (x - 7 >= 0)",
//!   "lambda": 0.05,
//!   "engine": "weighted-smooth",
//!   "beta": 10.0,
//!   "epsilon": 0.0,
//!   "optimizer": {"restarts": 8, "max_iters": 500, "seed": 0}
//! }
//! ```
//!
//! `formula` is either formula text or the path of a formula file (UTF-8
//! text in the grammar, `#` comments allowed). `engine`, `beta`, `epsilon`,
//! `lambda`, and `optimizer` are optional; an omitted `epsilon` defaults to
//! the engine's suggested soundness margin.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::parser::{self, ParseError};
use crate::semantics::{Engine, SemanticsConfig};
use crate::util::{round_sig6, sig6};

use super::{
    Dynamics, SingleIntegrator, StageCost, SynthesisOptions, SynthesisProblem, SynthesisResult,
    Unicycle,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid problem config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Formula(#[from] ParseError),
    #[error("q0 has {found} entries, the {system} system has {expected}")]
    StateDimension {
        system: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("input bounds must be finite with lo < hi elementwise")]
    BadInputBounds,
}

fn default_engine() -> Engine {
    Engine::WeightedSmooth
}

fn default_beta() -> f64 {
    10.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub system: SystemConfig,
    pub q0: Vec<f64>,
    #[serde(rename = "T")]
    pub steps: usize,
    /// Formula text, or the path of a formula file.
    pub formula: String,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Soundness margin; defaults to the engine's suggestion for the formula.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Unicycle {
        #[serde(default)]
        params: UnicycleParams,
    },
    SingleIntegrator {
        #[serde(default)]
        params: IntegratorParams,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnicycleParams {
    #[serde(default = "UnicycleParams::default_lo")]
    pub input_lo: [f64; 2],
    #[serde(default = "UnicycleParams::default_hi")]
    pub input_hi: [f64; 2],
}

impl UnicycleParams {
    fn default_lo() -> [f64; 2] {
        [-2.0, -2.0]
    }

    fn default_hi() -> [f64; 2] {
        [2.0, 2.0]
    }
}

impl Default for UnicycleParams {
    fn default() -> Self {
        Self {
            input_lo: Self::default_lo(),
            input_hi: Self::default_hi(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorParams {
    /// Defaults to -1 per dimension.
    pub input_lo: Option<Vec<f64>>,
    /// Defaults to +1 per dimension.
    pub input_hi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default = "OptimizerConfig::default_restarts")]
    pub restarts: usize,
    #[serde(default = "OptimizerConfig::default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

impl OptimizerConfig {
    fn default_restarts() -> usize {
        8
    }

    fn default_max_iters() -> usize {
        500
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: Self::default_restarts(),
            max_iters: Self::default_max_iters(),
            seed: 0,
        }
    }
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Builds the problem and optimizer options. Relative formula file
    /// paths resolve against `base_dir`.
    pub fn build(
        &self,
        base_dir: Option<&Path>,
    ) -> Result<(SynthesisProblem, SynthesisOptions), ConfigError> {
        let system = self.build_system()?;
        if self.q0.len() != system.state_dim() {
            return Err(ConfigError::StateDimension {
                system: match self.system {
                    SystemConfig::Unicycle { .. } => "unicycle",
                    SystemConfig::SingleIntegrator { .. } => "single_integrator",
                },
                expected: system.state_dim(),
                found: self.q0.len(),
            });
        }
        let formula = load_formula_arg(&self.formula, base_dir)?;
        let mut config = SemanticsConfig::new(self.engine).with_beta(self.beta);
        config.epsilon = self
            .epsilon
            .unwrap_or_else(|| config.suggested_epsilon(&formula));
        let problem = SynthesisProblem {
            system,
            q0: self.q0.clone(),
            steps: self.steps,
            formula,
            lambda: self.lambda,
            cost: StageCost::Quadratic,
            config,
        };
        let options = SynthesisOptions {
            restarts: self.optimizer.restarts,
            max_iters: self.optimizer.max_iters,
            seed: self.optimizer.seed,
            ..Default::default()
        };
        Ok((problem, options))
    }

    fn build_system(&self) -> Result<Arc<dyn Dynamics>, ConfigError> {
        let check = |lo: &[f64], hi: &[f64]| {
            let ok = lo
                .iter()
                .zip(hi)
                .all(|(l, h)| l.is_finite() && h.is_finite() && l < h);
            if ok {
                Ok(())
            } else {
                Err(ConfigError::BadInputBounds)
            }
        };
        match &self.system {
            SystemConfig::Unicycle { params } => {
                check(&params.input_lo, &params.input_hi)?;
                Ok(Arc::new(Unicycle {
                    input_lo: params.input_lo,
                    input_hi: params.input_hi,
                }))
            }
            SystemConfig::SingleIntegrator { params } => {
                let dim = self.q0.len().max(1);
                let lo = params.input_lo.clone().unwrap_or_else(|| vec![-1.0; dim]);
                let hi = params.input_hi.clone().unwrap_or_else(|| vec![1.0; dim]);
                if lo.len() != dim || hi.len() != dim {
                    return Err(ConfigError::BadInputBounds);
                }
                check(&lo, &hi)?;
                Ok(Arc::new(SingleIntegrator::new(dim, lo, hi)))
            }
        }
    }
}

/// Interprets a CLI/config formula argument: the path of an existing file
/// is read (resolving relative paths against `base_dir`), anything else is
/// parsed as formula text.
pub fn load_formula_arg(arg: &str, base_dir: Option<&Path>) -> Result<Formula, ConfigError> {
    let direct = Path::new(arg);
    let resolved = if direct.is_relative() {
        base_dir.map(|d| d.join(direct))
    } else {
        None
    };
    let path = if direct.is_file() {
        Some(direct.to_path_buf())
    } else {
        resolved.filter(|p| p.is_file())
    };
    let text = match path {
        Some(path) => std::fs::read_to_string(&path)
            .map_err(|source| ConfigError::Io { path, source })?,
        None => arg.to_string(),
    };
    Ok(parser::parse(&text)?)
}

/// Trajectory CSV: `t`, the state components, then the inputs applied at
/// each step (empty on the final row, which has no input).
pub fn trajectory_csv(system: &dyn Dynamics, result: &SynthesisResult) -> String {
    let mut out = String::new();
    out.push('t');
    for name in system.state_names() {
        out.push(',');
        out.push_str(&name);
    }
    for name in system.input_names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for t in 0..result.trajectory.len() {
        out.push_str(&t.to_string());
        for value in result.trajectory.sample(t) {
            out.push(',');
            out.push_str(&sig6(*value));
        }
        if t < result.inputs.len() {
            for value in &result.inputs[t] {
                out.push(',');
                out.push_str(&sig6(*value));
            }
        } else {
            for _ in 0..system.input_dim() {
                out.push(',');
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Summary {
    objective: f64,
    robustness_smooth: f64,
    robustness_exact: f64,
    satisfied: crate::semantics::Verdict,
    iterations: usize,
    wall_time_ms: u64,
}

/// Summary JSON with numeric fields rounded to 6 significant digits.
pub fn summary_json(result: &SynthesisResult) -> String {
    let summary = Summary {
        objective: round_sig6(result.objective),
        robustness_smooth: round_sig6(result.robustness_smooth),
        robustness_exact: round_sig6(result.robustness_exact),
        satisfied: result.satisfied,
        iterations: result.iterations,
        wall_time_ms: result.wall_time.as_millis() as u64,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable summary");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_config() {
        let cfg = ProblemConfig::from_json(
            r#"{
                "system": {"type": "unicycle"},
                "q0": [1, 1, 0.7853981633974483],
                "T": 20,
                "formula": "G[0,20] (x >= 0)"
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.engine, Engine::WeightedSmooth);
        assert_eq!(cfg.beta, 10.0);
        let (problem, options) = cfg.build(None).unwrap();
        assert_eq!(problem.steps, 20);
        assert_eq!(problem.system.input_dim(), 2);
        assert_eq!(options.restarts, 8);
        assert_eq!(options.max_iters, 500);
        // epsilon defaults to ln(max arity)/beta for the smooth engine
        assert!((problem.config.epsilon - (21f64).ln() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_dimensions() {
        assert!(ProblemConfig::from_json(
            r#"{"system": {"type": "unicycle"}, "q0": [0,0,0], "T": 5,
                "formula": "x >= 0", "zap": 1}"#,
        )
        .is_err());

        let cfg = ProblemConfig::from_json(
            r#"{"system": {"type": "unicycle"}, "q0": [0, 0], "T": 5, "formula": "x >= 0"}"#,
        )
        .unwrap();
        assert!(matches!(
            cfg.build(None),
            Err(ConfigError::StateDimension { expected: 3, found: 2, .. })
        ));
    }

    #[test]
    fn integrator_dimension_follows_q0() {
        let cfg = ProblemConfig::from_json(
            r#"{"system": {"type": "single_integrator",
                           "params": {"input_lo": [-2,-2], "input_hi": [2,2]}},
                "q0": [0.5, 1.0], "T": 7, "formula": "x >= 0", "engine": "weighted-smooth"}"#,
        )
        .unwrap();
        let (problem, _) = cfg.build(None).unwrap();
        assert_eq!(problem.system.state_dim(), 2);
        assert_eq!(problem.system.state_names(), vec!["x", "y"]);
    }
}
