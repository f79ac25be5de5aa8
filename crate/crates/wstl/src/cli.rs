//! Command line front end.
//!
//! Verdict-producing commands exit with 0 for `Yes`, 1 for `No`, and 2 for
//! `Inconclusive`; usage errors exit 64 and data or evaluation errors 65.
//! Numeric output uses 6 significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::builder::PossibleValue;
use clap::{Parser, Subcommand};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::formula::PredicateMode;
use crate::parser;
use crate::semantics::{self, Engine, SemanticsConfig};
use crate::signal::Signal;
use crate::synthesis::config::{load_formula_arg, summary_json, trajectory_csv, ProblemConfig};
use crate::synthesis::{self, GradMode};
use crate::util::sig6;

const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;

impl clap::ValueEnum for Engine {
    fn value_variants<'a>() -> &'a [Self] {
        &[
            Engine::Traditional,
            Engine::WeightedTraditional,
            Engine::WeightedAgm,
            Engine::WeightedSmooth,
        ]
    }

    fn to_possible_value(&self) -> Option<PossibleValue> {
        Some(PossibleValue::new(self.name()))
    }
}

/// Predicate mode flag: `metric`, `bool`, `bool:<magnitude>`, or
/// `scale:<factor>`.
#[derive(Debug, Clone, Copy)]
struct PredicateModeArg(PredicateMode);

impl FromStr for PredicateModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = match s.split_once(':') {
            Some((kind, value)) => {
                let value: f64 = value
                    .parse()
                    .map_err(|_| format!("`{value}` is not a number"))?;
                if !value.is_finite() || value <= 0.0 {
                    return Err(format!("parameter `{value}` must be strictly positive"));
                }
                (kind, Some(value))
            }
            None => (s, None),
        };
        match kind {
            "metric" => Ok(Self(PredicateMode::Metric {
                scale: value.unwrap_or(1.0),
            })),
            "bool" => Ok(Self(PredicateMode::Boolean {
                magnitude: value.unwrap_or(1.0),
            })),
            "scale" => match value {
                Some(scale) => Ok(Self(PredicateMode::Metric { scale })),
                None => Err("`scale` needs a factor, e.g. `scale:0.5`".to_string()),
            },
            other => Err(format!(
                "unknown predicate mode `{other}` (expected metric, bool[:c], or scale:k)"
            )),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "wstl",
    version,
    about = "Weighted signal temporal logic: monitoring, ranking, and control synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on a signal and report robustness and verdict
    Monitor {
        /// Formula text, or the path of a formula file
        formula: String,
        /// Signal CSV file (header of component names, one row per step)
        signal: PathBuf,
        #[arg(long, default_value = "weighted-traditional")]
        engine: Engine,
        /// Sharpness of the smooth engine
        #[arg(long, default_value_t = 10.0)]
        beta: f64,
        /// Verdict dead-band; defaults to the engine's soundness margin
        #[arg(long)]
        epsilon: Option<f64>,
        /// Evaluation time index
        #[arg(long, default_value_t = 0)]
        t: usize,
        /// Write per-node robustness JSON to this file (`-` for stdout)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Override every predicate mode: metric, bool[:c], or scale:k
        #[arg(long)]
        predicate_mode: Option<PredicateModeArg>,
    },
    /// Rank signals by robustness, best first
    Compare {
        /// Formula text, or the path of a formula file
        formula: String,
        /// Signal CSV files
        #[arg(required = true)]
        signals: Vec<PathBuf>,
        #[arg(long, default_value = "weighted-traditional")]
        engine: Engine,
        #[arg(long, default_value_t = 10.0)]
        beta: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        predicate_mode: Option<PredicateModeArg>,
    },
    /// Maximize smooth weighted robustness minus input cost
    Synthesize {
        /// Problem configuration JSON
        config: PathBuf,
        /// Directory for trajectory.csv and summary.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Compare analytic and finite-difference objective gradients
    Gradcheck {
        /// Problem configuration JSON
        config: PathBuf,
        /// Finite-difference step
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
    },
    /// Parse a formula and echo its canonical form
    Parse {
        /// Formula text, or the path of a formula file
        formula: String,
        /// Also dump the syntax tree
        #[arg(long)]
        print_ast: bool,
    },
}

/// Entry point for the binary: real stdio, exit code returned.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    run(args, &mut out, &mut err)
}

/// Runs the CLI against explicit streams and returns the exit code.
pub fn run<O: Write, E: Write>(args: Vec<String>, out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

type CliResult = Result<i32, Box<dyn std::error::Error>>;

fn dispatch<O: Write, E: Write>(command: Command, out: &mut O, err: &mut E) -> CliResult {
    match command {
        Command::Monitor {
            formula,
            signal,
            engine,
            beta,
            epsilon,
            t,
            trace,
            predicate_mode,
        } => {
            let formula = load_formula_arg(&formula, None)?;
            let signal = Signal::from_csv(&read(&signal)?)?;
            let mut cfg = SemanticsConfig::new(engine).with_beta(beta);
            cfg.predicate_mode = predicate_mode.map(|m| m.0);
            cfg.epsilon = match epsilon {
                Some(e) => e,
                None => {
                    let suggested = cfg.suggested_epsilon(&formula);
                    if engine == Engine::WeightedSmooth {
                        writeln!(
                            err,
                            "warning: smooth-engine verdicts are sound only outside the \
                             approximation margin; using epsilon = {}",
                            sig6(suggested)
                        )?;
                    }
                    suggested
                }
            };
            let report = semantics::evaluate_report(&formula, &signal, t, &cfg, trace.is_some())?;
            writeln!(out, "{}", sig6(report.value))?;
            writeln!(out, "{}", report.satisfied)?;
            if let Some(path) = trace {
                let mut json = serde_json::to_string_pretty(report.trace.as_ref().unwrap())?;
                json.push('\n');
                if path.as_os_str() == "-" {
                    write!(out, "{json}")?;
                } else {
                    fs::write(&path, json)?;
                }
            }
            Ok(report.satisfied.exit_code())
        }
        Command::Compare {
            formula,
            signals,
            engine,
            beta,
            epsilon,
            predicate_mode,
        } => {
            let formula = load_formula_arg(&formula, None)?;
            let mut cfg = SemanticsConfig::new(engine).with_beta(beta);
            cfg.predicate_mode = predicate_mode.map(|m| m.0);
            cfg.epsilon = epsilon.unwrap_or_else(|| cfg.suggested_epsilon(&formula));
            let mut loaded = Vec::with_capacity(signals.len());
            for path in &signals {
                loaded.push(Signal::from_csv(&read(path)?)?);
            }
            let ranked = semantics::rank_signals(&formula, &loaded, &cfg)?;
            for (rank, (index, value)) in ranked.iter().enumerate() {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    rank + 1,
                    signals[*index].display(),
                    sig6(*value),
                    semantics::Verdict::from_value(*value, cfg.epsilon)
                )?;
            }
            let top = semantics::Verdict::from_value(ranked[0].1, cfg.epsilon);
            Ok(top.exit_code())
        }
        Command::Synthesize { config, out_dir } => {
            let problem_config = ProblemConfig::load(&config)?;
            let (problem, options) = problem_config.build(config.parent())?;
            if problem.config.engine != Engine::WeightedSmooth {
                return Err(format!(
                    "synthesize requires the weighted-smooth engine, got `{}`",
                    problem.config.engine
                )
                .into());
            }
            let result = synthesis::synthesize(&problem, &options)?;
            fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join("trajectory.csv");
            let json_path = out_dir.join("summary.json");
            fs::write(&csv_path, trajectory_csv(problem.system.as_ref(), &result))?;
            fs::write(&json_path, summary_json(&result))?;
            writeln!(out, "objective\t{}", sig6(result.objective))?;
            writeln!(out, "robustness_smooth\t{}", sig6(result.robustness_smooth))?;
            writeln!(out, "robustness_exact\t{}", sig6(result.robustness_exact))?;
            writeln!(out, "satisfied\t{}", result.satisfied)?;
            writeln!(out, "iterations\t{}", result.iterations)?;
            writeln!(
                out,
                "outputs\t{}\t{}",
                csv_path.display(),
                json_path.display()
            )?;
            Ok(result.satisfied.exit_code())
        }
        Command::Gradcheck { config, h } => {
            let problem_config = ProblemConfig::load(&config)?;
            let (problem, options) = problem_config.build(config.parent())?;
            if problem.config.engine != Engine::WeightedSmooth {
                return Err(format!(
                    "gradcheck requires the weighted-smooth engine, got `{}`",
                    problem.config.engine
                )
                .into());
            }
            let system = problem.system.as_ref();
            let (lo, hi) = (system.input_lo(), system.input_hi());
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let inputs: Vec<Vec<f64>> = (0..problem.steps)
                .map(|_| {
                    (0..system.input_dim())
                        .map(|k| rng.random_range(lo[k]..=hi[k]))
                        .collect()
                })
                .collect();
            let analytic = synthesis::gradient(&problem, &inputs, GradMode::Analytic)?;
            let fd = synthesis::gradient(&problem, &inputs, GradMode::FiniteDifference { h })?;
            let deviation = analytic
                .iter()
                .flatten()
                .zip(fd.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            writeln!(out, "max |analytic - finite difference|\t{}", sig6(deviation))?;
            Ok(0)
        }
        Command::Parse { formula, print_ast } => {
            let formula = load_formula_arg(&formula, None)?;
            writeln!(out, "{}", parser::print(&formula))?;
            if print_ast {
                writeln!(out, "{formula:#?}")?;
            }
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String, Box<dyn std::error::Error>> {
    fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()).into())
}
