//! Control synthesis for discrete-time systems by weighted robustness
//! maximization.
//!
//! Given a system `q(t+1) = f(q(t), u(t))`, an initial state, a horizon `T`,
//! and a weighted formula over the state trajectory, [`synthesize`] searches
//! for the input sequence maximizing
//!
//! ```text
//! smooth weighted robustness(formula, trajectory) - lambda * J(u)
//! ```
//!
//! with multi-start projected gradient ascent: inputs stay inside the box
//! `U` by clipping, step sizes come from a backtracking line search, and the
//! gradient is computed analytically by reverse accumulation through the
//! smooth robustness recursion and the dynamics. Infeasible specifications
//! are not an error: the best (minimally violating) result is returned with
//! `satisfied == No`.

pub mod config;
mod grad;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::formula::Formula;
use crate::semantics::{self, Engine, EvalError, SemanticsConfig, Verdict};
use crate::signal::{Signal, SignalError};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("input component {dim} at step {t} lies outside the input box")]
    InputOutOfBounds { t: usize, dim: usize },
    #[error("analytic gradients need the weighted-smooth engine, got `{0}`")]
    NonSmoothEngine(Engine),
    #[error("input sequence has {found} steps, expected {expected}")]
    WrongInputLength { expected: usize, found: usize },
    #[error("initial state has {found} entries, the system has {expected}")]
    WrongStateDimension { expected: usize, found: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("trajectory is not a valid signal: {0}")]
    Signal(#[from] SignalError),
}

/// A deterministic discrete-time control system with box input constraints.
///
/// State component names bind trajectory samples to formula predicates.
/// The Jacobian methods default to central finite differences on [`step`];
/// built-in systems override them analytically.
///
/// [`step`]: Dynamics::step
pub trait Dynamics: Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn state_names(&self) -> Vec<String>;
    fn input_names(&self) -> Vec<String>;
    fn input_lo(&self) -> Vec<f64>;
    fn input_hi(&self) -> Vec<f64>;
    fn step(&self, state: &[f64], input: &[f64]) -> Vec<f64>;

    /// Row-major `n x n` matrix `d step_i / d state_j`.
    fn jac_state(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let n = self.state_dim();
        let mut jac = vec![0.0; n * n];
        let h = 1e-6;
        let mut probe = state.to_vec();
        for j in 0..n {
            probe[j] = state[j] + h;
            let plus = self.step(&probe, input);
            probe[j] = state[j] - h;
            let minus = self.step(&probe, input);
            probe[j] = state[j];
            for i in 0..n {
                jac[i * n + j] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        jac
    }

    /// Row-major `n x m` matrix `d step_i / d input_k`.
    fn jac_input(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut jac = vec![0.0; n * m];
        let h = 1e-6;
        let mut probe = input.to_vec();
        for k in 0..m {
            probe[k] = input[k] + h;
            let plus = self.step(state, &probe);
            probe[k] = input[k] - h;
            let minus = self.step(state, &probe);
            probe[k] = input[k];
            for i in 0..n {
                jac[i * m + k] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        jac
    }
}

/// Planar unicycle:
///
/// ```text
/// x(t+1) = x(t) + cos(th(t)) v(t)
/// y(t+1) = y(t) + sin(th(t)) v(t)
/// th(t+1) = th(t) + v(t) w(t)
/// ```
///
/// with input `u = [v, w]`. State components are named `x`, `y`, `θ`.
#[derive(Debug, Clone)]
pub struct Unicycle {
    pub input_lo: [f64; 2],
    pub input_hi: [f64; 2],
}

impl Default for Unicycle {
    fn default() -> Self {
        Self {
            input_lo: [-2.0, -2.0],
            input_hi: [2.0, 2.0],
        }
    }
}

impl Dynamics for Unicycle {
    fn state_dim(&self) -> usize {
        3
    }

    fn input_dim(&self) -> usize {
        2
    }

    fn state_names(&self) -> Vec<String> {
        vec!["x".into(), "y".into(), "θ".into()]
    }

    fn input_names(&self) -> Vec<String> {
        vec!["v".into(), "w".into()]
    }

    fn input_lo(&self) -> Vec<f64> {
        self.input_lo.to_vec()
    }

    fn input_hi(&self) -> Vec<f64> {
        self.input_hi.to_vec()
    }

    fn step(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let (x, y, th) = (state[0], state[1], state[2]);
        let (v, w) = (input[0], input[1]);
        vec![x + th.cos() * v, y + th.sin() * v, th + v * w]
    }

    fn jac_state(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let th = state[2];
        let v = input[0];
        vec![
            1.0, 0.0, -th.sin() * v, //
            0.0, 1.0, th.cos() * v, //
            0.0, 0.0, 1.0,
        ]
    }

    fn jac_input(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        let th = state[2];
        let (v, w) = (input[0], input[1]);
        vec![
            th.cos(), 0.0, //
            th.sin(), 0.0, //
            w, v,
        ]
    }
}

/// `q(t+1) = q(t) + u(t)` in any dimension.
#[derive(Debug, Clone)]
pub struct SingleIntegrator {
    dim: usize,
    input_lo: Vec<f64>,
    input_hi: Vec<f64>,
}

impl SingleIntegrator {
    pub fn new(dim: usize, input_lo: Vec<f64>, input_hi: Vec<f64>) -> Self {
        assert!(dim >= 1 && input_lo.len() == dim && input_hi.len() == dim);
        Self {
            dim,
            input_lo,
            input_hi,
        }
    }

    /// Uniform bounds `[-bound, bound]` on every input component.
    pub fn symmetric(dim: usize, bound: f64) -> Self {
        Self::new(dim, vec![-bound; dim], vec![bound; dim])
    }
}

impl Dynamics for SingleIntegrator {
    fn state_dim(&self) -> usize {
        self.dim
    }

    fn input_dim(&self) -> usize {
        self.dim
    }

    fn state_names(&self) -> Vec<String> {
        match self.dim {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            n => (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    fn input_names(&self) -> Vec<String> {
        self.state_names().iter().map(|n| format!("u{n}")).collect()
    }

    fn input_lo(&self) -> Vec<f64> {
        self.input_lo.clone()
    }

    fn input_hi(&self) -> Vec<f64> {
        self.input_hi.clone()
    }

    fn step(&self, state: &[f64], input: &[f64]) -> Vec<f64> {
        state.iter().zip(input).map(|(q, u)| q + u).collect()
    }

    fn jac_state(&self, _state: &[f64], _input: &[f64]) -> Vec<f64> {
        identity(self.dim)
    }

    fn jac_input(&self, _state: &[f64], _input: &[f64]) -> Vec<f64> {
        identity(self.dim)
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// A user-supplied stage cost of `(input, state)`.
pub type StageCostFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Per-step cost summed over `t = 0..T`.
#[derive(Clone)]
pub enum StageCost {
    /// `1/2 ||u(t)||^2`.
    Quadratic,
    /// Arbitrary stage cost; its gradient is taken by finite differences.
    Custom(StageCostFn),
}

impl std::fmt::Debug for StageCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StageCost::Quadratic => f.write_str("Quadratic"),
            StageCost::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Everything that defines one synthesis instance.
#[derive(Clone)]
pub struct SynthesisProblem {
    pub system: Arc<dyn Dynamics>,
    pub q0: Vec<f64>,
    /// Number of inputs `T`; the trajectory has `T + 1` samples.
    pub steps: usize,
    pub formula: Formula,
    /// Robustness / cost trade-off weight.
    pub lambda: f64,
    pub cost: StageCost,
    /// Engine must be the smooth one for analytic gradients and synthesis.
    pub config: SemanticsConfig,
}

impl std::fmt::Debug for SynthesisProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SynthesisProblem")
            .field("q0", &self.q0)
            .field("steps", &self.steps)
            .field("lambda", &self.lambda)
            .field("cost", &self.cost)
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl SynthesisProblem {
    pub fn new(
        system: Arc<dyn Dynamics>,
        q0: Vec<f64>,
        steps: usize,
        formula: Formula,
        lambda: f64,
    ) -> Self {
        Self {
            system,
            q0,
            steps,
            formula,
            lambda,
            cost: StageCost::Quadratic,
            config: SemanticsConfig::new(Engine::WeightedSmooth),
        }
    }
}

/// Rolls the system forward: sample 0 is `q0`, sample `t+1` is
/// `step(sample t, u(t))`. Inputs must lie inside the input box.
pub fn simulate(
    system: &dyn Dynamics,
    q0: &[f64],
    inputs: &[Vec<f64>],
) -> Result<Signal, SynthesisError> {
    if q0.len() != system.state_dim() {
        return Err(SynthesisError::WrongStateDimension {
            expected: system.state_dim(),
            found: q0.len(),
        });
    }
    let lo = system.input_lo();
    let hi = system.input_hi();
    for (t, input) in inputs.iter().enumerate() {
        if input.len() != system.input_dim() {
            return Err(SynthesisError::WrongInputLength {
                expected: system.input_dim(),
                found: input.len(),
            });
        }
        for (dim, u) in input.iter().enumerate() {
            if !(lo[dim]..=hi[dim]).contains(u) {
                return Err(SynthesisError::InputOutOfBounds { t, dim });
            }
        }
    }
    simulate_unchecked(system, q0, inputs)
}

/// Simulation without the input box check, for finite-difference probes
/// that step just past the boundary.
pub(crate) fn simulate_unchecked(
    system: &dyn Dynamics,
    q0: &[f64],
    inputs: &[Vec<f64>],
) -> Result<Signal, SynthesisError> {
    let mut samples = Vec::with_capacity(inputs.len() + 1);
    samples.push(q0.to_vec());
    for input in inputs {
        let next = system.step(samples.last().unwrap(), input);
        samples.push(next);
    }
    Ok(Signal::new(system.state_names(), samples)?)
}

/// `robustness(formula, trajectory) - lambda * J(u)` under the problem's
/// engine.
pub fn objective(problem: &SynthesisProblem, inputs: &[Vec<f64>]) -> Result<f64, SynthesisError> {
    let trajectory = simulate(problem.system.as_ref(), &problem.q0, inputs)?;
    objective_on(problem, inputs, &trajectory)
}

fn objective_unchecked(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
) -> Result<f64, SynthesisError> {
    let trajectory = simulate_unchecked(problem.system.as_ref(), &problem.q0, inputs)?;
    objective_on(problem, inputs, &trajectory)
}

fn objective_on(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
    trajectory: &Signal,
) -> Result<f64, SynthesisError> {
    let rob = semantics::evaluate(&problem.formula, trajectory, 0, &problem.config)?;
    Ok(rob - problem.lambda * total_cost(problem, inputs, trajectory))
}

pub(crate) fn total_cost(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
    trajectory: &Signal,
) -> f64 {
    match &problem.cost {
        StageCost::Quadratic => {
            0.5 * inputs
                .iter()
                .map(|u| u.iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>()
        }
        StageCost::Custom(f) => inputs
            .iter()
            .enumerate()
            .map(|(t, u)| f(u, trajectory.sample(t)))
            .sum(),
    }
}

/// How to compute the objective gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradMode {
    /// Chain rule through the smooth robustness recursion and the dynamics.
    Analytic,
    /// Central finite differences with step `h` on every input component.
    FiniteDifference { h: f64 },
}

/// Gradient of [`objective`] with respect to every input component,
/// returned as a `T x m` matrix.
pub fn gradient(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
    mode: GradMode,
) -> Result<Vec<Vec<f64>>, SynthesisError> {
    match mode {
        GradMode::Analytic => {
            if problem.config.engine != Engine::WeightedSmooth {
                return Err(SynthesisError::NonSmoothEngine(problem.config.engine));
            }
            grad::analytic_gradient(problem, inputs)
        }
        GradMode::FiniteDifference { h } => fd_gradient(problem, inputs, h),
    }
}

fn fd_gradient(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
    h: f64,
) -> Result<Vec<Vec<f64>>, SynthesisError> {
    let mut grad = vec![vec![0.0; problem.system.input_dim()]; inputs.len()];
    let mut probe = inputs.to_vec();
    for t in 0..inputs.len() {
        for k in 0..problem.system.input_dim() {
            probe[t][k] = inputs[t][k] + h;
            let plus = objective_unchecked(problem, &probe)?;
            probe[t][k] = inputs[t][k] - h;
            let minus = objective_unchecked(problem, &probe)?;
            probe[t][k] = inputs[t][k];
            grad[t][k] = (plus - minus) / (2.0 * h);
        }
    }
    Ok(grad)
}

/// Backtracking line-search parameters.
#[derive(Debug, Clone)]
pub struct StepRule {
    /// Initial step; defaults to `0.1 *` the widest input-box side.
    pub initial_step: Option<f64>,
    /// Multiplicative step shrink per backtrack.
    pub shrink: f64,
    /// Sufficient-increase coefficient.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            initial_step: None,
            shrink: 0.5,
            armijo: 1e-4,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub restarts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    pub seed: u64,
    pub step: StepRule,
    /// Stop a start once the projected gradient sup-norm falls below this.
    pub grad_tol: f64,
    /// Run restarts on the thread pool; the result does not depend on it.
    pub parallel: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            seed: 0,
            step: StepRule::default(),
            grad_tol: 1e-5,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    /// Optimal input sequence, elementwise inside the input box.
    pub inputs: Vec<Vec<f64>>,
    /// `simulate(system, q0, inputs)`.
    pub trajectory: Signal,
    /// Exact weighted robustness minus weighted cost. The smooth engine
    /// only supplies ascent directions; results are scored exactly.
    pub objective: f64,
    /// Smooth weighted robustness of the final trajectory at the problem's
    /// `beta`.
    pub robustness_smooth: f64,
    /// Classical robustness of the unweighted formula on the final
    /// trajectory; the verdict below comes from this value.
    pub robustness_exact: f64,
    pub satisfied: Verdict,
    /// Accepted ascent iterations summed over all starts and phases.
    pub iterations: usize,
    pub wall_time: Duration,
    /// Objective after each accepted improvement iteration of the winning
    /// start (non-decreasing).
    pub objective_history: Vec<f64>,
}

struct StartOutcome {
    inputs: Vec<Vec<f64>>,
    objective: f64,
    satisfied: bool,
    iterations: usize,
    history: Vec<f64>,
}

/// Multi-start two-phase projected gradient ascent.
///
/// Each start first climbs the smooth weighted robustness alone (cost
/// ignored) through a sharpening `beta` schedule until the trajectory
/// satisfies the unweighted formula with margin `epsilon`; it then
/// maximizes the exact objective `weighted robustness - lambda * J` along
/// smooth-gradient directions, rejecting any step that would leave the
/// satisfying set. Without the feasibility phase plain ascent reliably
/// stalls on infeasible compromise trajectories: normalized temporal
/// weights make a few violated steps cheap, so the unconstrained smooth
/// objective can rank them above genuinely satisfying trajectories.
///
/// Starts draw their initial inputs from the input box on deterministic
/// streams of `opts.seed` (held, per-step random, and two-segment shapes
/// for coverage of qualitatively different motions), so results are
/// reproducible bit for bit. Among starts whose final trajectory satisfies
/// the unweighted formula the best objective wins; if none does, the best
/// objective overall is returned as the minimally violating solution.
pub fn synthesize(
    problem: &SynthesisProblem,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    if problem.config.engine != Engine::WeightedSmooth {
        return Err(SynthesisError::NonSmoothEngine(problem.config.engine));
    }
    let started = Instant::now();
    let starts: Vec<usize> = (0..opts.restarts.max(1)).collect();
    let outcomes: Result<Vec<StartOutcome>, SynthesisError> = if opts.parallel {
        starts
            .par_iter()
            .map(|s| run_start(problem, opts, *s))
            .collect()
    } else {
        starts.iter().map(|s| run_start(problem, opts, *s)).collect()
    };
    let outcomes = outcomes?;

    let best_of = |satisfied_only: bool| -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, o) in outcomes.iter().enumerate() {
            if satisfied_only && !o.satisfied {
                continue;
            }
            match best {
                Some(b) if outcomes[b].objective >= o.objective => {}
                _ => best = Some(i),
            }
        }
        best
    };
    let winner = best_of(true).or_else(|| best_of(false)).expect("at least one start");
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let chosen = &outcomes[winner];

    let trajectory = simulate(problem.system.as_ref(), &problem.q0, &chosen.inputs)?;
    let robustness_smooth =
        semantics::evaluate(&problem.formula, &trajectory, 0, &problem.config)?;
    let robustness_exact = exact_robustness(problem, &trajectory)?;
    Ok(SynthesisResult {
        inputs: chosen.inputs.clone(),
        objective: chosen.objective,
        robustness_smooth,
        robustness_exact,
        satisfied: Verdict::from_value(robustness_exact, problem.config.epsilon),
        iterations,
        wall_time: started.elapsed(),
        objective_history: chosen.history.clone(),
        trajectory,
    })
}

/// Classical robustness of the unweighted formula.
fn exact_robustness(
    problem: &SynthesisProblem,
    trajectory: &Signal,
) -> Result<f64, SynthesisError> {
    let stripped = problem.formula.strip_weights();
    let cfg = SemanticsConfig {
        engine: Engine::Traditional,
        beta: problem.config.beta,
        epsilon: problem.config.epsilon,
        predicate_mode: problem.config.predicate_mode,
    };
    Ok(semantics::evaluate(&stripped, trajectory, 0, &cfg)?)
}

/// The selection objective: exact weighted robustness minus weighted cost.
fn exact_objective(
    problem: &SynthesisProblem,
    inputs: &[Vec<f64>],
) -> Result<f64, SynthesisError> {
    let trajectory = simulate_unchecked(problem.system.as_ref(), &problem.q0, inputs)?;
    let cfg = SemanticsConfig {
        engine: Engine::WeightedTraditional,
        ..problem.config.clone()
    };
    let rob = semantics::evaluate(&problem.formula, &trajectory, 0, &cfg)?;
    Ok(rob - problem.lambda * total_cost(problem, inputs, &trajectory))
}

fn initial_inputs(
    problem: &SynthesisProblem,
    opts: &SynthesisOptions,
    start: usize,
) -> Vec<Vec<f64>> {
    let system = problem.system.as_ref();
    let (lo, hi) = (system.input_lo(), system.input_hi());
    let m = system.input_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(start as u64 + 1);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..m).map(|k| rng.random_range(lo[k]..=hi[k])).collect()
    };
    match start % 3 {
        // held input: large-scale arcs and straights
        0 => {
            let row = draw(&mut rng);
            (0..problem.steps).map(|_| row.clone()).collect()
        }
        // independent per-step draws
        1 => (0..problem.steps).map(|_| draw(&mut rng)).collect(),
        // two held segments with one switch
        _ => {
            let switch = if problem.steps > 1 {
                rng.random_range(1..problem.steps)
            } else {
                0
            };
            let first = draw(&mut rng);
            let second = draw(&mut rng);
            (0..problem.steps)
                .map(|t| if t < switch { first.clone() } else { second.clone() })
                .collect()
        }
    }
}

fn run_start(
    problem: &SynthesisProblem,
    opts: &SynthesisOptions,
    start: usize,
) -> Result<StartOutcome, SynthesisError> {
    let system = problem.system.as_ref();
    let (lo, hi) = (system.input_lo(), system.input_hi());
    let m = system.input_dim();
    let widest = (0..m).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max);
    let alpha0 = opts.step.initial_step.unwrap_or(0.1 * widest.max(1e-6));
    let epsilon = problem.config.epsilon;

    let mut inputs = initial_inputs(problem, opts, start);
    let mut iterations = 0usize;

    let margin = |u: &[Vec<f64>]| -> Result<f64, SynthesisError> {
        let trajectory = simulate_unchecked(system, &problem.q0, u)?;
        exact_robustness(problem, &trajectory)
    };

    // phase 1: satisfaction seeking on the smooth robustness alone,
    // sharpening the approximation stage by stage
    let stage_budget = opts.max_iters.div_ceil(3);
    let mut satisfied = margin(&inputs)? > epsilon;
    'stages: for stage in 0..3 {
        if satisfied {
            break;
        }
        let mut stage_problem = problem.clone();
        stage_problem.lambda = 0.0;
        stage_problem.config.beta = problem.config.beta * (1 << stage) as f64;
        let mut value = objective(&stage_problem, &inputs)?;
        for _ in 0..stage_budget {
            let grad = grad::analytic_gradient(&stage_problem, &inputs)?;
            let mut alpha = alpha0;
            let mut accepted = false;
            for _ in 0..opts.step.max_backtracks {
                let candidate = step_candidate(&inputs, &grad, alpha, &lo, &hi);
                let candidate_value = match objective(&stage_problem, &candidate) {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        alpha *= opts.step.shrink;
                        continue;
                    }
                };
                let along = dot_step(&grad, &candidate, &inputs);
                if candidate_value >= value + opts.step.armijo * along
                    && candidate_value > value
                {
                    inputs = candidate;
                    value = candidate_value;
                    accepted = true;
                    break;
                }
                alpha *= opts.step.shrink;
            }
            if !accepted {
                break;
            }
            iterations += 1;
            if margin(&inputs)? > epsilon {
                satisfied = true;
                break 'stages;
            }
        }
    }

    // phase 2: maximize the exact objective along smooth ascent directions
    // at the sharpest stage; once satisfying, never accept a step that
    // stops satisfying
    let mut direction_problem = problem.clone();
    direction_problem.config.beta = problem.config.beta * 4.0;
    let mut value = exact_objective(problem, &inputs)?;
    let mut history = vec![value];
    for _ in 0..opts.max_iters {
        let grad = grad::analytic_gradient(&direction_problem, &inputs)?;

        let mut stationarity = 0.0f64;
        for (t, row) in grad.iter().enumerate() {
            for (k, g) in row.iter().enumerate() {
                let moved = (inputs[t][k] + g).clamp(lo[k], hi[k]);
                stationarity = stationarity.max((moved - inputs[t][k]).abs());
            }
        }
        if stationarity < opts.grad_tol {
            break;
        }

        let mut alpha = alpha0;
        let mut accepted = false;
        for _ in 0..opts.step.max_backtracks {
            let candidate = step_candidate(&inputs, &grad, alpha, &lo, &hi);
            let candidate_value = match exact_objective(problem, &candidate) {
                Ok(v) if v.is_finite() => v,
                _ => {
                    alpha *= opts.step.shrink;
                    continue;
                }
            };
            let keeps_feasibility = !satisfied || margin(&candidate)? > epsilon;
            if candidate_value > value && keeps_feasibility {
                satisfied = satisfied || margin(&candidate)? > epsilon;
                inputs = candidate;
                value = candidate_value;
                accepted = true;
                break;
            }
            alpha *= opts.step.shrink;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        history.push(value);
    }

    Ok(StartOutcome {
        inputs,
        objective: value,
        satisfied,
        iterations,
        history,
    })
}

fn step_candidate(
    inputs: &[Vec<f64>],
    grad: &[Vec<f64>],
    alpha: f64,
    lo: &[f64],
    hi: &[f64],
) -> Vec<Vec<f64>> {
    inputs
        .iter()
        .zip(grad)
        .map(|(row, grow)| {
            row.iter()
                .zip(grow)
                .enumerate()
                .map(|(k, (u, g))| (u + alpha * g).clamp(lo[k], hi[k]))
                .collect()
        })
        .collect()
}

fn dot_step(grad: &[Vec<f64>], candidate: &[Vec<f64>], inputs: &[Vec<f64>]) -> f64 {
    grad.iter()
        .zip(candidate)
        .zip(inputs)
        .map(|((grow, crow), urow)| {
            grow.iter()
                .zip(crow)
                .zip(urow)
                .map(|((g, c), u)| g * (c - u))
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn unicycle_problem(formula: &str) -> SynthesisProblem {
        SynthesisProblem::new(
            Arc::new(Unicycle::default()),
            vec![1.0, 1.0, std::f64::consts::FRAC_PI_4],
            20,
            parse(formula).unwrap(),
            0.05,
        )
    }

    #[test]
    fn simulate_diagonal_motion() {
        // constant speed, zero turn rate, heading pi/4: motion stays on x = y
        let sys = Unicycle::default();
        let u = vec![vec![1.0, 0.0]; 5];
        let q0 = vec![1.0, 1.0, std::f64::consts::FRAC_PI_4];
        let traj = simulate(&sys, &q0, &u).unwrap();
        for t in 0..=5 {
            assert!((traj.value(t, 0) - traj.value(t, 1)).abs() < 1e-12);
        }
        assert!((traj.value(5, 0) - (1.0 + 5.0 * (0.5f64).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn simulate_zero_input_is_a_fixed_point() {
        let sys = Unicycle::default();
        let q0 = vec![0.3, -0.7, 1.1];
        let traj = simulate(&sys, &q0, &vec![vec![0.0, 0.0]; 4]).unwrap();
        for t in 0..=4 {
            assert_eq!(traj.sample(t), &q0[..]);
        }
    }

    #[test]
    fn simulate_single_step() {
        let sys = Unicycle::default();
        let traj = simulate(&sys, &[0.0, 0.0, 0.0], &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(traj.sample(1), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn simulate_checks_bounds() {
        let sys = Unicycle::default();
        let err = simulate(&sys, &[0.0; 3], &[vec![3.0, 0.0]]).unwrap_err();
        assert!(matches!(
            err,
            SynthesisError::InputOutOfBounds { t: 0, dim: 0 }
        ));
    }

    #[test]
    fn objective_without_cost_is_robustness() {
        let mut problem = unicycle_problem("G[0,3] (x >= 0)");
        problem.lambda = 0.0;
        let u = vec![vec![0.5, 0.1]; 20];
        let traj = simulate(problem.system.as_ref(), &problem.q0, &u).unwrap();
        let rob =
            semantics::evaluate(&problem.formula, &traj, 0, &problem.config).unwrap();
        assert_eq!(objective(&problem, &u).unwrap(), rob);
    }

    #[test]
    fn zero_input_has_zero_cost() {
        let problem = unicycle_problem("G[0,3] (x >= 0)");
        let u = vec![vec![0.0, 0.0]; 20];
        let traj = simulate(problem.system.as_ref(), &problem.q0, &u).unwrap();
        let rob =
            semantics::evaluate(&problem.formula, &traj, 0, &problem.config).unwrap();
        assert_eq!(objective(&problem, &u).unwrap(), rob);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let problem = unicycle_problem(
            "(F[1,10] (((x - 7 >= 0) && (9 - x >= 0)) ||[2,1] ((y - 7 >= 0) && (9 - y >= 0)))) \
             && (G[1,20] ((x >= 0) && (10 - x >= 0)))",
        );
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let u: Vec<Vec<f64>> = (0..20)
                .map(|_| {
                    vec![
                        rng.random_range(-1.5..1.5),
                        rng.random_range(-1.5..1.5),
                    ]
                })
                .collect();
            let analytic = gradient(&problem, &u, GradMode::Analytic).unwrap();
            let fd = gradient(&problem, &u, GradMode::FiniteDifference { h: 1e-5 }).unwrap();
            for t in 0..20 {
                for k in 0..2 {
                    assert!(
                        (analytic[t][k] - fd[t][k]).abs() < 1e-4,
                        "t={t} k={k}: {} vs {}",
                        analytic[t][k],
                        fd[t][k]
                    );
                }
            }
        }
    }

    #[test]
    fn cost_gradient_alone_is_lambda_u() {
        // horizon-0 formula: robustness depends only on q0, so the whole
        // gradient is the cost term -lambda * u
        let mut problem = unicycle_problem("x >= 0");
        problem.lambda = 0.7;
        let u: Vec<Vec<f64>> = (0..20)
            .map(|t| vec![0.1 * t as f64 / 20.0, -0.05])
            .collect();
        let grad = gradient(&problem, &u, GradMode::Analytic).unwrap();
        for t in 0..20 {
            for k in 0..2 {
                assert!((grad[t][k] + 0.7 * u[t][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_is_zero_past_the_horizon() {
        let mut problem = unicycle_problem("G[0,5] ((x >= 0) && (10 - x >= 0))");
        problem.lambda = 0.0;
        let u = vec![vec![0.3, 0.2]; 20];
        let grad = gradient(&problem, &u, GradMode::Analytic).unwrap();
        for (t, row) in grad.iter().enumerate().skip(5) {
            assert_eq!(row, &vec![0.0, 0.0], "t={t}");
        }
        let fd = gradient(&problem, &u, GradMode::FiniteDifference { h: 1e-5 }).unwrap();
        for row in fd.iter().skip(5) {
            for g in row {
                assert!(g.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn analytic_gradient_requires_the_smooth_engine() {
        let mut problem = unicycle_problem("x >= 0");
        problem.config.engine = Engine::WeightedTraditional;
        let u = vec![vec![0.0, 0.0]; 20];
        assert!(matches!(
            gradient(&problem, &u, GradMode::Analytic),
            Err(SynthesisError::NonSmoothEngine(_))
        ));
        assert!(matches!(
            synthesize(&problem, &SynthesisOptions::default()),
            Err(SynthesisError::NonSmoothEngine(_))
        ));
    }

    #[test]
    fn synthesis_is_deterministic_and_feasible() {
        let problem = unicycle_problem("F[1,6] ((x - 3 >= 0) && (y - 1 >= 0))");
        let opts = SynthesisOptions {
            restarts: 3,
            max_iters: 120,
            seed: 7,
            parallel: true,
            ..Default::default()
        };
        let a = synthesize(&problem, &opts).unwrap();
        let b = synthesize(&problem, &opts).unwrap();
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.iterations, b.iterations);

        // projection invariant
        for row in &a.inputs {
            for u in row {
                assert!((-2.0..=2.0).contains(u));
            }
        }
        // ascent invariant: accepted objectives never decrease
        for w in a.objective_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        assert_eq!(a.satisfied, Verdict::Yes);
        assert!(a.robustness_exact > 0.0);
    }

    #[test]
    fn custom_stage_cost_is_used() {
        let mut problem = unicycle_problem("x >= 0");
        problem.lambda = 1.0;
        problem.cost = StageCost::Custom(Arc::new(|u, _q| u[0].abs() + u[1].abs()));
        let u = vec![vec![0.5, -0.5]; 20];
        let traj = simulate(problem.system.as_ref(), &problem.q0, &u).unwrap();
        let rob = semantics::evaluate(&problem.formula, &traj, 0, &problem.config).unwrap();
        let expected = rob - 20.0;
        assert!((objective(&problem, &u).unwrap() - expected).abs() < 1e-12);

        let analytic = gradient(&problem, &u, GradMode::Analytic).unwrap();
        let fd = gradient(&problem, &u, GradMode::FiniteDifference { h: 1e-6 }).unwrap();
        for t in 0..20 {
            for k in 0..2 {
                assert!((analytic[t][k] - fd[t][k]).abs() < 1e-4);
            }
        }
    }
}
