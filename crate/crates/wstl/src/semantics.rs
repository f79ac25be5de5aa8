//! Qualitative satisfaction and the four quantitative robustness engines.
//!
//! All engines share one recursive evaluator over the formula tree,
//! parameterized by a pair of aggregation functions: one for conjunction-like
//! nodes (`&&`, `G`) and one for disjunction-like nodes (`||`, `F`). Each
//! aggregator combines the operand robustness values with the node's
//! normalized weights:
//!
//! * [`Engine::Traditional`] — plain `min` / `max`; weights are ignored.
//! * [`Engine::WeightedTraditional`] — `min` / `max` over sign-dependent
//!   weighted terms `((1/2 - w) sign(x) + 1/2) * x`: a satisfied conjunct
//!   counts with the hold-out importance `1 - w`, a violated one with its
//!   own importance `w` (and dually for disjunction).
//! * [`Engine::WeightedAgm`] — weighted geometric mean when every part is
//!   satisfied, weighted arithmetic mean of the violations otherwise, so
//!   every operand contributes instead of only the extreme one.
//! * [`Engine::WeightedSmooth`] — the weighted min/max form with `min`/`max`
//!   replaced by log-sum-exp style under-approximations ([`smooth`]) and
//!   `sign` by `tanh(beta x)`, differentiable in the signal values.
//!
//! Evaluation memoizes `(node, time)` pairs, so nested temporal operators
//! cost `O(|formula| * |signal|)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, PredicateMode};
use crate::signal::Signal;
use crate::weights::WeightError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("formula needs samples up to index {needed}, signal ends at index {available}")]
    HorizonExceedsSignal { needed: usize, available: usize },
    #[error("signal has no component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Which robustness semantics to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Traditional,
    WeightedTraditional,
    WeightedAgm,
    WeightedSmooth,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Traditional => "traditional",
            Engine::WeightedTraditional => "weighted-traditional",
            Engine::WeightedAgm => "weighted-agm",
            Engine::WeightedSmooth => "weighted-smooth",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "traditional" => Ok(Engine::Traditional),
            "weighted-traditional" => Ok(Engine::WeightedTraditional),
            "weighted-agm" => Ok(Engine::WeightedAgm),
            "weighted-smooth" => Ok(Engine::WeightedSmooth),
            other => Err(format!(
                "unknown engine `{other}` (expected traditional, weighted-traditional, \
                 weighted-agm, or weighted-smooth)"
            )),
        }
    }
}

/// Engine selection plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticsConfig {
    pub engine: Engine,
    /// Sharpness of the smooth approximations; only the smooth engine reads it.
    pub beta: f64,
    /// Verdict dead-band: `Yes` needs `value > epsilon`, `No` needs
    /// `value < -epsilon`.
    pub epsilon: f64,
    /// When set, overrides the mode of every predicate in the formula.
    pub predicate_mode: Option<PredicateMode>,
}

impl SemanticsConfig {
    pub fn new(engine: Engine) -> Self {
        Self {
            engine,
            beta: 10.0,
            epsilon: 0.0,
            predicate_mode: None,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_predicate_mode(mut self, mode: PredicateMode) -> Self {
        self.predicate_mode = Some(mode);
        self
    }

    /// Soundness margin to use with this engine on the given formula: zero
    /// for the exact engines, `ln(max arity) / beta` for the smooth engine
    /// (one aggregation level's worst-case under-approximation).
    pub fn suggested_epsilon(&self, formula: &Formula) -> f64 {
        match self.engine {
            Engine::WeightedSmooth => (formula.max_arity() as f64).ln() / self.beta,
            _ => 0.0,
        }
    }
}

/// Three-valued satisfaction verdict with an `epsilon` dead-band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl Verdict {
    pub fn from_value(value: f64, epsilon: f64) -> Verdict {
        if value > epsilon {
            Verdict::Yes
        } else if value < -epsilon {
            Verdict::No
        } else {
            Verdict::Inconclusive
        }
    }

    /// Process exit code convention: 0 yes, 1 no, 2 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Result of one robustness evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub value: f64,
    /// Verdict of `value` against the configured `epsilon` dead-band.
    pub satisfied: Verdict,
    /// Per-node robustness, keyed by tree path (`root`, `root.0`, ...) and
    /// evaluation time. Only filled on request.
    pub trace: Option<BTreeMap<String, BTreeMap<usize, f64>>>,
}

/// Classical min/max robustness at time `t`.
pub fn rob_traditional(formula: &Formula, signal: &Signal, t: usize) -> Result<f64, EvalError> {
    run_engine(formula, signal, t, &TraditionalAgg, None)
}

/// Weighted min/max robustness at time `t`.
pub fn rob_weighted_traditional(
    formula: &Formula,
    signal: &Signal,
    t: usize,
) -> Result<f64, EvalError> {
    run_engine(formula, signal, t, &WeightedTradAgg, None)
}

/// Weighted arithmetic/geometric-mean robustness at time `t`.
pub fn rob_weighted_agm(formula: &Formula, signal: &Signal, t: usize) -> Result<f64, EvalError> {
    run_engine(formula, signal, t, &AgmAgg, None)
}

/// Smooth weighted robustness at time `t` with sharpness `beta`.
pub fn rob_weighted_smooth(
    formula: &Formula,
    signal: &Signal,
    t: usize,
    beta: f64,
) -> Result<f64, EvalError> {
    run_engine(formula, signal, t, &SmoothAgg { beta }, None)
}

/// Robustness of `formula` at time `t` under the configured engine.
pub fn evaluate(
    formula: &Formula,
    signal: &Signal,
    t: usize,
    cfg: &SemanticsConfig,
) -> Result<f64, EvalError> {
    Ok(evaluate_report(formula, signal, t, cfg, false)?.value)
}

/// Like [`evaluate`], but also derives the verdict and, when `with_trace`
/// is set, the per-node robustness map.
pub fn evaluate_report(
    formula: &Formula,
    signal: &Signal,
    t: usize,
    cfg: &SemanticsConfig,
    with_trace: bool,
) -> Result<RobustnessReport, EvalError> {
    let plan = plan::Plan::build(formula, signal.components(), cfg.predicate_mode)?;
    check_horizon(formula, signal, t)?;
    let (value, memo) = match cfg.engine {
        Engine::Traditional => eval_plan(&plan, signal, t, &TraditionalAgg),
        Engine::WeightedTraditional => eval_plan(&plan, signal, t, &WeightedTradAgg),
        Engine::WeightedAgm => eval_plan(&plan, signal, t, &AgmAgg),
        Engine::WeightedSmooth => eval_plan(&plan, signal, t, &SmoothAgg { beta: cfg.beta }),
    };
    let trace = with_trace.then(|| {
        let times = signal.len();
        let mut map: BTreeMap<String, BTreeMap<usize, f64>> = BTreeMap::new();
        for (id, path) in plan.paths.iter().enumerate() {
            let mut by_time = BTreeMap::new();
            for time in 0..times {
                if let Some(v) = memo[id * times + time] {
                    by_time.insert(time, v);
                }
            }
            if !by_time.is_empty() {
                map.insert(path.clone(), by_time);
            }
        }
        map
    });
    Ok(RobustnessReport {
        value,
        satisfied: Verdict::from_value(value, cfg.epsilon),
        trace,
    })
}

/// Qualitative satisfaction: the sign of the classical robustness of the
/// unweighted formula, with the `epsilon` dead-band. Weights never change
/// this verdict.
pub fn satisfies(
    formula: &Formula,
    signal: &Signal,
    t: usize,
    cfg: &SemanticsConfig,
) -> Result<Verdict, EvalError> {
    let stripped = formula.strip_weights();
    let value = run_engine(&stripped, signal, t, &TraditionalAgg, cfg.predicate_mode)?;
    Ok(Verdict::from_value(value, cfg.epsilon))
}

/// Sorts signals by descending robustness under the configured engine;
/// stable on ties. Returns `(input index, robustness)` pairs.
pub fn rank_signals(
    formula: &Formula,
    signals: &[Signal],
    cfg: &SemanticsConfig,
) -> Result<Vec<(usize, f64)>, EvalError> {
    let mut ranked = Vec::with_capacity(signals.len());
    for (index, signal) in signals.iter().enumerate() {
        ranked.push((index, evaluate(formula, signal, 0, cfg)?));
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}

fn check_horizon(formula: &Formula, signal: &Signal, t: usize) -> Result<(), EvalError> {
    let needed = t + formula.horizon();
    if needed > signal.last_index() {
        return Err(EvalError::HorizonExceedsSignal {
            needed,
            available: signal.last_index(),
        });
    }
    Ok(())
}

fn run_engine<A: Aggregator>(
    formula: &Formula,
    signal: &Signal,
    t: usize,
    agg: &A,
    mode_override: Option<PredicateMode>,
) -> Result<f64, EvalError> {
    let plan = plan::Plan::build(formula, signal.components(), mode_override)?;
    check_horizon(formula, signal, t)?;
    Ok(eval_plan(&plan, signal, t, agg).0)
}

fn eval_plan<A: Aggregator>(
    plan: &plan::Plan,
    signal: &Signal,
    t: usize,
    agg: &A,
) -> (f64, Vec<Option<f64>>) {
    let times = signal.len();
    let mut memo: Vec<Option<f64>> = vec![None; plan.nodes.len() * times];
    let value = eval_node(plan, signal, agg, &mut memo, times, plan.root, t);
    (value, memo)
}

fn eval_node<A: Aggregator>(
    plan: &plan::Plan,
    signal: &Signal,
    agg: &A,
    memo: &mut Vec<Option<f64>>,
    times: usize,
    id: usize,
    t: usize,
) -> f64 {
    if let Some(v) = memo[id * times + t] {
        return v;
    }
    let value = match &plan.nodes[id] {
        plan::Node::True => agg.top(),
        plan::Node::False => -agg.top(),
        plan::Node::Pred { terms, offset, mode } => {
            let raw = terms
                .iter()
                .map(|(c, coef)| coef * signal.value(t, *c))
                .sum::<f64>()
                + offset;
            match mode {
                PredicateMode::Metric { scale } => scale * raw,
                PredicateMode::Boolean { magnitude } => {
                    if raw >= 0.0 {
                        *magnitude
                    } else {
                        -magnitude
                    }
                }
            }
        }
        plan::Node::Not(sub) => -eval_node(plan, signal, agg, memo, times, *sub, t),
        plan::Node::Nary { or, subs, wbar } => {
            let xs: Vec<f64> = subs
                .iter()
                .map(|s| eval_node(plan, signal, agg, memo, times, *s, t))
                .collect();
            if *or {
                agg.disj(wbar, &xs)
            } else {
                agg.conj(wbar, &xs)
            }
        }
        plan::Node::Temporal { eventually, a, b, sub, wbar } => {
            let xs: Vec<f64> = (t + a..=t + b)
                .map(|tp| eval_node(plan, signal, agg, memo, times, *sub, tp))
                .collect();
            if *eventually {
                agg.disj(wbar, &xs)
            } else {
                agg.conj(wbar, &xs)
            }
        }
    };
    memo[id * times + t] = Some(value);
    value
}

/// `sign` with `sign(0) = 0`.
pub(crate) fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// One conjunction term of the weighted min/max form:
/// `((1/2 - w) sign(x) + 1/2) * x`.
pub(crate) fn wt_conj_term(w: f64, x: f64) -> f64 {
    ((0.5 - w) * sign0(x) + 0.5) * x
}

pub(crate) trait Aggregator {
    /// Robustness of logical truth under this engine.
    fn top(&self) -> f64;
    fn conj(&self, wbar: &[f64], xs: &[f64]) -> f64;
    fn disj(&self, wbar: &[f64], xs: &[f64]) -> f64;
}

pub(crate) struct TraditionalAgg;

impl Aggregator for TraditionalAgg {
    fn top(&self) -> f64 {
        f64::INFINITY
    }

    fn conj(&self, _wbar: &[f64], xs: &[f64]) -> f64 {
        xs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn disj(&self, _wbar: &[f64], xs: &[f64]) -> f64 {
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) struct WeightedTradAgg;

// A single operand aggregates to itself: its normalized weight is 1, and
// the literal weighted term (1 - w) x would zero out satisfied values,
// breaking sign consistency. There is nothing to trade off with one
// operand, so the identity is the only sound choice (it is also what the
// other engines reduce to).
impl Aggregator for WeightedTradAgg {
    fn top(&self) -> f64 {
        f64::INFINITY
    }

    fn conj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.len() == 1 {
            return xs[0];
        }
        wbar.iter()
            .zip(xs)
            .map(|(w, x)| wt_conj_term(*w, *x))
            .fold(f64::INFINITY, f64::min)
    }

    // the dual of conj: -conj(w, -x)
    fn disj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.len() == 1 {
            return xs[0];
        }
        -wbar
            .iter()
            .zip(xs)
            .map(|(w, x)| wt_conj_term(*w, -*x))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) struct AgmAgg;

impl Aggregator for AgmAgg {
    fn top(&self) -> f64 {
        1.0
    }

    fn conj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.iter().all(|x| *x > 0.0) {
            // weighted geometric mean of the satisfied parts
            wbar.iter()
                .zip(xs)
                .map(|(w, x)| w * x.ln())
                .sum::<f64>()
                .exp()
        } else {
            // weighted arithmetic mean of the violations; exact zeros
            // contribute nothing, so an all-boundary node evaluates to 0
            wbar.iter().zip(xs).map(|(w, x)| w * x.min(0.0)).sum()
        }
    }

    fn disj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.iter().all(|x| *x < 0.0) {
            -wbar
                .iter()
                .zip(xs)
                .map(|(w, x)| w * (-x).ln())
                .sum::<f64>()
                .exp()
        } else {
            wbar.iter().zip(xs).map(|(w, x)| w * x.max(0.0)).sum()
        }
    }
}

pub(crate) struct SmoothAgg {
    pub beta: f64,
}

impl Aggregator for SmoothAgg {
    fn top(&self) -> f64 {
        f64::INFINITY
    }

    // singletons aggregate to themselves, as in the exact weighted engine
    fn conj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.len() == 1 {
            return xs[0];
        }
        let ys: Vec<f64> = wbar
            .iter()
            .zip(xs)
            .map(|(w, x)| smooth::conj_term(self.beta, *w, *x))
            .collect();
        smooth::softmin(self.beta, &ys)
    }

    fn disj(&self, wbar: &[f64], xs: &[f64]) -> f64 {
        if xs.len() == 1 {
            return xs[0];
        }
        let ys: Vec<f64> = wbar
            .iter()
            .zip(xs)
            .map(|(w, x)| smooth::disj_term(self.beta, *w, *x))
            .collect();
        smooth::softmax(self.beta, &ys)
    }
}

/// Differentiable building blocks of the smooth engine.
pub mod smooth {
    /// Under-approximation of `min`: `-(1/beta) ln(sum_i exp(-beta x_i))`,
    /// evaluated with a max-shift so large magnitudes cannot overflow.
    /// Satisfies `softmin(x) <= min(x) <= softmin(x) + ln(n)/beta`.
    pub fn softmin(beta: f64, xs: &[f64]) -> f64 {
        softmin_with_weights(beta, xs).0
    }

    /// Under-approximation of `max`: the self-normalized weighted average
    /// `sum_i x_i exp(beta x_i) / sum_i exp(beta x_i)`.
    pub fn softmax(beta: f64, xs: &[f64]) -> f64 {
        softmax_with_weights(beta, xs).0
    }

    /// `softmin` plus its gradient `d softmin / d x_i`.
    pub(crate) fn softmin_with_weights(beta: f64, xs: &[f64]) -> (f64, Vec<f64>) {
        // exact limits for infinite inputs: a -inf entry pins the result,
        // +inf entries contribute weight exp(-inf) = 0
        if xs.contains(&f64::NEG_INFINITY) {
            return (f64::NEG_INFINITY, vec![0.0; xs.len()]);
        }
        let m = xs.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
        if m == f64::INFINITY {
            return (f64::INFINITY, vec![0.0; xs.len()]);
        }
        let exps: Vec<f64> = xs.iter().map(|x| (-beta * (x - m)).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let value = m - (sum.ln()) / beta;
        let weights = exps.iter().map(|e| e / sum).collect();
        (value, weights)
    }

    /// `softmax` plus its gradient `d softmax / d x_i`.
    pub(crate) fn softmax_with_weights(beta: f64, xs: &[f64]) -> (f64, Vec<f64>) {
        if xs.contains(&f64::INFINITY) {
            return (f64::INFINITY, vec![0.0; xs.len()]);
        }
        let m = xs
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return (f64::NEG_INFINITY, vec![0.0; xs.len()]);
        }
        let exps: Vec<f64> = xs.iter().map(|x| (beta * (x - m)).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let value = xs
            .iter()
            .zip(&exps)
            .map(|(x, e)| if *e == 0.0 { 0.0 } else { x * e })
            .sum::<f64>()
            / sum;
        let grads = xs
            .iter()
            .zip(&exps)
            .map(|(x, e)| {
                let q = e / sum;
                if q == 0.0 {
                    0.0
                } else {
                    q * (1.0 + beta * (x - value))
                }
            })
            .collect();
        (value, grads)
    }

    /// Smooth conjunction term `((1/2 - w) tanh(beta x) + 1/2) * x`.
    pub fn conj_term(beta: f64, w: f64, x: f64) -> f64 {
        if x.is_infinite() {
            // tanh(beta x) -> sign(x); the coefficient stays in (0, 1)
            return x;
        }
        ((0.5 - w) * (beta * x).tanh() + 0.5) * x
    }

    /// Smooth disjunction term `((w - 1/2) tanh(beta x) + 1/2) * x`.
    pub fn disj_term(beta: f64, w: f64, x: f64) -> f64 {
        if x.is_infinite() {
            return x;
        }
        ((w - 0.5) * (beta * x).tanh() + 0.5) * x
    }

    /// `d conj_term / d x`.
    pub(crate) fn conj_term_grad(beta: f64, w: f64, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        let th = (beta * x).tanh();
        (0.5 - w) * th + 0.5 + x * (0.5 - w) * beta * (1.0 - th * th)
    }

    /// `d disj_term / d x`.
    pub(crate) fn disj_term_grad(beta: f64, w: f64, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        let th = (beta * x).tanh();
        (w - 0.5) * th + 0.5 + x * (w - 0.5) * beta * (1.0 - th * th)
    }
}

/// Compiled evaluation plan: the formula flattened to indexed nodes with
/// component references resolved and weights realized and normalized.
pub(crate) mod plan {
    use super::EvalError;
    use crate::formula::{Formula, PredicateMode};
    use crate::weights::{normalize, WeightDomain};

    #[derive(Debug)]
    pub(crate) enum Node {
        True,
        False,
        Pred {
            terms: Vec<(usize, f64)>,
            offset: f64,
            mode: PredicateMode,
        },
        Not(usize),
        Nary {
            or: bool,
            subs: Vec<usize>,
            wbar: Vec<f64>,
        },
        Temporal {
            eventually: bool,
            a: usize,
            b: usize,
            sub: usize,
            wbar: Vec<f64>,
        },
    }

    #[derive(Debug)]
    pub(crate) struct Plan {
        pub nodes: Vec<Node>,
        pub paths: Vec<String>,
        pub root: usize,
    }

    impl Plan {
        pub(crate) fn build(
            formula: &Formula,
            components: &[String],
            mode_override: Option<PredicateMode>,
        ) -> Result<Plan, EvalError> {
            let mut plan = Plan {
                nodes: Vec::new(),
                paths: Vec::new(),
                root: 0,
            };
            let root = build_node(
                formula,
                components,
                mode_override,
                &mut plan,
                "root".to_string(),
            )?;
            plan.root = root;
            Ok(plan)
        }
    }

    fn build_node(
        formula: &Formula,
        components: &[String],
        mode_override: Option<PredicateMode>,
        plan: &mut Plan,
        path: String,
    ) -> Result<usize, EvalError> {
        let node = match formula {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Predicate(p) => {
                let mut terms = Vec::new();
                for (name, coef) in p.expr.coefficients() {
                    let index = components
                        .iter()
                        .position(|c| c == name)
                        .ok_or_else(|| EvalError::UnknownComponent(name.to_string()))?;
                    terms.push((index, coef));
                }
                Node::Pred {
                    terms,
                    offset: p.expr.offset(),
                    mode: mode_override.unwrap_or(p.mode),
                }
            }
            Formula::Not(sub) => {
                let child = build_node(sub, components, mode_override, plan, format!("{path}.0"))?;
                Node::Not(child)
            }
            Formula::And { subs, weights } | Formula::Or { subs, weights } => {
                let mut children = Vec::with_capacity(subs.len());
                for (i, sub) in subs.iter().enumerate() {
                    children.push(build_node(
                        sub,
                        components,
                        mode_override,
                        plan,
                        format!("{path}.{i}"),
                    )?);
                }
                let wbar = normalize(&weights.realize(WeightDomain::Count(subs.len()))?)?;
                Node::Nary {
                    or: matches!(formula, Formula::Or { .. }),
                    subs: children,
                    wbar,
                }
            }
            Formula::Always { interval, weights, sub }
            | Formula::Eventually { interval, weights, sub } => {
                let child = build_node(sub, components, mode_override, plan, format!("{path}.0"))?;
                let wbar = normalize(&weights.realize(WeightDomain::Interval(*interval))?)?;
                Node::Temporal {
                    eventually: matches!(formula, Formula::Eventually { .. }),
                    a: interval.a(),
                    b: interval.b(),
                    sub: child,
                    wbar,
                }
            }
        };
        plan.nodes.push(node);
        plan.paths.push(path);
        Ok(plan.nodes.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::AffineExpr;
    use crate::parser::parse;
    use crate::signal::TimeInterval;
    use crate::weights::WeightFn;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sig1(values: &[f64]) -> Signal {
        Signal::new(
            vec!["s".to_string()],
            values.iter().map(|v| vec![*v]).collect(),
        )
        .unwrap()
    }

    fn sig2(values: &[(f64, f64)]) -> Signal {
        Signal::new(
            vec!["a".to_string(), "b".to_string()],
            values.iter().map(|(a, b)| vec![*a, *b]).collect(),
        )
        .unwrap()
    }

    fn pred(name: &str) -> Formula {
        Formula::pred(AffineExpr::single(name, 1.0, 0.0))
    }

    #[test]
    fn traditional_examples() {
        let phi = parse("F[0,3] (s >= 0)").unwrap();
        let s4 = sig1(&[0.0, 0.0, 0.5, 1.0]);
        assert_eq!(rob_traditional(&phi, &s4, 0).unwrap(), 1.0);

        let phi = parse("G[0,2] (s >= 0)").unwrap();
        assert_eq!(
            rob_traditional(&phi, &sig1(&[1.0, -2.0, 3.0]), 0).unwrap(),
            -2.0
        );
    }

    #[test]
    fn traditional_negation_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = parse("G[0,4] ((s >= 0) || (F[0,2] (s - 1 >= 0)))").unwrap();
        let negated = Formula::not(phi.clone());
        for _ in 0..100 {
            let values: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let s = sig1(&values);
            let r = rob_traditional(&phi, &s, 0).unwrap();
            let rn = rob_traditional(&negated, &s, 0).unwrap();
            assert_eq!(rn, -r);
        }
    }

    #[test]
    fn weighted_traditional_importance() {
        // two obligatory tasks, the first twice as important
        let phi = Formula::and_weighted(
            vec![pred("a"), pred("b")],
            WeightFn::Explicit(vec![4.0, 2.0]),
        );
        let satisfied = sig2(&[(0.25, 0.25)]);
        let violated = sig2(&[(-0.25, -0.25)]);
        let r = rob_weighted_traditional(&phi, &satisfied, 0).unwrap();
        assert!((r - 1.0 / 12.0).abs() < 1e-12, "got {r}");
        let r = rob_weighted_traditional(&phi, &violated, 0).unwrap();
        assert!((r + 1.0 / 6.0).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn weighted_traditional_priority() {
        let phi = Formula::or_weighted(
            vec![pred("a"), pred("b")],
            WeightFn::Explicit(vec![10.0, 1.0]),
        );
        let r = rob_weighted_traditional(&phi, &sig2(&[(0.5, -0.8)]), 0).unwrap();
        assert!((r - 10.0 / 11.0 * 0.5).abs() < 1e-12, "got {r}");
        let r = rob_weighted_traditional(&phi, &sig2(&[(-1.3, 0.5)]), 0).unwrap();
        assert!((r - 0.5 / 11.0).abs() < 1e-12, "got {r}");
    }

    #[test]
    fn agm_discounted_eventually_matches_weighted_sum() {
        let phi = parse("F[0,3]{disc 0.5} (s >= 0)").unwrap();
        let s5 = sig1(&[1.0, 0.5, 0.0, 0.0]);
        let r = rob_weighted_agm(&phi, &s5, 0).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-12, "got {r}");

        // uniform weights: the plain mean of the positive part
        let phi = parse("F[0,3]{disc 1} (s >= 0)").unwrap();
        for values in [
            [0.0, 0.0, 0.5, 1.0],
            [1.0, 0.5, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.5],
        ] {
            let r = rob_weighted_agm(&phi, &sig1(&values), 0).unwrap();
            assert!((r - 0.375).abs() < 1e-12, "got {r}");
        }
    }

    #[test]
    fn agm_conjunction_with_truth_is_one_when_satisfied_fully() {
        // a sub-formula of robustness exactly 1 conjoined with TRUE scores 1
        // for every weight split
        let phi_of = |p: Vec<f64>| {
            Formula::and_weighted(vec![pred("s"), Formula::True], WeightFn::Explicit(p))
        };
        let s = sig1(&[1.0]);
        for p in [[1.0, 1.0], [9.0, 1.0], [0.2, 4.0]] {
            let r = rob_weighted_agm(&phi_of(p.to_vec()), &s, 0).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "got {r}");
        }
    }

    #[test]
    fn agm_interpolates_between_truth_and_subformula() {
        // with sub-robustness in (0,1), weight on TRUE pulls the score up,
        // weight on the sub-formula pulls it toward the sub-robustness
        let s = sig1(&[0.4]);
        let mut previous = None;
        for weight_on_truth in [0.5, 1.0, 2.0, 8.0] {
            let phi = Formula::and_weighted(
                vec![pred("s"), Formula::True],
                WeightFn::Explicit(vec![1.0, weight_on_truth]),
            );
            let r = rob_weighted_agm(&phi, &s, 0).unwrap();
            assert!(r > 0.4 && r < 1.0);
            if let Some(prev) = previous {
                assert!(r > prev);
            }
            previous = Some(r);
        }
    }

    #[test]
    fn agm_boundary_zeros_evaluate_to_zero() {
        let conj = Formula::and(vec![pred("a"), pred("b")]);
        assert_eq!(rob_weighted_agm(&conj, &sig2(&[(0.0, 0.5)]), 0).unwrap(), 0.0);
        let disj = Formula::or(vec![pred("a"), pred("b")]);
        assert_eq!(rob_weighted_agm(&disj, &sig2(&[(0.0, -0.5)]), 0).unwrap(), 0.0);
    }

    #[test]
    fn smooth_single_element_is_exact() {
        assert_eq!(smooth::softmin(7.0, &[1.25]), 1.25);
        assert_eq!(smooth::softmax(7.0, &[-0.5]), -0.5);
    }

    #[test]
    fn smooth_converges_to_weighted_traditional() {
        let phi = Formula::and_weighted(
            vec![pred("a"), pred("b")],
            WeightFn::Explicit(vec![4.0, 2.0]),
        );
        for values in [(0.25, 0.25), (-0.25, -0.25), (0.3, -0.7)] {
            let s = sig2(&[values]);
            let exact = rob_weighted_traditional(&phi, &s, 0).unwrap();
            let smooth = rob_weighted_smooth(&phi, &s, 0, 1e4).unwrap();
            assert!((smooth - exact).abs() < 1e-2, "{smooth} vs {exact}");
        }
    }

    #[test]
    fn softmin_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rng.random_range(1..=8);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let beta = rng.random_range(0.5..50.0);
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let sm = smooth::softmin(beta, &xs);
            assert!(sm <= min + 1e-12);
            assert!(min <= sm + (n as f64).ln() / beta + 1e-12);
            let sx = smooth::softmax(beta, &xs);
            let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(sx <= max + 1e-12);
        }
    }

    #[test]
    fn uniform_weights_keep_sign_and_extremum_index() {
        // with all-equal weights the weighted terms rescale positives and
        // negatives by different factors, but the minimizer and the sign
        // match the unweighted min
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.random_range(2..=6);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let w = 1.0 / n as f64;
            let terms: Vec<f64> = xs.iter().map(|x| wt_conj_term(w, *x)).collect();
            let argmin_terms = (0..n).min_by(|a, b| terms[*a].total_cmp(&terms[*b])).unwrap();
            let argmin_xs = (0..n).min_by(|a, b| xs[*a].total_cmp(&xs[*b])).unwrap();
            assert_eq!(argmin_terms, argmin_xs);
            assert_eq!(
                sign0(terms.iter().copied().fold(f64::INFINITY, f64::min)),
                sign0(xs.iter().copied().fold(f64::INFINITY, f64::min)),
            );
        }
    }

    #[test]
    fn negation_involution_for_every_engine() {
        let phi = parse("F[0,2]{disc 0.5} ((a >= 0) &&[3,1] (b - 1 >= 0))").unwrap();
        let twice = Formula::not(Formula::not(phi.clone()));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let values: Vec<(f64, f64)> = (0..4)
                .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                .collect();
            let s = sig2(&values);
            for engine in [
                Engine::Traditional,
                Engine::WeightedTraditional,
                Engine::WeightedAgm,
                Engine::WeightedSmooth,
            ] {
                let cfg = SemanticsConfig::new(engine);
                let a = evaluate(&phi, &s, 0, &cfg).unwrap();
                let b = evaluate(&twice, &s, 0, &cfg).unwrap();
                assert_eq!(a, b, "{engine}");
            }
        }
    }

    #[test]
    fn agm_is_monotone_in_the_signal() {
        // monotone formula: positive coefficients, no negation
        let phi = parse(
            "(G[0,3]{disc 0.8} (a - 1 >= 0)) &&[2,1] (F[0,3] ((a >= 0) ||[1,3] (b >= 0)))",
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let lower: Vec<(f64, f64)> = (0..4)
                .map(|_| (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                .collect();
            let higher: Vec<(f64, f64)> = lower
                .iter()
                .map(|(a, b)| {
                    (
                        a + rng.random_range(0.0..2.0),
                        b + rng.random_range(0.0..2.0),
                    )
                })
                .collect();
            let r_low = rob_weighted_agm(&phi, &sig2(&lower), 0).unwrap();
            let r_high = rob_weighted_agm(&phi, &sig2(&higher), 0).unwrap();
            assert!(
                r_high >= r_low - 1e-12,
                "raising the signal lowered robustness: {r_low} -> {r_high}"
            );
        }
    }

    #[test]
    fn time_preference_separates_signals_only_when_discounted() {
        let s4 = sig1(&[0.0, 0.0, 0.5, 1.0]);
        let s5 = sig1(&[1.0, 0.5, 0.0, 0.0]);
        let s6 = sig1(&[0.0, 1.0, 0.0, 0.5]);

        for gamma in [0.9, 0.5, 0.1] {
            let phi = Formula::eventually_weighted(
                TimeInterval::new(0, 3).unwrap(),
                WeightFn::Discount(gamma),
                pred("s"),
            );
            let r4 = rob_weighted_agm(&phi, &s4, 0).unwrap();
            let r5 = rob_weighted_agm(&phi, &s5, 0).unwrap();
            let r6 = rob_weighted_agm(&phi, &s6, 0).unwrap();
            assert!(r5 > r6 && r6 > r4, "gamma {gamma}: {r5} {r6} {r4}");
        }

        let unweighted = Formula::eventually(TimeInterval::new(0, 3).unwrap(), pred("s"));
        for s in [&s4, &s5, &s6] {
            assert_eq!(rob_traditional(&unweighted, s, 0).unwrap(), 1.0);
            let r = rob_weighted_agm(&unweighted, s, 0).unwrap();
            assert!((r - 0.375).abs() < 1e-12);
        }
    }

    #[test]
    fn satisfies_uses_the_unweighted_formula() {
        let cfg = SemanticsConfig::new(Engine::WeightedTraditional);
        let phi = Formula::and_weighted(
            vec![pred("a"), pred("b")],
            WeightFn::Explicit(vec![4.0, 2.0]),
        );
        assert_eq!(
            satisfies(&phi, &sig2(&[(0.25, 0.25)]), 0, &cfg).unwrap(),
            Verdict::Yes
        );
        assert_eq!(
            satisfies(&phi, &sig2(&[(0.0, 0.5)]), 0, &cfg).unwrap(),
            Verdict::Inconclusive
        );
        assert_eq!(
            satisfies(&phi, &sig2(&[(-0.1, 0.5)]), 0, &cfg).unwrap(),
            Verdict::No
        );
    }

    #[test]
    fn horizon_precondition_is_checked() {
        let phi = parse("G[0,7] (F[0,3] (s >= 0))").unwrap();
        let s = sig1(&[0.0; 8]);
        assert_eq!(
            rob_traditional(&phi, &s, 0),
            Err(EvalError::HorizonExceedsSignal {
                needed: 10,
                available: 7
            })
        );
        let long = sig1(&[1.0; 11]);
        assert!(rob_traditional(&phi, &long, 0).is_ok());
        assert!(rob_traditional(&phi, &long, 1).is_err());
    }

    #[test]
    fn unknown_component_is_reported() {
        let phi = parse("z >= 0").unwrap();
        assert_eq!(
            rob_traditional(&phi, &sig1(&[1.0]), 0),
            Err(EvalError::UnknownComponent("z".to_string()))
        );
    }

    #[test]
    fn rank_is_stable_and_descending() {
        let phi = parse("F[0,1] (s >= 0)").unwrap();
        let cfg = SemanticsConfig::new(Engine::WeightedTraditional);
        let signals = vec![
            sig1(&[0.2, 0.2]),
            sig1(&[0.9, 0.0]),
            sig1(&[0.2, 0.1]), // ties with the first: stable order keeps index 0 first
        ];
        let ranked = rank_signals(&phi, &signals, &cfg).unwrap();
        assert_eq!(ranked[0].0, 1);
        assert_eq!(ranked[1].0, 0);
        assert_eq!(ranked[2].0, 2);

        // a satisfied step counts with its own priority weight, here 1/2
        let single = rank_signals(&phi, &signals[..1], &cfg).unwrap();
        assert_eq!(single, vec![(0, 0.1)]);
    }

    #[test]
    fn trace_reports_per_node_values() {
        let phi = parse("G[0,1] (s >= 0)").unwrap();
        let cfg = SemanticsConfig::new(Engine::Traditional);
        let report = evaluate_report(&phi, &sig1(&[1.0, 2.0]), 0, &cfg, true).unwrap();
        let trace = report.trace.unwrap();
        assert_eq!(trace["root"][&0], 1.0);
        assert_eq!(trace["root.0"][&0], 1.0);
        assert_eq!(trace["root.0"][&1], 2.0);
    }

    #[test]
    fn box_membership_robustness_is_the_least_face_margin() {
        use crate::formula::box_region;

        // center of the unit box: distance 0.5 to every face
        let unit = box_region("unit", &[0.0, 0.0], &[1.0, 1.0], &["a", "b"]).unwrap();
        assert_eq!(
            rob_traditional(&unit, &sig2(&[(0.5, 0.5)]), 0).unwrap(),
            0.5
        );

        // brute force over sampled points: membership robustness equals the
        // minimum signed distance across faces
        let region = box_region("R", &[7.0, 1.0], &[9.0, 3.0], &["a", "b"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = (rng.random_range(0.0..12.0), rng.random_range(0.0..6.0));
            let by_faces = [p.0 - 7.0, 9.0 - p.0, p.1 - 1.0, 3.0 - p.1]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let r = rob_traditional(&region, &sig2(&[p]), 0).unwrap();
            assert_eq!(r, by_faces);
        }
    }

    #[test]
    fn boolean_mode_override() {
        let phi = parse("s - 10 >= 0").unwrap();
        let cfg = SemanticsConfig::new(Engine::Traditional)
            .with_predicate_mode(PredicateMode::boolean());
        let r = evaluate(&phi, &sig1(&[0.0]), 0, &cfg).unwrap();
        assert_eq!(r, -1.0);
    }
}
