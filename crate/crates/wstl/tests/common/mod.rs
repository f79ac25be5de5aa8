//! Shared generators for randomized test suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use wstl::formula::{AffineExpr, Formula, PredicateMode};
use wstl::signal::{Signal, TimeInterval};
use wstl::weights::{GaussTerm, WeightFn};

#[derive(Clone)]
pub struct GenOptions {
    pub max_depth: usize,
    pub components: Vec<String>,
    /// Allow `!` and negative predicate coefficients.
    pub allow_negation: bool,
    /// Attach random (non-unit) weights.
    pub weighted: bool,
    /// Allow TRUE/FALSE leaves (robustness becomes infinite under some
    /// engines).
    pub allow_constants: bool,
    /// Mix in `bool`/`scale` predicate modes.
    pub modes: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            max_depth: 4,
            components: vec!["a".to_string(), "b".to_string()],
            allow_negation: true,
            weighted: true,
            allow_constants: false,
            modes: false,
        }
    }
}

pub fn random_formula(rng: &mut ChaCha8Rng, opts: &GenOptions) -> Formula {
    random_node(rng, opts, opts.max_depth)
}

fn random_node(rng: &mut ChaCha8Rng, opts: &GenOptions, depth: usize) -> Formula {
    if depth == 0 {
        if opts.allow_constants && rng.random_bool(0.08) {
            return if rng.random_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            };
        }
        return random_predicate(rng, opts);
    }
    let roll = rng.random_range(0..100);
    match roll {
        0..=24 => random_predicate(rng, opts),
        25..=39 if opts.allow_negation => Formula::not(random_node(rng, opts, depth - 1)),
        25..=39 => random_predicate(rng, opts),
        40..=59 => {
            let n = rng.random_range(2..=3);
            let subs = (0..n).map(|_| random_node(rng, opts, depth - 1)).collect();
            Formula::and_weighted(subs, random_operand_weights(rng, opts, n))
        }
        60..=79 => {
            let n = rng.random_range(2..=3);
            let subs = (0..n).map(|_| random_node(rng, opts, depth - 1)).collect();
            Formula::or_weighted(subs, random_operand_weights(rng, opts, n))
        }
        _ => {
            let a = rng.random_range(0..=2usize);
            let b = a + rng.random_range(0..=3usize);
            let interval = TimeInterval::new(a, b).unwrap();
            let weights = random_temporal_weights(rng, opts, interval);
            let sub = random_node(rng, opts, depth - 1);
            if roll < 90 {
                Formula::always_weighted(interval, weights, sub)
            } else {
                Formula::eventually_weighted(interval, weights, sub)
            }
        }
    }
}

fn random_predicate(rng: &mut ChaCha8Rng, opts: &GenOptions) -> Formula {
    let count = rng.random_range(1..=opts.components.len().min(2));
    let mut names = opts.components.clone();
    names.shuffle(rng);
    let coefficients: Vec<(String, f64)> = names
        .into_iter()
        .take(count)
        .map(|name| {
            let magnitude = rng.random_range(0.25..2.0);
            let coef = if opts.allow_negation && rng.random_bool(0.4) {
                -magnitude
            } else {
                magnitude
            };
            (name, coef)
        })
        .collect();
    let offset = rng.random_range(-2.0..2.0);
    let expr = AffineExpr::new(coefficients, offset).unwrap();
    let mode = if opts.modes && rng.random_bool(0.2) {
        if rng.random_bool(0.5) {
            PredicateMode::Boolean {
                magnitude: rng.random_range(0.5..2.0),
            }
        } else {
            PredicateMode::Metric {
                scale: rng.random_range(0.5..2.0),
            }
        }
    } else {
        PredicateMode::metric()
    };
    Formula::pred_mode(expr, mode)
}

fn random_operand_weights(rng: &mut ChaCha8Rng, opts: &GenOptions, n: usize) -> WeightFn {
    if !opts.weighted || rng.random_bool(0.3) {
        return WeightFn::unit();
    }
    WeightFn::Explicit((0..n).map(|_| rng.random_range(0.1..5.0)).collect())
}

fn random_temporal_weights(
    rng: &mut ChaCha8Rng,
    opts: &GenOptions,
    interval: TimeInterval,
) -> WeightFn {
    if !opts.weighted || rng.random_bool(0.3) {
        return WeightFn::unit();
    }
    match rng.random_range(0..4) {
        0 => WeightFn::Constant(rng.random_range(0.2..4.0)),
        1 => WeightFn::Discount(rng.random_range(0.3..1.4)),
        2 => WeightFn::Explicit(
            (0..interval.len())
                .map(|_| rng.random_range(0.1..5.0))
                .collect(),
        ),
        _ => WeightFn::GaussianMixture {
            floor: rng.random_range(0.1..1.0),
            terms: (0..rng.random_range(1..=2))
                .map(|_| GaussTerm {
                    center: rng.random_range(interval.a() as f64..=interval.b() as f64 + 0.5),
                    width: rng.random_range(0.3..2.0),
                    amplitude: rng.random_range(0.0..4.0),
                })
                .collect(),
        },
    }
}

pub fn random_signal(
    rng: &mut ChaCha8Rng,
    components: &[String],
    len: usize,
    lo: f64,
    hi: f64,
) -> Signal {
    let samples = (0..len)
        .map(|_| {
            components
                .iter()
                .map(|_| rng.random_range(lo..hi))
                .collect()
        })
        .collect();
    Signal::new(components.to_vec(), samples).unwrap()
}

/// A signal long enough for the formula's horizon, with headroom up to
/// `max_len`.
pub fn signal_for(
    rng: &mut ChaCha8Rng,
    formula: &Formula,
    components: &[String],
    max_len: usize,
) -> Signal {
    let needed = formula.horizon() + 1;
    let len = if needed >= max_len {
        needed
    } else {
        rng.random_range(needed..=max_len)
    };
    random_signal(rng, components, len, -3.0, 3.0)
}
