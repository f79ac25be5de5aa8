//! Weighted formula syntax tree and structural utilities.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::signal::TimeInterval;
use crate::weights::WeightFn;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("box region `{region}`: lo[{axis}] must be strictly below hi[{axis}]")]
    DegenerateBox { region: String, axis: usize },
    #[error("box region `{region}`: lo, hi, and components must have equal lengths")]
    DimensionMismatch { region: String },
    #[error("affine expression needs at least one nonzero coefficient")]
    NoCoefficients,
    #[error("affine expression has a non-finite coefficient or offset")]
    NonFinite,
}

/// An affine function of the signal components, as the normalized predicate
/// form `l(S(t)) >= 0` with `l(S) = sum_k coef_k * S_k + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineExpr {
    coefficients: BTreeMap<String, f64>,
    offset: f64,
}

impl AffineExpr {
    /// Builds `sum coef * component + offset`; zero coefficients are dropped
    /// and at least one nonzero coefficient must remain.
    pub fn new<I, S>(coefficients: I, offset: f64) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, coef) in coefficients {
            if !coef.is_finite() {
                return Err(FormulaError::NonFinite);
            }
            if coef != 0.0 {
                *map.entry(name.into()).or_insert(0.0) += coef;
            }
        }
        map.retain(|_, c| *c != 0.0);
        if map.is_empty() {
            return Err(FormulaError::NoCoefficients);
        }
        if !offset.is_finite() {
            return Err(FormulaError::NonFinite);
        }
        Ok(Self {
            coefficients: map,
            offset,
        })
    }

    /// Shorthand for `coef * component + offset >= 0`.
    pub fn single(component: &str, coef: f64, offset: f64) -> Self {
        Self::new([(component, coef)], offset).expect("nonzero coefficient")
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&str, f64)> {
        self.coefficients.iter().map(|(n, c)| (n.as_str(), *c))
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Negated expression, for rewriting `l <= 0` into `-l >= 0`.
    pub fn negated(&self) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|(n, c)| (n.clone(), -c))
                .collect(),
            offset: -self.offset,
        }
    }
}

/// How a predicate turns the affine value into robustness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredicateMode {
    /// Robustness is `scale * l(S(t))`; the default uses `scale = 1`.
    Metric { scale: f64 },
    /// Robustness is `+magnitude` when `l(S(t)) >= 0` and `-magnitude`
    /// otherwise.
    Boolean { magnitude: f64 },
}

impl PredicateMode {
    pub fn metric() -> Self {
        PredicateMode::Metric { scale: 1.0 }
    }

    pub fn boolean() -> Self {
        PredicateMode::Boolean { magnitude: 1.0 }
    }
}

impl Default for PredicateMode {
    fn default() -> Self {
        PredicateMode::metric()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub expr: AffineExpr,
    pub mode: PredicateMode,
}

/// Weighted formula syntax tree.
///
/// `And`/`Or` are n-ary with one weight per operand; `Always`/`Eventually`
/// carry a weight function over their interval. Binary chains written in the
/// text grammar parse to `subs.len() == 2`. Nested chains are *not*
/// flattened: `(a && b) && c` and `a && b && c` aggregate differently once
/// weighted.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    False,
    Predicate(Predicate),
    Not(Box<Formula>),
    And {
        subs: Vec<Formula>,
        weights: WeightFn,
    },
    Or {
        subs: Vec<Formula>,
        weights: WeightFn,
    },
    Always {
        interval: TimeInterval,
        weights: WeightFn,
        sub: Box<Formula>,
    },
    Eventually {
        interval: TimeInterval,
        weights: WeightFn,
        sub: Box<Formula>,
    },
}

impl Formula {
    pub fn pred(expr: AffineExpr) -> Self {
        Formula::Predicate(Predicate {
            expr,
            mode: PredicateMode::metric(),
        })
    }

    pub fn pred_mode(expr: AffineExpr, mode: PredicateMode) -> Self {
        Formula::Predicate(Predicate { expr, mode })
    }

    // constructor named for the connective, like `and`/`or` below
    #[allow(clippy::should_implement_trait)]
    pub fn not(sub: Formula) -> Self {
        Formula::Not(Box::new(sub))
    }

    /// Unweighted n-ary conjunction. Panics if fewer than two operands.
    pub fn and(subs: Vec<Formula>) -> Self {
        Self::and_weighted(subs, WeightFn::unit())
    }

    pub fn and_weighted(subs: Vec<Formula>, weights: WeightFn) -> Self {
        assert!(subs.len() >= 2, "conjunction needs at least two operands");
        Formula::And { subs, weights }
    }

    /// Unweighted n-ary disjunction. Panics if fewer than two operands.
    pub fn or(subs: Vec<Formula>) -> Self {
        Self::or_weighted(subs, WeightFn::unit())
    }

    pub fn or_weighted(subs: Vec<Formula>, weights: WeightFn) -> Self {
        assert!(subs.len() >= 2, "disjunction needs at least two operands");
        Formula::Or { subs, weights }
    }

    pub fn always(interval: TimeInterval, sub: Formula) -> Self {
        Self::always_weighted(interval, WeightFn::unit(), sub)
    }

    pub fn always_weighted(interval: TimeInterval, weights: WeightFn, sub: Formula) -> Self {
        Formula::Always {
            interval,
            weights,
            sub: Box::new(sub),
        }
    }

    pub fn eventually(interval: TimeInterval, sub: Formula) -> Self {
        Self::eventually_weighted(interval, WeightFn::unit(), sub)
    }

    pub fn eventually_weighted(interval: TimeInterval, weights: WeightFn, sub: Formula) -> Self {
        Formula::Eventually {
            interval,
            weights,
            sub: Box::new(sub),
        }
    }

    /// Smallest `H` such that evaluating the formula at time 0 reads only
    /// samples `0..=H`.
    pub fn horizon(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Predicate(_) => 0,
            Formula::Not(sub) => sub.horizon(),
            Formula::And { subs, .. } | Formula::Or { subs, .. } => {
                subs.iter().map(Formula::horizon).max().unwrap_or(0)
            }
            Formula::Always { interval, sub, .. }
            | Formula::Eventually { interval, sub, .. } => interval.b() + sub.horizon(),
        }
    }

    /// The unweighted version: the same tree with every weight replaced by
    /// the constant 1.
    pub fn strip_weights(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Predicate(p) => Formula::Predicate(p.clone()),
            Formula::Not(sub) => Formula::not(sub.strip_weights()),
            Formula::And { subs, .. } => Formula::And {
                subs: subs.iter().map(Formula::strip_weights).collect(),
                weights: WeightFn::unit(),
            },
            Formula::Or { subs, .. } => Formula::Or {
                subs: subs.iter().map(Formula::strip_weights).collect(),
                weights: WeightFn::unit(),
            },
            Formula::Always { interval, sub, .. } => Formula::Always {
                interval: *interval,
                weights: WeightFn::unit(),
                sub: Box::new(sub.strip_weights()),
            },
            Formula::Eventually { interval, sub, .. } => Formula::Eventually {
                interval: *interval,
                weights: WeightFn::unit(),
                sub: Box::new(sub.strip_weights()),
            },
        }
    }

    /// Largest aggregation arity in the tree: operand counts of `And`/`Or`
    /// and interval lengths of `Always`/`Eventually`. Used to pick the
    /// soundness margin of the smooth engine.
    pub fn max_arity(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Predicate(_) => 1,
            Formula::Not(sub) => sub.max_arity(),
            Formula::And { subs, .. } | Formula::Or { subs, .. } => subs
                .iter()
                .map(Formula::max_arity)
                .max()
                .unwrap_or(1)
                .max(subs.len()),
            Formula::Always { interval, sub, .. }
            | Formula::Eventually { interval, sub, .. } => {
                sub.max_arity().max(interval.len())
            }
        }
    }

    /// Number of aggregation levels (`And`/`Or`/`Always`/`Eventually`) on
    /// the deepest path.
    pub fn aggregation_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Predicate(_) => 0,
            Formula::Not(sub) => sub.aggregation_depth(),
            Formula::And { subs, .. } | Formula::Or { subs, .. } => {
                1 + subs.iter().map(Formula::aggregation_depth).max().unwrap_or(0)
            }
            Formula::Always { sub, .. } | Formula::Eventually { sub, .. } => {
                1 + sub.aggregation_depth()
            }
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::parser::print(self))
    }
}

/// Membership in the axis-aligned box `prod_k [lo_k, hi_k]` as a uniform
/// conjunction of the half-plane predicates `x_k - lo_k >= 0` and
/// `hi_k - x_k >= 0`.
pub fn box_region(
    name: &str,
    lo: &[f64],
    hi: &[f64],
    components: &[&str],
) -> Result<Formula, FormulaError> {
    box_region_mode(name, lo, hi, components, PredicateMode::metric())
}

/// [`box_region`] with an explicit predicate mode for every face.
pub fn box_region_mode(
    name: &str,
    lo: &[f64],
    hi: &[f64],
    components: &[&str],
    mode: PredicateMode,
) -> Result<Formula, FormulaError> {
    if lo.len() != hi.len() || lo.len() != components.len() || lo.is_empty() {
        return Err(FormulaError::DimensionMismatch {
            region: name.to_string(),
        });
    }
    let mut faces = Vec::with_capacity(2 * lo.len());
    for (axis, component) in components.iter().enumerate() {
        if lo[axis] >= hi[axis] {
            return Err(FormulaError::DegenerateBox {
                region: name.to_string(),
                axis,
            });
        }
        faces.push(Formula::pred_mode(
            AffineExpr::single(component, 1.0, -lo[axis]),
            mode,
        ));
        faces.push(Formula::pred_mode(
            AffineExpr::single(component, -1.0, hi[axis]),
            mode,
        ));
    }
    Ok(Formula::and(faces))
}
