//! Strictly positive weight functions and their normalization.
//!
//! Weights appear in two places: one weight per operand of an n-ary `&&` /
//! `||`, and a weight function over the steps of a temporal interval.
//! Parametric families are realized eagerly to plain vectors before
//! evaluation; semantics only ever see normalized vectors.

use crate::signal::TimeInterval;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("realized weight {value} at position {index} is not strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("realized weight at position {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("explicit weight vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("weight domain is empty")]
    EmptyDomain,
}

/// One Gaussian bump of a [`WeightFn::GaussianMixture`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussTerm {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

/// A strictly positive weight function, realized on demand over either a
/// number of operands or a time interval.
///
/// `Constant(1.0)` is the canonical "unweighted" marker; printers omit it.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFn {
    /// The same weight everywhere.
    Constant(f64),
    /// Discounting over time: weight `gamma^(t-1)` at step `t`.
    Discount(f64),
    /// One explicit weight per position.
    Explicit(Vec<f64>),
    /// `floor + sum_k amplitude_k * exp(-((t - center_k) / width_k)^2)`,
    /// for periodic or endpoint-shaped time preferences.
    GaussianMixture { floor: f64, terms: Vec<GaussTerm> },
}

impl WeightFn {
    pub fn unit() -> Self {
        WeightFn::Constant(1.0)
    }

    /// True for the canonical unweighted marker `Constant(1.0)`.
    pub fn is_unit(&self) -> bool {
        matches!(self, WeightFn::Constant(c) if *c == 1.0)
    }

    pub fn realize(&self, domain: WeightDomain) -> Result<Vec<f64>, WeightError> {
        realize_weights(self, domain)
    }
}

/// Where a weight function is realized: over `n` operands (positions
/// `0..n`) or over the absolute steps of a time interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightDomain {
    Count(usize),
    Interval(TimeInterval),
}

impl WeightDomain {
    fn positions(self) -> Result<Vec<f64>, WeightError> {
        let positions: Vec<f64> = match self {
            WeightDomain::Count(n) => (0..n).map(|i| i as f64).collect(),
            WeightDomain::Interval(interval) => interval.iter().map(|t| t as f64).collect(),
        };
        if positions.is_empty() {
            return Err(WeightError::EmptyDomain);
        }
        Ok(positions)
    }
}

/// Realizes a weight function to a strictly positive, unnormalized vector.
pub fn realize_weights(w: &WeightFn, domain: WeightDomain) -> Result<Vec<f64>, WeightError> {
    let positions = domain.positions()?;
    let values: Vec<f64> = match w {
        WeightFn::Constant(c) => positions.iter().map(|_| *c).collect(),
        WeightFn::Discount(gamma) => positions
            .iter()
            .map(|t| gamma.powi(*t as i32 - 1))
            .collect(),
        WeightFn::Explicit(v) => {
            if v.len() != positions.len() {
                return Err(WeightError::LengthMismatch {
                    expected: positions.len(),
                    found: v.len(),
                });
            }
            v.clone()
        }
        WeightFn::GaussianMixture { floor, terms } => positions
            .iter()
            .map(|t| {
                floor
                    + terms
                        .iter()
                        .map(|g| g.amplitude * (-((t - g.center) / g.width).powi(2)).exp())
                        .sum::<f64>()
            })
            .collect(),
    };
    check_positive(&values)?;
    Ok(values)
}

/// Normalizes strictly positive weights so they sum to 1.
///
/// Invariant under uniform scaling of the input: `normalize(c * w)` equals
/// `normalize(w)` to within 1e-12 for any `c > 0`.
pub fn normalize(weights: &[f64]) -> Result<Vec<f64>, WeightError> {
    if weights.is_empty() {
        return Err(WeightError::EmptyDomain);
    }
    check_positive(weights)?;
    let sum: f64 = weights.iter().sum();
    Ok(weights.iter().map(|w| w / sum).collect())
}

fn check_positive(values: &[f64]) -> Result<(), WeightError> {
    for (index, value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(WeightError::NonFiniteWeight { index });
        }
        if *value <= 0.0 {
            return Err(WeightError::NonPositiveWeight {
                index,
                value: *value,
            });
        }
    }
    Ok(())
}
