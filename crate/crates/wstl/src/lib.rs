//! Weighted signal temporal logic over discrete-time signals.
//!
//! This crate extends classical signal temporal logic with strictly positive
//! weights on Boolean connectives (one weight per operand of `&&` / `||`) and
//! on temporal operators (a weight function over the interval of `G` / `F`).
//! Weights express how *important* each obligatory part is and which of
//! several alternatives has *priority*, without changing the qualitative
//! (Boolean) meaning of a formula.
//!
//! The crate provides:
//!
//! * a text grammar and round-trip printer for weighted formulae ([`parser`]),
//! * four quantitative robustness engines sharing one recursive evaluator
//!   ([`semantics`]): the classical min/max robustness, a weighted min/max
//!   generalization, a weighted arithmetic–geometric-mean semantics, and a
//!   differentiable smooth approximation built on log-sum-exp,
//! * gradient-based control synthesis for discrete-time nonlinear systems
//!   that maximizes smooth weighted robustness minus a control cost
//!   ([`synthesis`]),
//! * a small command line front end ([`cli`]) and CSV/JSON file formats.
//!
//! # Example
//!
//! ```rust
//! use wstl::parser;
//! use wstl::semantics::{self, SemanticsConfig, Engine};
//! use wstl::signal::Signal;
//!
//! // "eventually s >= 0 within [0,3], preferring early satisfaction"
//! let phi = parser::parse("F[0,3]{disc 0.5} (s >= 0)").unwrap();
//! let signal = Signal::from_csv("s\n1\n0.5\n0\n0").unwrap();
//!
//! let cfg = SemanticsConfig::new(Engine::WeightedAgm);
//! let report = semantics::evaluate_report(&phi, &signal, 0, &cfg, false).unwrap();
//! assert!((report.value - 2.0 / 3.0).abs() < 1e-3);
//! ```

pub mod cli;
pub mod formula;
pub mod parser;
pub mod semantics;
pub mod signal;
pub mod synthesis;
pub mod weights;

mod util;

pub use formula::{box_region, AffineExpr, Formula, FormulaError, Predicate, PredicateMode};
pub use parser::{parse, print, ParseError};
pub use semantics::{Engine, RobustnessReport, SemanticsConfig, Verdict};
pub use signal::{Signal, SignalError, TimeInterval};
pub use weights::{normalize, realize_weights, WeightDomain, WeightError, WeightFn};
