//! Exact arithmetic over rationals and quadratic radical extensions.

mod algebraic;
mod quadratic;
mod rational;

pub use algebraic::{decimal_render, sqrt_exact, AlgebraicValue, NumberClass};
pub use quadratic::{solve_quadratic, QuadraticRoots};
pub use rational::Rational;

use thiserror::Error;

/// Errors from the exact number tower.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported arithmetic across radicands {left} and {right}")]
    MixedRadicands { left: String, right: String },
    #[error("cannot parse {0:?} as a rational")]
    ParseRational(String),
}
