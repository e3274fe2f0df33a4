//! Exact algebraic evaluation of binary-classifier ensembles without ground
//! truth.
//!
//! The crate grades tests that have no answer key. Classifier decisions are
//! tallied into voting-pattern sketches, and algebraic consistency conditions
//! over those tallies pin down which evaluations are logically possible.
//! Everything is computed in exact rational arithmetic so that the
//! error-independent trio evaluator can use the *type* of its output as a
//! verdict: rational means consistent, irrational or imaginary means the
//! independence assumption is provably wrong on the test.
//!
//! Modules:
//! - [`exact`]: rationals, quadratic extensions, exact square roots.
//! - [`sketch`]: label-stream ingestion and voting-pattern counts.
//! - [`single`]: the space of single-classifier evaluations and its
//!   reduction after observing responses.
//! - [`pair`]: complete postulates for error-correlated pairs and the
//!   correlation solver.
//! - [`trio`]: the exact evaluator for three error-independent classifiers,
//!   with self-alarming outputs.
//! - [`baselines`]: majority voting and the agreement-equation solution,
//!   kept (flaw included) as diagnostics.
//! - [`synth`]: ground-truthed synthetic test generators.
//! - [`report`]: exact-plus-decimal report payloads shared by the CLI.

pub mod baselines;
pub mod exact;
pub mod pair;
pub mod report;
pub mod single;
pub mod sketch;
pub mod synth;
pub mod trio;

pub use exact::{
    decimal_render, solve_quadratic, sqrt_exact, AlgebraicValue, ExactError, NumberClass,
    QuadraticRoots, Rational,
};
