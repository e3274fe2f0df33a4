//! Exact roots of quadratics with rational coefficients.

use serde::Serialize;

use super::algebraic::AlgebraicValue;
use super::rational::Rational;

/// Exact solution set of `a*x^2 + b*x + c = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadraticRoots {
    /// Two roots, low then high when real (coefficient order when imaginary).
    Two(AlgebraicValue, AlgebraicValue),
    /// Linear case `a = 0, b != 0`.
    One(AlgebraicValue),
    /// `a = b = 0` with `c != 0`: no value satisfies the equation.
    NoSolution,
    /// `a = b = c = 0`: every value satisfies the equation.
    Indeterminate,
}

pub fn solve_quadratic(a: &Rational, b: &Rational, c: &Rational) -> QuadraticRoots {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() {
                QuadraticRoots::Indeterminate
            } else {
                QuadraticRoots::NoSolution
            };
        }
        return QuadraticRoots::One(AlgebraicValue::from_rational(-(c / b)));
    }
    let disc = b.square() - Rational::int(4) * a * c;
    let two_a = Rational::int(2) * a;
    let base = -(b / &two_a);
    // sqrt(disc)/|2a|, a pure radical with positive coefficient so the
    // +/- branches come out ordered low/high whenever they are real
    let spread = AlgebraicValue::new(
        Rational::zero(),
        two_a.abs().recip().expect("2a nonzero"),
        disc,
    );
    let lo = AlgebraicValue::from_rational(base.clone()) - &spread;
    let hi = AlgebraicValue::from_rational(base) + &spread;
    QuadraticRoots::Two(lo, hi)
}
