//! Elements of a quadratic extension `q1 + q2*sqrt(d)` with exact
//! classification into rational, irrational and imaginary values.
//!
//! Whether a square root resolves is a decidable predicate here, not a
//! floating-point guess: construction folds perfect-square radicands back
//! into the rational part, so a value is irrational exactly when its radical
//! coefficient is nonzero and imaginary exactly when its radicand is also
//! negative. That classification is what the evaluators use to signal
//! violated assumptions.
//!
//! Two values belong to the same extension when the ratio of their radicands
//! is the square of a rational; arithmetic rescales one side onto the other.
//! Values with incompatible radicands can only be multiplied or divided when
//! both are pure radicals (zero rational part). No workflow in this crate
//! needs anything richer, and refusing mixed radicands keeps every predicate
//! decidable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::rational::{format_scaled_integer, Rational};
use super::ExactError;

/// Exact classification of an [`AlgebraicValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberClass {
    Rational,
    Irrational,
    Imaginary,
}

impl fmt::Display for NumberClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NumberClass::Rational => "rational",
            NumberClass::Irrational => "irrational",
            NumberClass::Imaginary => "imaginary",
        };
        f.write_str(s)
    }
}

/// `rational + coeff * sqrt(radicand)`, normalized on construction.
///
/// Invariants: when `coeff` is zero the radicand is zero too; a nonzero
/// radicand is never a perfect rational square (those fold into the rational
/// part); a negative radicand with `|radicand|` a perfect square is reduced
/// to radicand `-1`.
#[derive(Clone)]
pub struct AlgebraicValue {
    rational: Rational,
    coeff: Rational,
    radicand: Rational,
}

impl AlgebraicValue {
    pub fn new(rational: Rational, coeff: Rational, radicand: Rational) -> Self {
        if coeff.is_zero() || radicand.is_zero() {
            return AlgebraicValue {
                rational,
                coeff: Rational::zero(),
                radicand: Rational::zero(),
            };
        }
        if let Some(root) = radicand.sqrt_rational() {
            return AlgebraicValue {
                rational: rational + coeff * root,
                coeff: Rational::zero(),
                radicand: Rational::zero(),
            };
        }
        if radicand.is_negative() {
            if let Some(root) = radicand.abs().sqrt_rational() {
                return AlgebraicValue {
                    rational,
                    coeff: coeff * root,
                    radicand: Rational::int(-1),
                };
            }
        }
        AlgebraicValue {
            rational,
            coeff,
            radicand,
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        AlgebraicValue {
            rational: r,
            coeff: Rational::zero(),
            radicand: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn radical_coefficient(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn classification(&self) -> NumberClass {
        if self.coeff.is_zero() {
            NumberClass::Rational
        } else if self.radicand.is_negative() {
            NumberClass::Imaginary
        } else {
            NumberClass::Irrational
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.classification() != NumberClass::Imaginary
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero() && self.rational.is_zero()
    }

    /// The rational value, when the classification is `Rational`.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeff.is_zero() {
            Some(&self.rational)
        } else {
            None
        }
    }

    /// `sqrt(d1 / d2)` when the two radicands span the same extension.
    ///
    /// Radicands are compatible when their ratio is the square of a rational,
    /// which covers both positive and negative pairs.
    fn radicand_scale(from: &Rational, to: &Rational) -> Option<Rational> {
        (from / to).sqrt_rational()
    }

    /// Rewrites `self` over the radicand `to`, when compatible.
    fn rescale_to(&self, to: &Rational) -> Option<AlgebraicValue> {
        if self.coeff.is_zero() {
            return Some(AlgebraicValue {
                rational: self.rational.clone(),
                coeff: Rational::zero(),
                radicand: to.clone(),
            });
        }
        let scale = Self::radicand_scale(&self.radicand, to)?;
        Some(AlgebraicValue {
            rational: self.rational.clone(),
            coeff: &self.coeff * scale,
            radicand: to.clone(),
        })
    }

    /// Puts two values over a common radicand, if one exists.
    fn align(a: &AlgebraicValue, b: &AlgebraicValue) -> Option<(AlgebraicValue, AlgebraicValue)> {
        if a.coeff.is_zero() {
            return Some((a.rescale_to(&b.radicand)?, b.clone()));
        }
        let b2 = b.rescale_to(&a.radicand)?;
        Some((a.clone(), b2))
    }

    pub fn checked_add(&self, rhs: &AlgebraicValue) -> Result<AlgebraicValue, ExactError> {
        let (a, b) = Self::align(self, rhs).ok_or_else(|| self.mixed(rhs))?;
        Ok(AlgebraicValue::new(
            a.rational + b.rational,
            a.coeff + b.coeff,
            a.radicand,
        ))
    }

    pub fn checked_sub(&self, rhs: &AlgebraicValue) -> Result<AlgebraicValue, ExactError> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &AlgebraicValue) -> Result<AlgebraicValue, ExactError> {
        if let Some((a, b)) = Self::align(self, rhs) {
            // (r1 + c1 s)(r2 + c2 s) = r1 r2 + c1 c2 d + (r1 c2 + r2 c1) s
            let rational = &a.rational * &b.rational + &a.coeff * &b.coeff * &a.radicand;
            let coeff = &a.rational * &b.coeff + &b.rational * &a.coeff;
            return Ok(AlgebraicValue::new(rational, coeff, a.radicand));
        }
        // Pure radicals from different extensions combine into a product
        // radicand, kept to nonnegative radicands where principal roots
        // multiply without a sign rule.
        if self.rational.is_zero()
            && rhs.rational.is_zero()
            && !self.radicand.is_negative()
            && !rhs.radicand.is_negative()
        {
            return Ok(AlgebraicValue::new(
                Rational::zero(),
                &self.coeff * &rhs.coeff,
                &self.radicand * &rhs.radicand,
            ));
        }
        Err(self.mixed(rhs))
    }

    pub fn checked_div(&self, rhs: &AlgebraicValue) -> Result<AlgebraicValue, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some((a, b)) = Self::align(self, rhs) {
            // 1/(r + c s) = (r - c s)/(r^2 - c^2 d); the denominator cannot
            // vanish for a nonzero normalized value since d is not a square.
            let den = b.rational.square() - b.coeff.square() * &b.radicand;
            let conj = AlgebraicValue::new(b.rational.clone(), -&b.coeff, b.radicand.clone());
            let num = a.checked_mul(&conj)?;
            return Ok(AlgebraicValue::new(
                num.rational / &den,
                num.coeff / &den,
                num.radicand,
            ));
        }
        if self.rational.is_zero()
            && rhs.rational.is_zero()
            && !self.radicand.is_negative()
            && !rhs.radicand.is_negative()
        {
            return Ok(AlgebraicValue::new(
                Rational::zero(),
                self.coeff.checked_div(&rhs.coeff)?,
                self.radicand.checked_div(&rhs.radicand)?,
            ));
        }
        Err(self.mixed(rhs))
    }

    fn mixed(&self, rhs: &AlgebraicValue) -> ExactError {
        ExactError::MixedRadicands {
            left: self.radicand.to_string(),
            right: rhs.radicand.to_string(),
        }
    }

    /// Exact sign of a real value: `-1`, `0` or `1`.
    ///
    /// Panics on imaginary values; callers gate on [`Self::is_real`].
    pub fn sign(&self) -> i32 {
        assert!(self.is_real(), "sign of an imaginary value");
        if self.coeff.is_zero() {
            return self.rational.signum();
        }
        let r = self.rational.signum();
        let c = self.coeff.signum();
        if r == 0 {
            return c;
        }
        if r == c {
            return r;
        }
        // Sign decided by |r_part|^2 vs coeff^2 * radicand.
        match self
            .rational
            .square()
            .cmp(&(self.coeff.square() * &self.radicand))
        {
            Ordering::Greater => r,
            Ordering::Less => c,
            Ordering::Equal => 0, // unreachable: would mean the radicand is a square
        }
    }

    /// Exact comparison of two real values, `None` when either is imaginary
    /// or the extensions are incompatible.
    pub fn compare(&self, rhs: &AlgebraicValue) -> Option<Ordering> {
        if !self.is_real() || !rhs.is_real() {
            return None;
        }
        let diff = self.checked_sub(rhs).ok()?;
        Some(match diff.sign() {
            x if x < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Absolute value of a real element.
    pub fn abs_real(&self) -> AlgebraicValue {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// `(P, S, M, C)` with the value equal to `(P + S*sqrt(M)) / C`,
    /// `M >= 0` integer, `C > 0`. Only for real values.
    fn integer_form(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        debug_assert!(self.is_real());
        // coeff * sqrt(n/d) = (coeff/d) * sqrt(n*d); canonical d >= 1
        let m = self.radicand.numer() * self.radicand.denom();
        let c2 = &self.coeff / Rational::from(self.radicand.denom().clone());
        // common denominator of rational part and adjusted coefficient
        let den = self.rational.denom().lcm(c2.denom());
        let p = self.rational.numer() * (&den / self.rational.denom());
        let s = c2.numer() * (&den / c2.denom());
        (p, s, m, den)
    }

    /// Largest integer `<= self`, exact. Real values only.
    pub fn floor_int(&self) -> BigInt {
        assert!(self.is_real(), "floor of an imaginary value");
        if self.coeff.is_zero() {
            return self.rational.floor_int();
        }
        let (p, s, m, c) = self.integer_form();
        // s*sqrt(m) = sign(s) * sqrt(s^2 m); isqrt gives the numerator to
        // within one, an exact comparison walk fixes the rest.
        let s2m = (&s * &s) * &m;
        let root = s2m.sqrt();
        let approx_num = if s.is_negative() { &p - &root } else { &p + &root };
        let mut n = approx_num.div_floor(&c);
        let value_minus = |n: &BigInt| -> i32 {
            // sign of self - n
            let shifted = AlgebraicValue::new(
                &self.rational - Rational::from(n.clone()),
                self.coeff.clone(),
                self.radicand.clone(),
            );
            shifted.sign()
        };
        while value_minus(&n) < 0 {
            n -= 1;
        }
        while value_minus(&(&n + BigInt::from(1))) >= 0 {
            n += 1;
        }
        n
    }
}

/// Exact square root of a rational.
///
/// Perfect squares come back rational, positive non-squares irrational with
/// the input as radicand, and negative inputs imaginary.
pub fn sqrt_exact(x: &Rational) -> AlgebraicValue {
    if let Some(root) = x.sqrt_rational() {
        return AlgebraicValue::from_rational(root);
    }
    AlgebraicValue::new(Rational::zero(), Rational::one(), x.clone())
}

/// Correctly rounded decimal rendering, round half to even; imaginary values
/// render as a marker token.
pub fn decimal_render(x: &AlgebraicValue, digits: usize) -> String {
    if !x.is_real() {
        return "IMAGINARY".to_string();
    }
    if let Some(r) = x.as_rational() {
        return r.decimal(digits);
    }
    // Scale by 10^digits and round to the nearest integer. An irrational
    // value never ties, so nearest is decided by one exact comparison with
    // the midpoint.
    let scale = Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
    let scaled = AlgebraicValue::new(
        &x.rational * &scale,
        &x.coeff * &scale,
        x.radicand.clone(),
    );
    let floor = scaled.floor_int();
    let midpoint = AlgebraicValue::from_rational(
        Rational::from(floor.clone()) + Rational::ratio(1, 2),
    );
    let n = match scaled.compare(&midpoint) {
        Some(Ordering::Greater) => floor + 1,
        _ => floor,
    };
    format_scaled_integer(&n, digits)
}

impl PartialEq for AlgebraicValue {
    fn eq(&self, other: &Self) -> bool {
        if self.coeff.is_zero() && other.coeff.is_zero() {
            return self.rational == other.rational;
        }
        if self.rational != other.rational {
            return false;
        }
        match Self::radicand_scale(&other.radicand, &self.radicand) {
            Some(scale) => self.coeff == &other.coeff * scale,
            None => false,
        }
    }
}

impl Eq for AlgebraicValue {}

impl From<Rational> for AlgebraicValue {
    fn from(r: Rational) -> Self {
        AlgebraicValue::from_rational(r)
    }
}

impl From<&Rational> for AlgebraicValue {
    fn from(r: &Rational) -> Self {
        AlgebraicValue::from_rational(r.clone())
    }
}

impl Neg for &AlgebraicValue {
    type Output = AlgebraicValue;
    fn neg(self) -> AlgebraicValue {
        AlgebraicValue {
            rational: -&self.rational,
            coeff: -&self.coeff,
            radicand: self.radicand.clone(),
        }
    }
}

impl Neg for AlgebraicValue {
    type Output = AlgebraicValue;
    fn neg(self) -> AlgebraicValue {
        -&self
    }
}

macro_rules! panicking_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a, 'b> $trait<&'b AlgebraicValue> for &'a AlgebraicValue {
            type Output = AlgebraicValue;
            fn $method(self, rhs: &'b AlgebraicValue) -> AlgebraicValue {
                self.$checked(rhs).expect("algebraic arithmetic")
            }
        }
        impl $trait for AlgebraicValue {
            type Output = AlgebraicValue;
            fn $method(self, rhs: AlgebraicValue) -> AlgebraicValue {
                (&self).$checked(&rhs).expect("algebraic arithmetic")
            }
        }
        impl<'a> $trait<&'a AlgebraicValue> for AlgebraicValue {
            type Output = AlgebraicValue;
            fn $method(self, rhs: &'a AlgebraicValue) -> AlgebraicValue {
                (&self).$checked(rhs).expect("algebraic arithmetic")
            }
        }
        impl<'a> $trait<AlgebraicValue> for &'a AlgebraicValue {
            type Output = AlgebraicValue;
            fn $method(self, rhs: AlgebraicValue) -> AlgebraicValue {
                self.$checked(&rhs).expect("algebraic arithmetic")
            }
        }
    };
}

panicking_binop!(Add, add, checked_add);
panicking_binop!(Sub, sub, checked_sub);
panicking_binop!(Mul, mul, checked_mul);
panicking_binop!(Div, div, checked_div);

impl fmt::Display for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + ({})*sqrt({})", self.rational, self.coeff, self.radicand)
        }
    }
}

impl fmt::Debug for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for AlgebraicValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraicValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_algebraic(&s).map_err(serde::de::Error::custom)
    }
}

fn parse_algebraic(s: &str) -> Result<AlgebraicValue, ExactError> {
    let s = s.trim();
    match s.split_once("+ (") {
        None => Ok(AlgebraicValue::from_rational(s.parse()?)),
        Some((rat, rest)) => {
            let rational: Rational = rat.trim().parse()?;
            let rest = rest
                .strip_suffix(')')
                .ok_or_else(|| ExactError::ParseRational(s.to_string()))?;
            let (coeff, radicand) = rest
                .split_once(")*sqrt(")
                .ok_or_else(|| ExactError::ParseRational(s.to_string()))?;
            Ok(AlgebraicValue::new(
                rational,
                coeff.trim().parse()?,
                radicand.trim().parse()?,
            ))
        }
    }
}
