//! Exact scalar arithmetic: arbitrary-precision rationals and the real
//! quadratic field Q(sqrt 3), with exact sign determination.
//!
//! The text syntax shared by every file format is `p/q` for rationals and
//! `p/q~u/v` for `p/q + (u/v)*sqrt(3)`; integers may omit the `/1`.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in reduced form with positive
/// denominator (maintained by `num`).
pub type Rat = Ratio<BigInt>;

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn rint(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// Exact sign of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn of_rat(r: &Rat) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if Signed::is_positive(r) {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    /// Sign of a product.
    pub fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Neg => write!(f, "-"),
            Sign::Zero => write!(f, "0"),
            Sign::Pos => write!(f, "+"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("empty scalar")]
    Empty,
    #[error("invalid integer part {0:?}")]
    BadInt(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("unexpected sqrt-3 part {0:?} in a rational-only context")]
    UnexpectedQuadPart(String),
}

/// Parses `p/q` or a bare integer. Negative denominators are normalized.
pub fn parse_rat(text: &str) -> Result<Rat, ScalarParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let (num_s, den_s) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer =
        BigInt::from_str(num_s).map_err(|_| ScalarParseError::BadInt(num_s.to_string()))?;
    let denom =
        BigInt::from_str(den_s).map_err(|_| ScalarParseError::BadInt(den_s.to_string()))?;
    if denom.is_zero() {
        return Err(ScalarParseError::ZeroDenominator(text.to_string()));
    }
    Ok(Ratio::new(numer, denom))
}

/// Tag distinguishing the two supported coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Rat,
    Qs3,
}

impl FieldTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Rat => "rat",
            FieldTag::Qs3 => "qs3",
        }
    }

    pub fn parse(s: &str) -> Option<FieldTag> {
        match s {
            "rat" => Some(FieldTag::Rat),
            "qs3" => Some(FieldTag::Qs3),
            _ => None,
        }
    }
}

/// An element `a + b*sqrt(3)` of Q(sqrt 3). Representation is unique, so
/// equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Qs3 {
    a: Rat,
    b: Rat,
}

impl Qs3 {
    pub fn new(a: Rat, b: Rat) -> Qs3 {
        Qs3 { a, b }
    }

    pub fn from_rat(a: Rat) -> Qs3 {
        Qs3 { a, b: Rat::zero() }
    }

    /// The element `sqrt(3)`.
    pub fn sqrt3() -> Qs3 {
        Qs3 { a: Rat::zero(), b: Rat::one() }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn quad_part(&self) -> &Rat {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign of `a + b*sqrt(3)`. When `a` and `b` disagree in sign the
    /// comparison reduces to `a^2` versus `3 b^2`, which is exact.
    pub fn sign(&self) -> Sign {
        let sa = Sign::of_rat(&self.a);
        let sb = Sign::of_rat(&self.b);
        match (sa, sb) {
            (Sign::Zero, Sign::Zero) => Sign::Zero,
            (s, Sign::Zero) | (Sign::Zero, s) => s,
            (x, y) if x == y => x,
            _ => {
                let a2 = &self.a * &self.a;
                let b2_3 = &self.b * &self.b * rint(3);
                match a2.cmp(&b2_3) {
                    std::cmp::Ordering::Greater => sa,
                    std::cmp::Ordering::Less => sb,
                    // a^2 = 3 b^2 has no nonzero rational solutions.
                    std::cmp::Ordering::Equal => unreachable!("sqrt(3) is irrational"),
                }
            }
        }
    }

    /// Multiplicative inverse; `None` for zero. Uses the conjugate:
    /// `1/(a + b s) = (a - b s) / (a^2 - 3 b^2)`.
    pub fn inverse(&self) -> Option<Qs3> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.a * &self.a - &self.b * &self.b * rint(3);
        debug_assert!(!norm.is_zero());
        Some(Qs3 { a: &self.a / &norm, b: -(&self.b / &norm) })
    }

    pub fn checked_div(&self, rhs: &Qs3) -> Option<Qs3> {
        rhs.inverse().map(|inv| self.clone() * inv)
    }

    pub fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.a).unwrap_or(f64::NAN)
            + ToPrimitive::to_f64(&self.b).unwrap_or(f64::NAN) * 3f64.sqrt()
    }
}

impl PartialOrd for Qs3 {
    fn partial_cmp(&self, other: &Qs3) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Qs3 {
    fn cmp(&self, other: &Qs3) -> std::cmp::Ordering {
        let diff = self.clone() - other.clone();
        match diff.sign() {
            Sign::Neg => std::cmp::Ordering::Less,
            Sign::Zero => std::cmp::Ordering::Equal,
            Sign::Pos => std::cmp::Ordering::Greater,
        }
    }
}

impl Add for Qs3 {
    type Output = Qs3;
    fn add(self, rhs: Qs3) -> Qs3 {
        Qs3 { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for Qs3 {
    type Output = Qs3;
    fn sub(self, rhs: Qs3) -> Qs3 {
        Qs3 { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Mul for Qs3 {
    type Output = Qs3;
    fn mul(self, rhs: Qs3) -> Qs3 {
        // (a1 + b1 s)(a2 + b2 s) = (a1 a2 + 3 b1 b2) + (a1 b2 + a2 b1) s
        let a = &self.a * &rhs.a + rint(3) * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &rhs.a * &self.b;
        Qs3 { a, b }
    }
}

impl Div for Qs3 {
    type Output = Qs3;
    fn div(self, rhs: Qs3) -> Qs3 {
        self.checked_div(&rhs).expect("division by zero in Q(sqrt 3)")
    }
}

impl Neg for Qs3 {
    type Output = Qs3;
    fn neg(self) -> Qs3 {
        Qs3 { a: -self.a, b: -self.b }
    }
}

impl Zero for Qs3 {
    fn zero() -> Qs3 {
        Qs3 { a: Rat::zero(), b: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Qs3 {
    fn one() -> Qs3 {
        Qs3 { a: Rat::one(), b: Rat::zero() }
    }
}

impl fmt::Display for Qs3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}~{}", self.a, self.b)
        }
    }
}

impl From<Rat> for Qs3 {
    fn from(r: Rat) -> Qs3 {
        Qs3::from_rat(r)
    }
}

fn bigint_bits(x: &BigInt) -> u64 {
    x.magnitude().bits().max(1)
}

/// The coefficient field shared by matrices, polynomials and geometry.
/// Implemented by [`Rat`] and [`Qs3`]; all operations are exact.
pub trait Scalar:
    Clone
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    const TAG: FieldTag;

    fn from_rat(r: Rat) -> Self;
    fn from_int(n: i64) -> Self;
    fn sign(&self) -> Sign;
    fn to_f64(&self) -> f64;
    fn parse(text: &str) -> Result<Self, ScalarParseError>;
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
    /// Bit length of the largest numerator/denominator involved; the input
    /// size measure reported by the CLI.
    fn bit_len(&self) -> u64;
    /// Borrow as a rational when the value lies in Q; lets rational-only
    /// fast paths (fraction-free elimination) apply.
    fn as_rat(&self) -> Option<&Rat>;

    fn is_negative(&self) -> bool {
        self.sign() == Sign::Neg
    }
    fn is_positive(&self) -> bool {
        self.sign() == Sign::Pos
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rat {
    const TAG: FieldTag = FieldTag::Rat;

    fn from_rat(r: Rat) -> Rat {
        r
    }

    fn from_int(n: i64) -> Rat {
        rint(n)
    }

    fn sign(&self) -> Sign {
        Sign::of_rat(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Rat, ScalarParseError> {
        if text.contains('~') {
            return Err(ScalarParseError::UnexpectedQuadPart(text.to_string()));
        }
        parse_rat(text)
    }

    fn checked_div(&self, rhs: &Rat) -> Option<Rat> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn bit_len(&self) -> u64 {
        bigint_bits(self.numer()).max(bigint_bits(self.denom()))
    }

    fn as_rat(&self) -> Option<&Rat> {
        Some(self)
    }
}

impl Scalar for Qs3 {
    const TAG: FieldTag = FieldTag::Qs3;

    fn from_rat(r: Rat) -> Qs3 {
        Qs3::from_rat(r)
    }

    fn from_int(n: i64) -> Qs3 {
        Qs3::from_rat(rint(n))
    }

    fn sign(&self) -> Sign {
        Qs3::sign(self)
    }

    fn to_f64(&self) -> f64 {
        Qs3::to_f64(self)
    }

    fn parse(text: &str) -> Result<Qs3, ScalarParseError> {
        match text.split_once('~') {
            Some((a, b)) => Ok(Qs3::new(parse_rat(a)?, parse_rat(b)?)),
            None => Ok(Qs3::from_rat(parse_rat(text)?)),
        }
    }

    fn checked_div(&self, rhs: &Qs3) -> Option<Qs3> {
        Qs3::checked_div(self, rhs)
    }

    fn bit_len(&self) -> u64 {
        Scalar::bit_len(&self.a).max(Scalar::bit_len(&self.b))
    }

    fn as_rat(&self) -> Option<&Rat> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalizeError {
    #[error("cannot rationalize a non-finite value")]
    NonFinite,
    #[error("denominator bound must be at least 1")]
    BadBound,
}

/// Best rational approximation of `x` with denominator at most `denom_bound`,
/// computed from the continued fraction of the exact dyadic value of `x`.
/// The final step compares the last convergent against the largest admissible
/// semiconvergent, so the result is optimal among all denominators in range.
pub fn rationalize(x: f64, denom_bound: u64) -> Result<Rat, RationalizeError> {
    if !x.is_finite() {
        return Err(RationalizeError::NonFinite);
    }
    if denom_bound < 1 {
        return Err(RationalizeError::BadBound);
    }
    let exact = Rat::from_float(x).ok_or(RationalizeError::NonFinite)?;
    let negative = Signed::is_negative(&exact);
    let target = Signed::abs(&exact);
    let bound = BigInt::from(denom_bound);

    let mut num = target.numer().clone();
    let mut den = target.denom().clone();

    // Convergents p/q of the continued fraction of target.
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let a0 = &num / &den;
    let mut p = a0.clone();
    let mut q = BigInt::one();
    let rem = &num - &a0 * &den;
    num = std::mem::replace(&mut den, rem);

    let result = loop {
        if den.is_zero() {
            break Ratio::new(p, q);
        }
        let a = &num / &den;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        if q_next > bound {
            // Largest semiconvergent with denominator within the bound.
            let k = (&bound - &q_prev) / &q;
            let convergent = Ratio::new(p.clone(), q.clone());
            if k.is_zero() {
                break convergent;
            }
            let semi = Ratio::new(&k * &p + &p_prev, &k * &q + &q_prev);
            let d_conv = Signed::abs(&(&target - &convergent));
            let d_semi = Signed::abs(&(&target - &semi));
            break if d_semi < d_conv { semi } else { convergent };
        }
        let rem = &num - &a * &den;
        num = std::mem::replace(&mut den, rem);
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    };

    Ok(if negative { -result } else { result })
}
