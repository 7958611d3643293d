//! Scalar fields used by every computation in the crate.
//!
//! Three fields are provided:
//!
//! - [`Rational`]: arbitrary-precision rationals, always in lowest terms.
//! - [`Quad`]: elements `a + b√d` of a real quadratic extension `ℚ(√d)`.
//! - [`Approx`]: double-precision reals compared with a single global tolerance.
//!
//! The [`Scalar`] trait is the common surface the linear-algebra kernel is written against.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Arbitrary-precision rational numbers.
pub type Rational = BigRational;

/// A field element as consumed by the linear-algebra kernel.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact and zero tests are decisive.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn inv(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// The value nearest to a double, for inexact fields only.
    fn from_float(_x: f64) -> Option<Self> {
        None
    }

    /// Zero test relative to a magnitude scale. Exact fields ignore the scale.
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn to_json(&self) -> Value;

    /// Short label of the field, as used in reports (`rational`, `quad:2`, `float`).
    fn field_label(&self) -> String;
}

/// Integer power with negative exponents allowed.
///
/// Panics when `x` is zero and `e` is negative.
pub fn powi<F: Scalar>(x: &F, e: i64) -> F {
    let base = if e < 0 { x.inv().expect("negative power of zero") } else { x.clone() };
    let mut acc = F::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * base.clone();
    }
    acc
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rational_to_json(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        Ok(BigRational::new(p, q))
    } else {
        BigInt::from_str(s)
            .map(BigRational::from_integer)
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_json(&self) -> Value {
        rational_to_json(self)
    }
    fn field_label(&self) -> String {
        "rational".into()
    }
}

// ---------------------------------------------------------------------------
// Quadratic extension
// ---------------------------------------------------------------------------

/// An element `a + b√d` of `ℚ(√d)` for a square-free integer `d > 1`.
///
/// Elements with `b = 0` are plain rationals and combine with any `d`; mixing two
/// irrational elements of different extensions panics.
#[derive(Clone, Debug)]
pub struct Quad {
    a: Rational,
    b: Rational,
    d: i64,
}

pub fn is_squarefree(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2i64;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl Quad {
    pub fn new(a: Rational, b: Rational, d: i64) -> Self {
        assert!(
            Zero::is_zero(&b) || is_squarefree(d),
            "quadratic extension needs a square-free d > 1, got {d}"
        );
        Quad { a, b, d }
    }

    pub fn rational(a: Rational) -> Self {
        Quad { a, b: Zero::zero(), d: 0 }
    }

    /// The element `√d`.
    pub fn sqrt_of(d: i64) -> Self {
        Quad::new(Zero::zero(), One::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    /// The radicand, or `None` for an element with no irrational part.
    pub fn radicand(&self) -> Option<i64> {
        if Zero::is_zero(&self.b) || self.d == 0 {
            None
        } else {
            Some(self.d)
        }
    }

    pub fn conjugate(&self) -> Self {
        Quad { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    fn merged_d(&self, other: &Quad) -> i64 {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) => {
                assert_eq!(x, y, "mixed quadratic extensions ℚ(√{x}) and ℚ(√{y})");
                x
            }
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => self.d.max(other.d),
        }
    }

    /// Sign of the real number `a + b√d` as -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a² with b²d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d));
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn parse(s: &str, d: i64) -> Result<Self> {
        let s = s.trim();
        let Some((prefix, radicand)) = s.split_once('√') else {
            return Ok(Quad::rational(parse_rational(s)?));
        };
        let rd: i64 = radicand
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad radicand in {s:?}")))?;
        if rd != d {
            return Err(Error::Parse(format!("{s:?} uses √{rd} but the field is ℚ(√{d})")));
        }
        if !is_squarefree(d) {
            return Err(Error::Parse(format!("radicand {d} is not square-free")));
        }
        let split = prefix
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (a_str, b_str) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("0", prefix),
        };
        let a = parse_rational(a_str)?;
        let b = match b_str.trim() {
            "" | "+" => One::one(),
            "-" => -<Rational as One>::one(),
            other => parse_rational(other)?,
        };
        Ok(Quad::new(a, b, d))
    }
}

fn sign_of(q: &Rational) -> i32 {
    if Zero::is_zero(q) {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        if self.a != other.a || self.b != other.b {
            return false;
        }
        Zero::is_zero(&self.b) || self.d == other.d
    }
}

impl Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.b) {
            return write!(f, "{}", self.a);
        }
        let d = self.d;
        if Zero::is_zero(&self.a) {
            write!(f, "{}√{d}", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}-{}√{d}", self.a, -self.b.clone())
        } else {
            write!(f, "{}+{}√{d}", self.a, self.b)
        }
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        let d = self.merged_d(&rhs);
        Quad { a: self.a + rhs.a, b: self.b + rhs.b, d }
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        let d = self.merged_d(&rhs);
        Quad { a: self.a - rhs.a, b: self.b - rhs.b, d }
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, rhs: Quad) -> Quad {
        let d = self.merged_d(&rhs);
        let dq = BigRational::from_integer(BigInt::from(d));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dq;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Quad { a, b, d }
    }
}

impl Div for Quad {
    type Output = Quad;
    fn div(self, rhs: Quad) -> Quad {
        self * rhs.inv().expect("division by zero in ℚ(√d)")
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Scalar for Quad {
    const EXACT: bool = true;

    fn zero() -> Self {
        Quad::rational(Zero::zero())
    }
    fn one() -> Self {
        Quad::rational(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn from_i64(v: i64) -> Self {
        Quad::rational(BigRational::from_integer(BigInt::from(v)))
    }
    fn from_rational(q: &Rational) -> Self {
        Quad::rational(q.clone())
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let dq = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * dq;
        Some(Quad { a: &self.a / &norm, b: -(&self.b / &norm), d: self.d })
    }
    fn to_f64(&self) -> f64 {
        let a = Scalar::to_f64(&self.a);
        if Zero::is_zero(&self.b) {
            a
        } else {
            a + Scalar::to_f64(&self.b) * (self.d as f64).sqrt()
        }
    }
    fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn field_label(&self) -> String {
        match self.radicand() {
            Some(d) => format!("quad:{d}"),
            None if self.d > 0 => format!("quad:{}", self.d),
            None => "quad".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Approximate reals
// ---------------------------------------------------------------------------

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(f64::to_bits(1e-9));

/// Current comparison tolerance for [`Approx`].
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Sets the process-wide tolerance used by [`Approx`] comparisons.
pub fn set_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    Ok(())
}

/// A double-precision real. Equality means `|x - y| <= tol * max(1, |x|, |y|)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Approx(pub f64);

impl PartialEq for Approx {
    fn eq(&self, other: &Self) -> bool {
        let (x, y) = (self.0, other.0);
        (x - y).abs() <= tolerance() * 1f64.max(x.abs()).max(y.abs())
    }
}

impl Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        Approx(self.0 + rhs.0)
    }
}
impl Sub for Approx {
    type Output = Approx;
    fn sub(self, rhs: Approx) -> Approx {
        Approx(self.0 - rhs.0)
    }
}
impl Mul for Approx {
    type Output = Approx;
    fn mul(self, rhs: Approx) -> Approx {
        Approx(self.0 * rhs.0)
    }
}
impl Div for Approx {
    type Output = Approx;
    fn div(self, rhs: Approx) -> Approx {
        Approx(self.0 / rhs.0)
    }
}
impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;

    fn zero() -> Self {
        Approx(0.0)
    }
    fn one() -> Self {
        Approx(1.0)
    }
    fn is_zero(&self) -> bool {
        self.0.abs() <= tolerance()
    }
    fn from_i64(v: i64) -> Self {
        Approx(v as f64)
    }
    fn from_rational(q: &Rational) -> Self {
        Approx(Scalar::to_f64(q))
    }
    fn from_float(x: f64) -> Option<Self> {
        Some(Approx(x))
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0.0 {
            None
        } else {
            Some(Approx(1.0 / self.0))
        }
    }
    fn to_f64(&self) -> f64 {
        self.0
    }
    fn abs(&self) -> Self {
        Approx(self.0.abs())
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.0.abs() <= tolerance() * scale.max(1.0)
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(self.0).map(Value::Number).unwrap_or(Value::Null)
    }
    fn field_label(&self) -> String {
        "float".into()
    }
}

/// Which concrete field a computation runs in; parsed from `rational`, `quad:d`, `float`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    Quad(i64),
    Float,
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rational" => Ok(FieldKind::Rational),
            "float" => Ok(FieldKind::Float),
            other => {
                let d = other
                    .strip_prefix("quad:")
                    .ok_or_else(|| Error::Parse(format!("unknown field {other:?}")))?;
                let d: i64 = d.parse().map_err(|_| Error::Parse(format!("bad radicand in {other:?}")))?;
                if !is_squarefree(d) {
                    return Err(Error::Parse(format!("radicand {d} is not a square-free integer > 1")));
                }
                Ok(FieldKind::Quad(d))
            }
        }
    }
}

impl Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::Quad(d) => write!(f, "quad:{d}"),
            FieldKind::Float => write!(f, "float"),
        }
    }
}

/// Parses one JSON scalar into a field element of the given kind.
pub trait ParseScalar: Scalar {
    fn from_json(v: &Value, kind: FieldKind) -> Result<Self>;
}

fn json_as_str(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
    }
}

impl ParseScalar for Rational {
    fn from_json(v: &Value, _kind: FieldKind) -> Result<Self> {
        let s = json_as_str(v)?;
        if s.contains(['.', 'e', 'E']) {
            return Err(Error::Parse(format!("{s:?} is not an exact rational")));
        }
        parse_rational(&s)
    }
}

impl ParseScalar for Quad {
    fn from_json(v: &Value, kind: FieldKind) -> Result<Self> {
        let FieldKind::Quad(d) = kind else {
            return Err(Error::Parse(format!("field {kind} is not a quadratic extension")));
        };
        Quad::parse(&json_as_str(v)?, d)
    }
}

impl ParseScalar for Approx {
    fn from_json(v: &Value, _kind: FieldKind) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .map(Approx)
                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => {
                if let Ok(x) = s.trim().parse::<f64>() {
                    Ok(Approx(x))
                } else {
                    Ok(Approx(Scalar::to_f64(&parse_rational(s)?)))
                }
            }
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn rationals_are_reduced() {
        let x = q(6, -4);
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(*x.denom(), BigInt::from(2));
    }

    #[test]
    fn quad_arithmetic_closes() {
        let s2 = Quad::sqrt_of(2);
        let one_plus = Quad::one() + s2.clone();
        // (1+√2)(√2-1) = 1
        let other = s2.clone() - Quad::one();
        assert_eq!(one_plus.clone() * other.clone(), Quad::one());
        assert_eq!(one_plus.inv().unwrap(), other);
        assert_eq!(s2.clone() * s2, Quad::from_i64(2));
    }

    #[test]
    fn quad_sign_and_abs() {
        let x = Quad::new(q(3, 2), q(-1, 1), 2); // 1.5 - 1.414 > 0
        assert_eq!(x.signum(), 1);
        let y = Quad::new(q(7, 5), q(-1, 1), 2); // 1.4 - 1.414 < 0
        assert_eq!(y.signum(), -1);
        assert_eq!(y.abs(), -y.clone());
    }

    #[test]
    fn quad_parse_roundtrip() {
        for s in ["1/2+3/4√2", "-1/3-2√2", "5√2", "-√2", "7/3"] {
            let x = Quad::parse(s, 2).unwrap();
            assert_eq!(Quad::parse(&x.to_string(), 2).unwrap(), x, "{s}");
        }
        assert_eq!(Quad::parse("-√2", 2).unwrap(), -Quad::sqrt_of(2));
        assert!(Quad::parse("1+√3", 2).is_err());
    }

    #[test]
    #[should_panic(expected = "mixed quadratic extensions")]
    fn mixing_extensions_panics() {
        let _ = Quad::sqrt_of(2) + Quad::sqrt_of(3);
    }

    #[test]
    fn approx_equality_is_relative() {
        assert_eq!(Approx(1e12), Approx(1e12 + 1.0));
        assert_ne!(Approx(1.0), Approx(1.0 + 1e-6));
        assert!(Approx(1e-10).is_zero());
    }

    #[test]
    fn field_kind_parsing() {
        assert_eq!("quad:2".parse::<FieldKind>().unwrap(), FieldKind::Quad(2));
        assert_eq!("float".parse::<FieldKind>().unwrap(), FieldKind::Float);
        assert!("quad:4".parse::<FieldKind>().is_err());
        assert!("complex".parse::<FieldKind>().is_err());
    }
}
