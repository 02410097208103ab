//! Scalar fields used throughout the crate.
//!
//! Three implementations share one trait: exact rationals ([`Rational`]) for
//! identity checks, `f64` for numerics, and [`Jet`] (value plus gradient) for
//! forward-mode differentiation of the search objective.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone
    + Debug
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
    /// True when arithmetic is exact and `is_zero` is a decidable test.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Lossless conversion of a finite float (rationals take its binary value).
    fn from_f64(v: f64) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// Size used for pivot selection.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
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
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Builds `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Forward-mode dual number: a value with its gradient with respect to a
/// fixed parameter vector. An empty gradient stands for the zero vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: Vec::new(),
        }
    }

    /// The `index`-th independent variable out of `count`.
    pub fn variable(value: f64, index: usize, count: usize) -> Self {
        let mut grad = vec![0.0; count];
        grad[index] = 1.0;
        Jet { value, grad }
    }

    pub fn derivative(&self, index: usize) -> f64 {
        self.grad.get(index).copied().unwrap_or(0.0)
    }

    fn combine(a: &[f64], wa: f64, b: &[f64], wb: f64) -> Vec<f64> {
        if a.len() == b.len() {
            return a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect();
        }
        if b.is_empty() {
            return a.iter().map(|x| wa * x).collect();
        }
        if a.is_empty() {
            return b.iter().map(|y| wb * y).collect();
        }
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| wa * a.get(i).copied().unwrap_or(0.0) + wb * b.get(i).copied().unwrap_or(0.0))
            .collect()
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        Jet {
            value: e,
            grad: self.grad.iter().map(|g| g * e).collect(),
        }
    }

    pub fn ln(&self) -> Self {
        Jet {
            value: self.value.ln(),
            grad: self.grad.iter().map(|g| g / self.value).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.value < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            grad: Jet::combine(&self.grad, 1.0, &rhs.grad, 1.0),
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            grad: Jet::combine(&self.grad, 1.0, &rhs.grad, -1.0),
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value * rhs.value,
            grad: Jet::combine(&self.grad, rhs.value, &rhs.grad, self.value),
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        Jet {
            value,
            grad: Jet::combine(&self.grad, inv, &rhs.grad, -value * inv),
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
        }
    }
}

impl Scalar for Jet {
    const EXACT: bool = false;

    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn one() -> Self {
        Jet::constant(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Jet::constant(v as f64)
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then(|| Jet::constant(v))
    }
    fn from_rational(r: &Rational) -> Self {
        Jet::constant(rational_to_f64(r))
    }
    fn to_f64(&self) -> f64 {
        self.value
    }
    fn is_zero(&self) -> bool {
        self.value == 0.0 && self.grad.iter().all(|g| *g == 0.0)
    }
}

/// Scalars with the transcendental functions the optimizer needs.
pub trait Real: Scalar {
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
}

impl Real for f64 {
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Real for Jet {
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        Jet {
            value: r,
            grad: self.grad.iter().map(|g| g / (2.0 * r)).collect(),
        }
    }
    fn abs(&self) -> Self {
        Jet::abs(self)
    }
}

/// Parses `"p/q"`, `"p"`, or (when `allow_float`) a decimal literal.
pub fn parse_rational(text: &str, allow_float: bool) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    if allow_float {
        let v: f64 = t.parse().ok()?;
        return <Rational as Scalar>::from_f64(v);
    }
    None
}

/// Canonical text form `p/q` (or `p` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// whose error is within `tol`, via the continued-fraction convergents.
/// Returns the last convergent reached if none meets `tol`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    let mut best = Rational::from_integer(BigInt::from_f64(x.round())?);
    for _ in 0..64 {
        let a = rest.floor();
        let ai = BigInt::from_f64(a)?;
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        best = Rational::new(h2.clone(), k2.clone());
        if (rational_to_f64(&best) - x).abs() <= tol {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_product_rule() {
        let x = Jet::variable(3.0, 0, 2);
        let y = Jet::variable(-2.0, 1, 2);
        let z = x.clone() * y.clone() / (x + Jet::constant(1.0));
        // z = xy/(x+1); dz/dx = y/(x+1)^2, dz/dy = x/(x+1)
        assert!((z.value + 1.5).abs() < 1e-15);
        assert!((z.derivative(0) + 2.0 / 16.0).abs() < 1e-15);
        assert!((z.derivative(1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-3/6", false), Some(ratio(-1, 2)));
        assert_eq!(parse_rational(" 4 ", false), Some(ratio(4, 1)));
        assert_eq!(parse_rational("0.5", false), None);
        assert_eq!(parse_rational("0.5", true), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1/0", true), None);
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&ratio(8, 4)), "2");
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.1 + 0.2, 1_000_000, 1e-12), Some(ratio(3, 10)));
        assert_eq!(rationalize(-2.0 / 7.0, 1_000_000, 1e-12), Some(ratio(-2, 7)));
        assert_eq!(rationalize(1e-17, 1_000_000, 1e-12), Some(ratio(0, 1)));
        let pi = rationalize(std::f64::consts::PI, 1000, 0.0).unwrap();
        assert_eq!(pi, ratio(355, 113));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Rational::from_integer(BigInt::from(10).pow(400));
        let r = big.clone() / (big * ratio(4, 1));
        assert_eq!(Scalar::to_f64(&r), 0.25);
    }
}
