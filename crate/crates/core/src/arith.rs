//! Scalar abstraction shared by the exact, floating-point, forward-mode and
//! univariate-limit evaluators, plus rational parsing/formatting helpers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// Field-like value the localization sums can be evaluated over.
///
/// Implementations: [`Q`] (exact), `f64`, [`Dual`] (exact or float
/// gradients) and [`crate::ratfunc::RatFunc`] (univariate limits).
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_q(q: &Q) -> Self;

    /// True when the value is exactly zero; used to refuse division.
    fn is_exactly_zero(&self) -> bool;

    fn zero_value() -> Self {
        Self::from_q(&Q::zero())
    }

    fn one_value() -> Self {
        Self::from_q(&Q::one())
    }

    fn scale(&self, q: &Q) -> Self {
        self.clone() * Self::from_q(q)
    }
}

impl Scalar for Q {
    fn from_q(q: &Q) -> Self {
        q.clone()
    }

    fn is_exactly_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for f64 {
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }

    fn is_exactly_zero(&self) -> bool {
        *self == 0.0
    }
}

/// Forward-mode dual number: a value together with its gradient.
///
/// An empty gradient stands for the zero vector, so constants can be built
/// without knowing the number of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub grad: Vec<T>,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(value: T) -> Self {
        Dual { value, grad: Vec::new() }
    }

    /// Seed one dual variable per coordinate.
    pub fn variables(point: &[T]) -> Vec<Self> {
        let k = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut grad = vec![T::zero_value(); k];
                grad[i] = T::one_value();
                Dual { value: v.clone(), grad }
            })
            .collect()
    }

    /// Gradient padded to `k` entries.
    pub fn gradient(&self, k: usize) -> Vec<T> {
        let mut g = self.grad.clone();
        g.resize(k, T::zero_value());
        g
    }

    fn zip_grad(a: &[T], b: &[T], f: impl Fn(Option<&T>, Option<&T>) -> T) -> Vec<T> {
        let len = a.len().max(b.len());
        (0..len).map(|i| f(a.get(i), b.get(i))).collect()
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let grad = Self::zip_grad(&self.grad, &rhs.grad, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() + y.clone(),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => T::zero_value(),
        });
        Dual { value: self.value + rhs.value, grad }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { value: -self.value, grad: self.grad.into_iter().map(|g| -g).collect() }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.value, &rhs.value);
        let grad = Self::zip_grad(&self.grad, &rhs.grad, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.clone() * b.clone() + y.clone() * a.clone(),
            (Some(x), None) => x.clone() * b.clone(),
            (None, Some(y)) => y.clone() * a.clone(),
            (None, None) => T::zero_value(),
        });
        Dual { value: self.value * rhs.value, grad }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (&self.value, &rhs.value);
        let b2 = b.clone() * b.clone();
        let grad = Self::zip_grad(&self.grad, &rhs.grad, |x, y| {
            let num = match (x, y) {
                (Some(x), Some(y)) => x.clone() * b.clone() - y.clone() * a.clone(),
                (Some(x), None) => x.clone() * b.clone(),
                (None, Some(y)) => -(y.clone() * a.clone()),
                (None, None) => T::zero_value(),
            };
            num / b2.clone()
        });
        Dual { value: a.clone() / b.clone(), grad }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_q(q: &Q) -> Self {
        Dual::constant(T::from_q(q))
    }

    fn is_exactly_zero(&self) -> bool {
        self.value.is_exactly_zero()
    }
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q_int(x)).collect()
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite float.
pub fn f64_to_q(x: f64) -> Option<Q> {
    Q::from_float(x)
}

pub fn dot<T: Scalar>(covector: &[Q], v: &[T]) -> T {
    covector
        .iter()
        .zip(v)
        .fold(T::zero_value(), |acc, (c, x)| if c.is_zero() { acc } else { acc + x.scale(c) })
}

pub fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn pow2(n: usize) -> BigInt {
    BigInt::one() << n
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Parse `p`, `p/q` or a finite decimal such as `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| err())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Q::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = t.parse().map_err(|_| err())?;
    Ok(Q::from_integer(p))
}

/// Parse a comma-separated rational vector such as `1,1/2,3`.
pub fn parse_rational_vec(s: &str) -> Result<Vec<Q>, ParseRationalError> {
    s.split(',').map(parse_rational).collect()
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn format_rational_vec(v: &[Q]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

/// Decimal rendering with 17 significant digits.
pub fn format_decimal(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn rationalize(x: f64, max_den: u64) -> Q {
    let exact = match f64_to_q(x) {
        Some(q) => q,
        None => return Q::zero(),
    };
    let max_den = BigInt::from(max_den);
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            // best semiconvergent within the bound
            let t = (&max_den - &q0) / &q1;
            let semi = Q::new(&p0 + &t * &p1, &q0 + &t * &q1);
            let conv = Q::new(p1.clone(), q1.clone());
            return if (&semi - &exact).abs() < (&conv - &exact).abs() { semi } else { conv };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Q::from_integer(a);
        if frac.is_zero() {
            return Q::new(p1, q1);
        }
        rest = frac.recip();
    }
}
