//! Univariate polynomials and rational functions over Q.
//!
//! Used to evaluate the localization sums along a line `b0 + t d`, so that
//! values at non-generic points and leading terms at the boundary can be read
//! off exactly from the lowest-order coefficients.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{Scalar, Q};

/// Dense polynomial, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b t`
    pub fn linear(a: Q, b: Q) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(i.into()))
                .collect(),
        )
    }

    /// Coefficients of `p(t0 + s)` as a polynomial in `s`.
    pub fn shift(&self, t0: &Q) -> Poly {
        let step = Poly::linear(t0.clone(), Q::one());
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::new(vec![]), |acc, c| &(&acc * &step) + &Poly::constant(c.clone()))
    }

    /// Divide by `t^k`; the caller guarantees the low coefficients vanish.
    fn drop_low(&self, k: usize) -> Poly {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn scale(&self, q: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * q).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::new(vec![]);
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Outcome of reading a rational function near `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Laurent {
    /// The function vanishes identically.
    Zero,
    /// `coefficient * t^order + higher-order terms`.
    Leading { order: i64, coefficient: Q },
}

/// Quotient of two polynomials. Common factors are not cancelled except for
/// powers of `t`; values at zero are read off through [`RatFunc::laurent`].
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RatFunc { num, den };
        r.strip_t_powers();
        r
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::constant(Q::one()) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    fn strip_t_powers(&mut self) {
        if let (Some(a), Some(b)) = (self.num.order(), self.den.order()) {
            let k = a.min(b);
            if k > 0 {
                self.num = self.num.drop_low(k);
                self.den = self.den.drop_low(k);
            }
        }
    }

    /// Lowest-order term of the Laurent expansion at `t = 0`.
    pub fn laurent(&self) -> Laurent {
        match self.num.order() {
            None => Laurent::Zero,
            Some(a) => {
                let b = self.den.order().expect("nonzero denominator");
                Laurent::Leading {
                    order: a as i64 - b as i64,
                    coefficient: self.num.coeff(a) / self.den.coeff(b),
                }
            }
        }
    }

    /// Value at `t = 0` by continuity, or the pole order when there is none.
    pub fn value_at_zero(&self) -> Result<Q, u64> {
        match self.laurent() {
            Laurent::Zero => Ok(Q::zero()),
            Laurent::Leading { order: 0, coefficient } => Ok(coefficient),
            Laurent::Leading { order, .. } if order > 0 => Ok(Q::zero()),
            Laurent::Leading { order, .. } => Err((-order) as u64),
        }
    }

    /// The same function re-centred at `t0`, i.e. `s -> f(t0 + s)`.
    pub fn shift(&self, t0: &Q) -> RatFunc {
        RatFunc::new(self.num.shift(t0), self.den.shift(t0))
    }

    /// Value at `t0`, extended by continuity across removable singularities.
    pub fn value_at(&self, t0: &Q) -> Result<Q, u64> {
        if t0.is_zero() {
            return self.value_at_zero();
        }
        let d = self.den.eval(t0);
        if !d.is_zero() {
            return Ok(self.num.eval(t0) / d);
        }
        self.shift(t0).value_at_zero()
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den)
    }

    pub fn powi(&self, e: u32) -> RatFunc {
        (0..e).fold(RatFunc::one_value(), |acc, _| acc * self.clone())
    }
}

impl Add for RatFunc {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den);
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(num, &self.den * &rhs.den)
    }
}

impl Sub for RatFunc {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for RatFunc {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: self.num.scale(&-Q::one()), den: self.den }
    }
}

impl Mul for RatFunc {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for RatFunc {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.num.is_zero(), "division by the zero rational function");
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Scalar for RatFunc {
    fn from_q(q: &Q) -> Self {
        RatFunc::from_poly(Poly::constant(q.clone()))
    }

    fn is_exactly_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn scale(&self, q: &Q) -> Self {
        RatFunc { num: self.num.scale(q), den: self.den.clone() }
    }
}
