//! Truncated Laurent series in one variable with exact coefficients.
//!
//! A cheaper stand-in for [`crate::ratfunc::RatFunc`] when only the value at
//! `t = 0` is wanted: no polynomial gcds, so coefficient growth stays linear.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;

use crate::arith::{Scalar, Q};

/// Absolute precision of exactly known values.
const EXACT: i64 = 1 << 40;

/// `Σ coeffs[i] t^(val + i) + O(t^prec)`, with `coeffs[0] != 0` unless empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    val: i64,
    coeffs: Vec<Q>,
    prec: i64,
    /// Relative precision kept by inversion.
    cap: i64,
}

impl Series {
    /// `a + c t`, inverted to `cap` terms of relative precision.
    pub fn linear(a: Q, c: Q, cap: usize) -> Series {
        Series::build(0, vec![a, c], EXACT, cap as i64)
    }

    fn build(val: i64, coeffs: Vec<Q>, prec: i64, cap: i64) -> Series {
        let mut s = Series { val, coeffs, prec: prec.clamp(-EXACT, EXACT), cap };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len());
        self.coeffs.drain(..lead);
        self.val += lead as i64;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.val.min(self.prec);
        }
    }

    fn coeff(&self, e: i64) -> Q {
        usize::try_from(e - self.val).ok().and_then(|i| self.coeffs.get(i).cloned()).unwrap_or_else(Q::zero)
    }

    /// Coefficient of `t^0`. `Err(Some(p))` for a pole of order `p`,
    /// `Err(None)` when the precision ran out before `t^0`.
    pub fn value_at_zero(&self) -> Result<Q, Option<u64>> {
        if !self.coeffs.is_empty() && self.val < 0 {
            return Err(Some((-self.val) as u64));
        }
        if self.prec <= 0 {
            return Err(None);
        }
        Ok(self.coeff(0))
    }

    fn inverse(&self) -> Series {
        if self.coeffs.is_empty() {
            return Series { val: 0, coeffs: Vec::new(), prec: -EXACT, cap: self.cap };
        }
        let rel = (self.prec - self.val).min(self.cap.max(1));
        let len = rel as usize;
        let a0 = &self.coeffs[0];
        let mut out: Vec<Q> = Vec::with_capacity(len);
        out.push(a0.recip());
        for i in 1..len {
            let s: Q = (1..=i.min(self.coeffs.len() - 1)).map(|j| &self.coeffs[j] * &out[i - j]).sum();
            out.push(-s / a0);
        }
        Series::build(-self.val, out, -self.val + rel, self.cap)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        let prec = self.prec.min(rhs.prec);
        let val = self.val.min(rhs.val);
        let hi = prec.min(val.saturating_add((self.coeffs.len() + rhs.coeffs.len()) as i64 + 1));
        let coeffs = (val..hi.max(val)).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        Series::build(val, coeffs, prec, self.cap.max(rhs.cap))
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(mut self) -> Series {
        self.coeffs.iter_mut().for_each(|c| *c = -c.clone());
        self
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self + (-rhs)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let cap = self.cap.max(rhs.cap);
        let val = self.val + rhs.val;
        let prec = (self.val.saturating_add(rhs.prec)).min(rhs.val.saturating_add(self.prec));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Series::build(val.min(prec), Vec::new(), prec, cap);
        }
        let len = ((prec - val).max(0) as usize).min(self.coeffs.len() + rhs.coeffs.len() - 1);
        let mut coeffs = vec![Q::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        Series::build(val, coeffs, prec, cap)
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        let cap = self.cap.max(rhs.cap);
        let mut inv = rhs.inverse();
        inv.cap = cap;
        self * inv
    }
}

impl Scalar for Series {
    fn from_q(q: &Q) -> Self {
        Series::build(0, vec![q.clone()], EXACT, 0)
    }

    fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec >= EXACT
    }

    fn scale(&self, q: &Q) -> Self {
        let mut s = self.clone();
        s.coeffs.iter_mut().for_each(|c| *c *= q);
        s.normalize();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q_frac, q_int};

    #[test]
    fn removable_singularity() {
        // (1/t - 1/(t + t^2)) = 1/(1+t) -> 1
        let t = Series::linear(q_int(0), q_int(1), 6);
        let u = Series::linear(q_int(1), q_int(1), 6);
        let f = Series::one_value() / t.clone() - Series::one_value() / (t * u);
        assert_eq!(f.value_at_zero(), Ok(q_int(1)));
    }

    #[test]
    fn poles_and_precision() {
        let t = Series::linear(q_int(0), q_int(2), 4);
        assert_eq!((Series::one_value() / t.clone()).value_at_zero(), Err(Some(1)));
        let a = Series::linear(q_int(3), q_int(1), 4);
        assert_eq!((Series::one_value() / a).value_at_zero(), Ok(q_frac(1, 3)));
        // 1/t^6 - 1/t^6 with only four relative terms leaves no precision at t^0
        let p = (0..6).fold(Series::one_value(), |acc, _| acc * t.clone());
        let d = Series::one_value() / p.clone() - Series::one_value() / p;
        assert_eq!(d.value_at_zero(), Err(None));
    }
}
