//! Localized volume, total transverse scalar curvature and Einstein-Hilbert
//! functionals of a localization dataset.
//!
//! Values are `q * pi^(n+1)` with `q` rational. For a dataset with components
//! `Z`, orders `d_Z` and weights `κ_j`:
//!
//! ```text
//! V = 2^(n+1)/n!     * Σ_Z (1/d_Z) ∫_Z e_Z(b)^-1
//! S = 2^(n+2)/(n-1)! * Σ_Z (1/d_Z) ∫_Z (c1W + Σ_{i>=1} <κ_i, b>) e_Z(b)^-1
//! H = S^(n+1) / V^n
//! ```
//!
//! where `e_Z(b)^-1 = Π_j (1/<κ_j, b>) Σ_s (E_j/<κ_j, b>)^s`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::series::Series;
use crate::arith::{dot, dot_q, factorial, format_rational, pow2, q_to_f64, Dual, Scalar, Q};
use crate::cone::GoodCone;
use crate::fixed_locus::{FixedLocusError, LocalizationDataset};
use crate::lattice::{det_q, to_q};
use crate::ratfunc::{Laurent, Poly, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LocalizeError {
    #[error("weight {weight} of component {component} vanishes at this Reeb vector")]
    VanishingWeight { component: usize, weight: usize },
    #[error("the volume vanishes")]
    ZeroVolume,
    #[error("the direction keeps a weight pairing identically zero")]
    DirectionNotGeneric,
    #[error("the functional has a pole of order {0} at this point")]
    PoleAtZero(u64),
    #[error("components {0:?} degenerate simultaneously along the path")]
    AmbiguousMinimizer(Vec<usize>),
    #[error("no fixed-component fiber weight vanishes at the end of the path")]
    NotBoundaryPath,
    #[error("Reeb vector has {got} components, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error(transparent)]
    Dataset(#[from] FixedLocusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Functional {
    V,
    S,
    H,
    H1,
}

impl Functional {
    pub const ALL: [Functional; 4] = [Functional::V, Functional::S, Functional::H, Functional::H1];

    /// Degree of homogeneity in `b`.
    pub fn degree(self, n: usize) -> i64 {
        match self {
            Functional::V => -(n as i64 + 1),
            Functional::S => -(n as i64),
            Functional::H | Functional::H1 => 0,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Functional::V => "V",
            Functional::S => "S",
            Functional::H => "H",
            Functional::H1 => "H1",
        };
        f.write_str(s)
    }
}

impl FromStr for Functional {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "V" | "v" => Ok(Functional::V),
            "S" | "s" => Ok(Functional::S),
            "H" | "h" => Ok(Functional::H),
            "H1" | "h1" => Ok(Functional::H1),
            _ => Err(format!("unknown functional `{s}` (expected V, S, H or H1)")),
        }
    }
}

/// `exact * pi^pi_power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalValue {
    pub exact: Q,
    pub pi_power: u32,
}

impl FunctionalValue {
    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.exact) * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

impl fmt::Display for FunctionalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * pi^{}", format_rational(&self.exact), self.pi_power)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientValue {
    pub exact: Vec<Q>,
    pub pi_power: u32,
}

impl GradientValue {
    pub fn to_f64(&self) -> Vec<f64> {
        let scale = std::f64::consts::PI.powi(self.pi_power as i32);
        self.exact.iter().map(|q| q_to_f64(q) * scale).collect()
    }
}

fn volume_constant(n: usize) -> Q {
    Q::new(pow2(n + 1), factorial(n))
}

fn scalar_constant(n: usize) -> Q {
    Q::new(pow2(n + 2), factorial(n - 1))
}

fn check_len(ds: &LocalizationDataset, len: usize) -> Result<(), LocalizeError> {
    if len != ds.rank {
        return Err(LocalizeError::WrongLength { got: len, expected: ds.rank });
    }
    Ok(())
}

/// `(V, S)` as coefficients of `pi^(n+1)`, over any scalar type.
pub fn volume_and_scalar<T: Scalar>(ds: &LocalizationDataset, b: &[T]) -> Result<(T, T), LocalizeError> {
    check_len(ds, b.len())?;
    let mut vol = T::zero_value();
    let mut scal = T::zero_value();
    for (i, c) in ds.components.iter().enumerate() {
        let (v, s) = c.integrals(b).map_err(|e| match e {
            FixedLocusError::VanishingWeight(weight) => LocalizeError::VanishingWeight { component: i, weight },
            other => LocalizeError::Dataset(other),
        })?;
        let inv_d = Q::new(BigInt::one(), c.d.clone());
        vol = vol + v.scale(&inv_d);
        scal = scal + s.scale(&inv_d);
    }
    Ok((vol.scale(&volume_constant(ds.n)), scal.scale(&scalar_constant(ds.n))))
}

fn powi<T: Scalar>(x: &T, e: usize) -> T {
    (0..e).fold(T::one_value(), |acc, _| acc * x.clone())
}

/// `S^(n+1) / V^n`.
pub fn einstein_hilbert_of<T: Scalar>(v: &T, s: &T, n: usize) -> Result<T, LocalizeError> {
    if v.is_exactly_zero() {
        return Err(LocalizeError::ZeroVolume);
    }
    Ok(powi(s, n + 1) / powi(v, n))
}

fn sign(q: &Q) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Combine exact `(V, S)` coefficients into the requested functional.
pub fn combine(f: Functional, v: &Q, s: &Q, n: usize) -> Result<FunctionalValue, LocalizeError> {
    let pi_power = n as u32 + 1;
    let exact = match f {
        Functional::V => v.clone(),
        Functional::S => s.clone(),
        Functional::H => einstein_hilbert_of(v, s, n)?,
        Functional::H1 => einstein_hilbert_of(v, s, n)?.abs() * Q::from_integer(sign(s).into()),
    };
    Ok(FunctionalValue { exact, pi_power })
}

pub fn evaluate(f: Functional, ds: &LocalizationDataset, b: &[Q]) -> Result<FunctionalValue, LocalizeError> {
    let (v, s) = volume_and_scalar(ds, b)?;
    combine(f, &v, &s, ds.n)
}

pub fn volume(ds: &LocalizationDataset, b: &[Q]) -> Result<FunctionalValue, LocalizeError> {
    evaluate(Functional::V, ds, b)
}

pub fn total_scalar(ds: &LocalizationDataset, b: &[Q]) -> Result<FunctionalValue, LocalizeError> {
    evaluate(Functional::S, ds, b)
}

pub fn einstein_hilbert(ds: &LocalizationDataset, b: &[Q]) -> Result<FunctionalValue, LocalizeError> {
    evaluate(Functional::H, ds, b)
}

pub fn h1(ds: &LocalizationDataset, b: &[Q]) -> Result<FunctionalValue, LocalizeError> {
    evaluate(Functional::H1, ds, b)
}

/// Gradient of `f` from `V`, `S` and their gradients, using
/// `∇H = H ((n+1) ∇S / S - n ∇V / V)`.
pub fn combine_gradient(f: Functional, v: &Q, s: &Q, gv: &[Q], gs: &[Q], n: usize) -> Result<Vec<Q>, LocalizeError> {
    let h_grad = || -> Result<Vec<Q>, LocalizeError> {
        if v.is_zero() {
            return Err(LocalizeError::ZeroVolume);
        }
        if s.is_zero() {
            return Ok(vec![Q::zero(); gv.len()]);
        }
        let h = einstein_hilbert_of(v, s, n)?;
        let a = Q::from_integer((n + 1).into()) * &h / s;
        let c = Q::from_integer(n.into()) * &h / v;
        Ok(gs.iter().zip(gv).map(|(x, y)| x * &a - y * &c).collect())
    };
    Ok(match f {
        Functional::V => gv.to_vec(),
        Functional::S => gs.to_vec(),
        Functional::H => h_grad()?,
        Functional::H1 => {
            // H1 = sign(S) sign(V)^n H away from S = 0, where both gradients vanish
            let sv = if n % 2 == 1 { sign(v) } else { 1 };
            let c = Q::from_integer((sign(s) * sv).into());
            h_grad()?.into_iter().map(|x| x * &c).collect()
        }
    })
}

/// Exact `V`, `S` and their gradients at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub n: usize,
    pub v: Q,
    pub s: Q,
    pub grad_v: Vec<Q>,
    pub grad_s: Vec<Q>,
}

impl Jet {
    pub fn value(&self, f: Functional) -> Result<FunctionalValue, LocalizeError> {
        combine(f, &self.v, &self.s, self.n)
    }

    pub fn gradient(&self, f: Functional) -> Result<GradientValue, LocalizeError> {
        let g = combine_gradient(f, &self.v, &self.s, &self.grad_v, &self.grad_s, self.n)?;
        Ok(GradientValue { exact: g, pi_power: self.n as u32 + 1 })
    }

    /// Float value and gradient. For `H` and `H1` the logarithmic gradient
    /// `(n+1) ∇S / S - n ∇V / V` is formed exactly before rounding, so the
    /// result has small relative error even where the gradient nearly
    /// vanishes, without the cost of the exact high powers.
    pub fn to_f64(&self, f: Functional) -> Result<(f64, Vec<f64>), LocalizeError> {
        let n = self.n;
        let pi = std::f64::consts::PI.powi(n as i32 + 1);
        let floats = |g: &[Q]| g.iter().map(|x| q_to_f64(x) * pi).collect::<Vec<f64>>();
        match f {
            Functional::V => Ok((q_to_f64(&self.v) * pi, floats(&self.grad_v))),
            Functional::S => Ok((q_to_f64(&self.s) * pi, floats(&self.grad_s))),
            Functional::H | Functional::H1 => {
                if self.v.is_zero() {
                    return Err(LocalizeError::ZeroVolume);
                }
                let k = self.grad_v.len();
                if self.s.is_zero() {
                    return Ok((0.0, vec![0.0; k]));
                }
                let (vf, sf) = (q_to_f64(&self.v), q_to_f64(&self.s));
                let mut magnitude = sf.abs().powi(n as i32 + 1) / vf.abs().powi(n as i32) * pi;
                if !magnitude.is_finite() || magnitude == 0.0 {
                    magnitude = ((n + 1) as f64 * sf.abs().ln() - n as f64 * vf.abs().ln()).exp() * pi;
                }
                let h_sign = if sign(&self.s) < 0 && n % 2 == 0 { -1.0 } else { 1.0 } * if sign(&self.v) < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
                let a = Q::from_integer((n + 1).into()) / &self.s;
                let c = Q::from_integer(n.into()) / &self.v;
                let log_grad: Vec<f64> =
                    self.grad_s.iter().zip(&self.grad_v).map(|(x, y)| q_to_f64(&(x * &a - y * &c))).collect();
                let h = h_sign * magnitude;
                let (value, scale) = if f == Functional::H1 {
                    // sign(S) |H|, with gradient sign(S) sign(V)^n ∇H
                    let sv = if n % 2 == 1 { f64::from(sign(&self.v)) } else { 1.0 };
                    (f64::from(sign(&self.s)) * magnitude, f64::from(sign(&self.s)) * sv * h)
                } else {
                    (h, h)
                };
                Ok((value, log_grad.iter().map(|x| x * scale).collect()))
            }
        }
    }
}

/// `V`, `S` and their gradients from a single forward-mode pass.
pub fn jet(ds: &LocalizationDataset, b: &[Q]) -> Result<Jet, LocalizeError> {
    let k = b.len();
    let vars = Dual::variables(b);
    let (v, s) = volume_and_scalar(ds, &vars)?;
    Ok(Jet { n: ds.n, grad_v: v.gradient(k), grad_s: s.gradient(k), v: v.value, s: s.value })
}

/// Exact value and gradient from a single forward-mode pass.
pub fn value_and_gradient(
    f: Functional,
    ds: &LocalizationDataset,
    b: &[Q],
) -> Result<(FunctionalValue, GradientValue), LocalizeError> {
    let j = jet(ds, b)?;
    Ok((j.value(f)?, j.gradient(f)?))
}

/// Exact gradient with respect to `b`.
pub fn gradient(f: Functional, ds: &LocalizationDataset, b: &[Q]) -> Result<GradientValue, LocalizeError> {
    value_and_gradient(f, ds, b).map(|(_, g)| g)
}

fn line(b0: &[Q], d: &[Q]) -> Vec<RatFunc> {
    b0.iter().zip(d).map(|(a, c)| RatFunc::from_poly(Poly::linear(a.clone(), c.clone()))).collect()
}

/// Some weight pairing vanishes on the whole line `b0 + t d`.
pub fn identically_zero_pairing(ds: &LocalizationDataset, b0: &[Q], d: &[Q]) -> bool {
    ds.components
        .iter()
        .flat_map(|c| &c.weights)
        .any(|k| dot_q(k, b0).is_zero() && dot_q(k, d).is_zero())
}

/// `(V(t), S(t))` along `b0 + t d` as exact rational functions of `t`.
pub fn along_line(
    ds: &LocalizationDataset,
    b0: &[Q],
    d: &[Q],
) -> Result<(RatFunc, RatFunc), LocalizeError> {
    check_len(ds, b0.len())?;
    check_len(ds, d.len())?;
    if identically_zero_pairing(ds, b0, d) {
        return Err(LocalizeError::DirectionNotGeneric);
    }
    volume_and_scalar(ds, &line(b0, d))
}

/// Value at `b0` as the limit of `F(b0 + t d)` for `t -> 0`.
pub fn evaluate_limit(
    f: Functional,
    ds: &LocalizationDataset,
    b0: &[Q],
    d: &[Q],
) -> Result<FunctionalValue, LocalizeError> {
    let (v, s) = along_line(ds, b0, d)?;
    let v0 = v.value_at_zero().map_err(LocalizeError::PoleAtZero)?;
    let s0 = s.value_at_zero().map_err(LocalizeError::PoleAtZero)?;
    combine(f, &v0, &s0, ds.n)
}

/// A direction along which no weight pairing stays identically zero.
pub fn generic_direction(ds: &LocalizationDataset, b0: &[Q]) -> Vec<Q> {
    (1i64..)
        .map(|j| {
            let mut p = Q::one();
            (0..ds.rank)
                .map(|_| {
                    let x = p.clone();
                    p *= Q::from_integer(j.into());
                    x
                })
                .collect::<Vec<Q>>()
        })
        .find(|d| !identically_zero_pairing(ds, b0, d))
        .expect("moment curve meets the complement of finitely many hyperplanes")
}

/// Direct evaluation, falling back to the limit evaluator on weight
/// hyperplanes. The flag reports whether the limit path was taken.
pub fn evaluate_auto(
    f: Functional,
    ds: &LocalizationDataset,
    b: &[Q],
) -> Result<(FunctionalValue, bool), LocalizeError> {
    match evaluate(f, ds, b) {
        Ok(v) => Ok((v, false)),
        Err(LocalizeError::VanishingWeight { .. }) => {
            let d = generic_direction(ds, b);
            evaluate_limit(f, ds, b, &d).map(|v| (v, true))
        }
        Err(e) => Err(e),
    }
}

/// `V`, `S` and their gradients at `b0` as limits along `b0 + t d`. All four
/// are regular on the open Reeb cone, so only the individual pieces need a
/// limit.
pub fn jet_limit(ds: &LocalizationDataset, b0: &[Q], d: &[Q]) -> Result<Jet, LocalizeError> {
    check_len(ds, b0.len())?;
    check_len(ds, d.len())?;
    if identically_zero_pairing(ds, b0, d) {
        return Err(LocalizeError::DirectionNotGeneric);
    }
    match jet_series(ds, b0, d) {
        Ok(Some(j)) => return Ok(j),
        Ok(None) => {}
        Err(e) => return Err(e),
    }
    let k = b0.len();
    let vars = Dual::variables(&line(b0, d));
    let (v, s) = volume_and_scalar(ds, &vars)?;
    let at_zero = |r: &RatFunc| r.value_at_zero().map_err(LocalizeError::PoleAtZero);
    let all = |xs: Vec<RatFunc>| xs.iter().map(at_zero).collect::<Result<Vec<Q>, _>>();
    Ok(Jet { n: ds.n, v: at_zero(&v.value)?, s: at_zero(&s.value)?, grad_v: all(v.gradient(k))?, grad_s: all(s.gradient(k))? })
}

/// Truncated-series version of [`jet_limit`]; `None` when the truncation was
/// too short to reach the constant term.
fn jet_series(ds: &LocalizationDataset, b0: &[Q], d: &[Q]) -> Result<Option<Jet>, LocalizeError> {
    let cap = 2 * (ds.n + 2) + 2;
    let k = b0.len();
    let pts: Vec<Series> = b0.iter().zip(d).map(|(a, c)| Series::linear(a.clone(), c.clone(), cap)).collect();
    let (v, s) = volume_and_scalar(ds, &Dual::variables(&pts))?;
    let at_zero = |r: &Series| match r.value_at_zero() {
        Ok(q) => Ok(Some(q)),
        Err(Some(p)) => Err(LocalizeError::PoleAtZero(p)),
        Err(None) => Ok(None),
    };
    let all = |xs: Vec<Series>| xs.iter().map(at_zero).collect::<Result<Option<Vec<Q>>, _>>();
    let parts = (at_zero(&v.value)?, at_zero(&s.value)?, all(v.gradient(k))?, all(s.gradient(k))?);
    Ok(match parts {
        (Some(v), Some(s), Some(grad_v), Some(grad_s)) => Some(Jet { n: ds.n, v, s, grad_v, grad_s }),
        _ => None,
    })
}

/// Exact jet, through the limit evaluator on weight hyperplanes.
pub fn jet_auto(ds: &LocalizationDataset, b: &[Q]) -> Result<(Jet, bool), LocalizeError> {
    match jet(ds, b) {
        Ok(j) => Ok((j, false)),
        Err(LocalizeError::VanishingWeight { .. }) => jet_limit(ds, b, &generic_direction(ds, b)).map(|j| (j, true)),
        Err(e) => Err(e),
    }
}

pub fn value_and_gradient_limit(
    f: Functional,
    ds: &LocalizationDataset,
    b0: &[Q],
    d: &[Q],
) -> Result<(FunctionalValue, GradientValue), LocalizeError> {
    let j = jet_limit(ds, b0, d)?;
    Ok((j.value(f)?, j.gradient(f)?))
}

/// Gradient at `b0` as the limit of the gradient along `b0 + t d`.
pub fn gradient_limit(
    f: Functional,
    ds: &LocalizationDataset,
    b0: &[Q],
    d: &[Q],
) -> Result<GradientValue, LocalizeError> {
    value_and_gradient_limit(f, ds, b0, d).map(|(_, g)| g)
}

/// Exact gradient, through the limit evaluator on weight hyperplanes.
pub fn gradient_auto(
    f: Functional,
    ds: &LocalizationDataset,
    b: &[Q],
) -> Result<(GradientValue, bool), LocalizeError> {
    match gradient(f, ds, b) {
        Ok(g) => Ok((g, false)),
        Err(LocalizeError::VanishingWeight { .. }) => {
            let d = generic_direction(ds, b);
            gradient_limit(f, ds, b, &d).map(|g| (g, true))
        }
        Err(e) => Err(e),
    }
}

/// Value and gradient, through the limit evaluator on weight hyperplanes.
pub fn value_and_gradient_auto(
    f: Functional,
    ds: &LocalizationDataset,
    b: &[Q],
) -> Result<(FunctionalValue, GradientValue, bool), LocalizeError> {
    match value_and_gradient(f, ds, b) {
        Ok((v, g)) => Ok((v, g, false)),
        Err(LocalizeError::VanishingWeight { .. }) => {
            let d = generic_direction(ds, b);
            value_and_gradient_limit(f, ds, b, &d).map(|(v, g)| (v, g, true))
        }
        Err(e) => Err(e),
    }
}

/// `coefficient * pi^pi_power * ε^(-exponent)` as `ε -> 0+`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    pub component: usize,
    pub exponent: i64,
    pub coefficient: Q,
    pub pi_power: u32,
}

/// Leading Laurent term of `F(b_lim + ε dir)` where `b_lim` lies on the
/// boundary hyperplane of exactly one component's fiber weight.
pub fn boundary_leading_term(
    f: Functional,
    ds: &LocalizationDataset,
    b_lim: &[Q],
    dir: &[Q],
) -> Result<LeadingTerm, LocalizeError> {
    check_len(ds, b_lim.len())?;
    let hits: Vec<usize> = ds
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| dot_q(&c.weights[0], b_lim).is_zero())
        .map(|(i, _)| i)
        .collect();
    let component = match hits.as_slice() {
        [] => return Err(LocalizeError::NotBoundaryPath),
        [i] => *i,
        _ => return Err(LocalizeError::AmbiguousMinimizer(hits)),
    };
    let (v, s) = along_line(ds, b_lim, dir)?;
    let n = ds.n;
    let leading = |r: &RatFunc| match r.laurent() {
        Laurent::Zero => (i64::MAX, Q::zero()),
        Laurent::Leading { order, coefficient } => (order, coefficient),
    };
    let (order, coefficient) = match f {
        Functional::V => leading(&v),
        Functional::S => leading(&s),
        Functional::H | Functional::H1 => {
            if v.numerator().is_zero() {
                return Err(LocalizeError::ZeroVolume);
            }
            let (o, c) = leading(&(s.powi(n as u32 + 1) / v.powi(n as u32)));
            if f == Functional::H1 {
                let ss = sign(&leading(&s).1);
                (o, c.abs() * Q::from_integer(ss.into()))
            } else {
                (o, c)
            }
        }
    };
    Ok(LeadingTerm { component, exponent: -order, coefficient, pi_power: n as u32 + 1 })
}

/// `(V, S)` of a toric cone straight from the vertex data by Cramer's rule.
///
/// At a vertex with facets `u_1..u_n` write `b = c_0 b_o + Σ c_i u_i`; the
/// vertex contributes `1/(d 2^n Π c_j)` to the volume sum and
/// `2 Σ_{i>=1} c_i` times that to the scalar sum. `b_o` must be an integral
/// vector in the Reeb cone.
pub fn toric_vertex_sum(cone: &GoodCone, b_o: &[Q], b: &[Q]) -> Result<(FunctionalValue, FunctionalValue), LocalizeError> {
    let n = cone.n();
    let two = Q::from_integer(2.into());
    let mut vol = Q::zero();
    let mut scal = Q::zero();
    for (vertex, facets) in cone.ray_facets.iter().enumerate() {
        let mut m = vec![b_o.to_vec()];
        m.extend(facets.iter().map(|&a| to_q(&cone.normals[a])));
        let det = det_q(&m);
        let c: Vec<Q> = (0..=n)
            .map(|j| {
                let mut mj = m.clone();
                mj[j] = b.to_vec();
                det_q(&mj) / &det
            })
            .collect();
        if let Some(weight) = c.iter().position(|x| x.is_zero()) {
            return Err(LocalizeError::VanishingWeight { component: vertex, weight });
        }
        let prod: Q = c.iter().fold(Q::from_integer(pow2(n)), |a, x| a * x);
        let term = (det.abs() * prod).recip();
        scal += &term * c[1..].iter().fold(Q::zero(), |a, x| a + x) * &two;
        vol += term;
    }
    let p = n as u32 + 1;
    Ok((
        FunctionalValue { exact: vol * volume_constant(n), pi_power: p },
        FunctionalValue { exact: scal * scalar_constant(n), pi_power: p },
    ))
}

/// Exact evaluation at the rational value of a float point, rounded back.
pub fn evaluate_at_float(f: Functional, ds: &LocalizationDataset, b: &[f64]) -> Result<f64, LocalizeError> {
    let bq: Vec<Q> = b.iter().map(|&x| Q::from_float(x).unwrap_or_else(Q::zero)).collect();
    evaluate(f, ds, &bq).map(|v| v.to_f64())
}

/// Pure floating-point evaluation, used where exactness is not needed.
pub fn evaluate_f64(f: Functional, ds: &LocalizationDataset, b: &[f64]) -> Result<f64, LocalizeError> {
    let (v, s) = volume_and_scalar::<f64>(ds, b)?;
    let n = ds.n;
    let pi = std::f64::consts::PI.powi(n as i32 + 1);
    let (v, s) = (v * pi, s * pi);
    Ok(match f {
        Functional::V => v,
        Functional::S => s,
        Functional::H => s.powi(n as i32 + 1) / v.powi(n as i32),
        Functional::H1 => s.signum() * (s.powi(n as i32 + 1) / v.powi(n as i32)).abs(),
    })
}

/// `<κ, b>` for every weight of every component, as `(component, weight, value)`.
pub fn pairings<T: Scalar>(ds: &LocalizationDataset, b: &[T]) -> Vec<(usize, usize, T)> {
    ds.components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.weights.iter().enumerate().map(move |(j, k)| (i, j, dot(k, b))))
        .collect()
}
