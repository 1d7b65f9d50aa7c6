//! Localization datasets and the truncated class algebra used to expand the
//! inverse equivariant Euler classes over a fixed component.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{dot, format_rational, parse_rational, Scalar, Q};
use crate::cone::{ConeError, GoodCone};
use crate::lattice::{clear_denominators, to_q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixedLocusError {
    #[error("cannot multiply classes truncated at degrees {0} and {1}")]
    MixedTruncation(usize, usize),
    #[error("weight {0} pairs to zero with the Reeb vector")]
    VanishingWeight(usize),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

/// Polynomial in the symbols `E_0, ..., E_{r-1}, c1W`, truncated above
/// total degree `m`. Exponent vectors have length `r + 1`; the last slot is
/// the exponent of `c1W`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedClass<T> {
    pub m: usize,
    pub symbols: usize,
    pub terms: BTreeMap<Vec<u32>, T>,
}

fn degree(e: &[u32]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

impl<T: Scalar> TruncatedClass<T> {
    pub fn scalar(m: usize, symbols: usize, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_exactly_zero() {
            terms.insert(vec![0; symbols], c);
        }
        TruncatedClass { m, symbols, terms }
    }

    /// The degree-one generator with index `i`.
    pub fn symbol(m: usize, symbols: usize, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        if m >= 1 {
            let mut e = vec![0; symbols];
            e[i] = 1;
            terms.insert(e, T::one_value());
        }
        TruncatedClass { m, symbols, terms }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FixedLocusError> {
        if self.m != other.m {
            return Err(FixedLocusError::MixedTruncation(self.m, other.m));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = match terms.remove(e) {
                Some(a) => a + c.clone(),
                None => c.clone(),
            };
            if !v.is_exactly_zero() {
                terms.insert(e.clone(), v);
            }
        }
        Ok(TruncatedClass { m: self.m, symbols: self.symbols.max(other.symbols), terms })
    }

    pub fn scale(&self, c: &T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, x)| (e.clone(), x.clone() * c.clone()))
            .filter(|(_, x)| !x.is_exactly_zero())
            .collect();
        TruncatedClass { m: self.m, symbols: self.symbols, terms }
    }

    pub fn constant_term(&self) -> T {
        self.terms.get(&vec![0; self.symbols]).cloned().unwrap_or_else(T::zero_value)
    }
}

pub fn class_multiply<T: Scalar>(
    a: &TruncatedClass<T>,
    b: &TruncatedClass<T>,
) -> Result<TruncatedClass<T>, FixedLocusError> {
    if a.m != b.m {
        return Err(FixedLocusError::MixedTruncation(a.m, b.m));
    }
    let symbols = a.symbols.max(b.symbols);
    let mut out = TruncatedClass { m: a.m, symbols, terms: BTreeMap::new() };
    for (ea, ca) in &a.terms {
        for (eb, cb) in &b.terms {
            let e: Vec<u32> = (0..symbols).map(|i| ea.get(i).unwrap_or(&0) + eb.get(i).unwrap_or(&0)).collect();
            if degree(&e) > a.m {
                continue;
            }
            let term = TruncatedClass {
                m: a.m,
                symbols,
                terms: BTreeMap::from([(e, ca.clone() * cb.clone())]),
            };
            out = out.add(&term)?;
        }
    }
    Ok(out)
}

/// `Π_j (1/w_j) Σ_s (E_j / w_j)^s`, truncated at degree `m`, for the weight
/// pairings `w_j = <κ_j, b>`. The class has `pairings.len() + 1` symbols.
pub fn inverse_euler<T: Scalar>(pairings: &[T], m: usize) -> Result<TruncatedClass<T>, FixedLocusError> {
    if let Some(j) = pairings.iter().position(|w| w.is_exactly_zero()) {
        return Err(FixedLocusError::VanishingWeight(j));
    }
    let symbols = pairings.len() + 1;
    let mut acc = TruncatedClass::scalar(m, symbols, T::one_value());
    for (j, w) in pairings.iter().enumerate() {
        let inv = T::one_value() / w.clone();
        let mut factor = TruncatedClass::scalar(m, symbols, inv.clone());
        if m > 0 {
            // inv * Σ_s (E_j inv)^s
            let step = TruncatedClass::symbol(m, symbols, j).scale(&inv);
            let mut power = TruncatedClass::scalar(m, symbols, inv);
            for _ in 0..m {
                power = class_multiply(&power, &step)?;
                factor = factor.add(&power)?;
            }
        }
        acc = class_multiply(&acc, &factor)?;
    }
    Ok(acc)
}

/// Intersection numbers of a fixed component: top-degree monomials in
/// `E_0, ..., E_{r-1}, c1W` mapped to rationals. Missing entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChernTable {
    pub entries: BTreeMap<Vec<u32>, Q>,
}

impl ChernTable {
    /// The table of a point: `∫ 1 = 1`.
    pub fn point(symbols: usize) -> Self {
        ChernTable { entries: BTreeMap::from([(vec![0; symbols], Q::one())]) }
    }
}

pub fn integrate<T: Scalar>(cls: &TruncatedClass<T>, table: &ChernTable) -> T {
    table.entries.iter().filter(|(e, _)| degree(e) == cls.m).fold(T::zero_value(), |acc, (e, r)| {
        match cls.terms.get(e) {
            Some(c) => acc + c.scale(r),
            None => acc,
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedComponent {
    pub name: String,
    /// Complex dimension of the component.
    pub m: usize,
    pub d: BigInt,
    /// `κ_0, ..., κ_{n-m}`.
    pub weights: Vec<Vec<Q>>,
    pub chern: ChernTable,
}

impl FixedComponent {
    /// `<κ_j, b>` for every weight.
    pub fn pairings<T: Scalar>(&self, b: &[T]) -> Vec<T> {
        self.weights.iter().map(|k| dot(k, b)).collect()
    }

    /// `(∫ e^{-1}, ∫ (c1W + Σ_{i>=1} <κ_i, b>) e^{-1})` over the component,
    /// without the `1/d` factor.
    pub fn integrals<T: Scalar>(&self, b: &[T]) -> Result<(T, T), FixedLocusError> {
        let w = self.pairings(b);
        let weight_sum = w[1..].iter().cloned().fold(T::zero_value(), |a, x| a + x);
        if self.m == 0 {
            if let Some(j) = w.iter().position(|x| x.is_exactly_zero()) {
                return Err(FixedLocusError::VanishingWeight(j));
            }
            let prod = w.iter().cloned().fold(T::one_value(), |a, x| a * x);
            let vol = T::one_value() / prod;
            let scal = weight_sum * vol.clone();
            return Ok((vol, scal));
        }
        let e = inverse_euler(&w, self.m)?;
        let symbols = e.symbols;
        let numerator = TruncatedClass::symbol(self.m, symbols, symbols - 1)
            .add(&TruncatedClass::scalar(self.m, symbols, weight_sum))?;
        let vol = integrate(&e, &self.chern);
        let scal = integrate(&class_multiply(&numerator, &e)?, &self.chern);
        Ok((vol, scal))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationDataset {
    pub rank: usize,
    pub n: usize,
    pub components: Vec<FixedComponent>,
}

impl LocalizationDataset {
    pub fn validate(&self) -> Result<(), FixedLocusError> {
        let bad = |s: String| Err(FixedLocusError::InvalidDataset(s));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.rank == 0 || self.rank > self.n + 1 {
            return bad(format!("rank {} must lie in 1..={}", self.rank, self.n + 1));
        }
        if self.components.is_empty() {
            return bad("no fixed components".into());
        }
        for c in &self.components {
            if c.m > self.n {
                return bad(format!("component {}: m = {} exceeds n", c.name, c.m));
            }
            if c.weights.len() != self.n - c.m + 1 {
                return bad(format!("component {}: expected {} weights, got {}", c.name, self.n - c.m + 1, c.weights.len()));
            }
            if c.weights.iter().any(|w| w.len() != self.rank) {
                return bad(format!("component {}: weight of wrong length", c.name));
            }
            if !c.d.is_positive() {
                return bad(format!("component {}: d must be positive", c.name));
            }
            for e in c.chern.entries.keys() {
                if e.len() != c.weights.len() + 1 || degree(e) != c.m {
                    return bad(format!("component {}: Chern entry {:?} is not a top-degree monomial", c.name, e));
                }
            }
        }
        Ok(())
    }

    /// `Σ_κ0 κ_0`, a covector positive on the closed Reeb cone of a
    /// cone-generated dataset.
    pub fn kappa0_sum(&self) -> Vec<Q> {
        let mut s = vec![Q::zero(); self.rank];
        for c in &self.components {
            for (a, b) in s.iter_mut().zip(&c.weights[0]) {
                *a += b;
            }
        }
        s
    }
}

/// One point component per slice vertex. The slicing field is replaced by the
/// primitive integer vector on its ray.
pub fn dataset_from_cone(cone: &GoodCone, b_o: &[Q]) -> Result<LocalizationDataset, ConeError> {
    let b_int = to_q(&clear_denominators(b_o));
    let slice = cone.slice_polytope(&b_int)?;
    let mut components = Vec::with_capacity(slice.vertices.len());
    for v in 0..slice.vertices.len() {
        let w = cone.vertex_weights(&slice, v)?;
        components.push(FixedComponent {
            name: format!("v{v}"),
            m: 0,
            d: w.d,
            weights: w.kappa,
            chern: ChernTable::point(cone.rank + 1),
        });
    }
    Ok(LocalizationDataset { rank: cone.rank, n: cone.n(), components })
}

#[derive(Serialize, Deserialize)]
struct ChernEntryJson {
    exponents: BTreeMap<String, u32>,
    integral: String,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    name: String,
    m: usize,
    d: u64,
    weights: Vec<Vec<String>>,
    chern: Vec<ChernEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    rank: usize,
    n: usize,
    components: Vec<ComponentJson>,
}

fn symbol_name(i: usize, symbols: usize) -> String {
    if i + 1 == symbols {
        "c1W".to_string()
    } else {
        format!("E{i}")
    }
}

impl LocalizationDataset {
    pub fn to_json(&self) -> serde_json::Value {
        let components = self
            .components
            .iter()
            .map(|c| {
                let symbols = c.weights.len() + 1;
                ComponentJson {
                    name: c.name.clone(),
                    m: c.m,
                    d: c.d.to_u64().unwrap_or(u64::MAX),
                    weights: c.weights.iter().map(|w| w.iter().map(format_rational).collect()).collect(),
                    chern: c
                        .chern
                        .entries
                        .iter()
                        .map(|(e, q)| ChernEntryJson {
                            exponents: e
                                .iter()
                                .enumerate()
                                .filter(|(_, &x)| x > 0)
                                .map(|(i, &x)| (symbol_name(i, symbols), x))
                                .collect(),
                            integral: format_rational(q),
                        })
                        .collect(),
                }
            })
            .collect();
        serde_json::to_value(DatasetJson { rank: self.rank, n: self.n, components }).expect("serializable")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, FixedLocusError> {
        let raw: DatasetJson =
            serde_json::from_value(value).map_err(|e| FixedLocusError::InvalidDataset(e.to_string()))?;
        let invalid = |s: String| FixedLocusError::InvalidDataset(s);
        let mut components = Vec::new();
        for c in raw.components {
            let weights = c
                .weights
                .iter()
                .map(|w| w.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(format!("component {}: {e}", c.name)))?;
            let symbols = weights.len() + 1;
            let mut entries = BTreeMap::new();
            for entry in &c.chern {
                let mut e = vec![0u32; symbols];
                for (key, &x) in &entry.exponents {
                    let i = (0..symbols)
                        .find(|&i| symbol_name(i, symbols) == *key)
                        .ok_or_else(|| invalid(format!("component {}: unknown symbol {key}", c.name)))?;
                    e[i] = x;
                }
                let q = parse_rational(&entry.integral).map_err(|e| invalid(e.to_string()))?;
                entries.insert(e, q);
            }
            if c.m == 0 && entries.is_empty() {
                entries.insert(vec![0; symbols], Q::one());
            }
            components.push(FixedComponent {
                name: c.name,
                m: c.m,
                d: BigInt::from(c.d),
                weights,
                chern: ChernTable { entries },
            });
        }
        let ds = LocalizationDataset { rank: raw.rank, n: raw.n, components };
        ds.validate()?;
        Ok(ds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q_frac, q_int, q_vec};

    fn e(m: usize, i: usize) -> TruncatedClass<Q> {
        TruncatedClass::symbol(m, 3, i)
    }

    fn c(m: usize, x: i64) -> TruncatedClass<Q> {
        TruncatedClass::scalar(m, 3, q_int(x))
    }

    #[test]
    fn truncation_drops_high_degree() {
        let a = c(1, 1).add(&e(1, 0)).unwrap();
        let b = c(1, 1).add(&e(1, 0).scale(&q_int(-1))).unwrap();
        assert_eq!(class_multiply(&a, &b).unwrap(), c(1, 1));
    }

    #[test]
    fn square_of_sum() {
        let s = e(2, 0).add(&e(2, 1)).unwrap();
        let sq = class_multiply(&s, &s).unwrap();
        assert_eq!(sq.terms.len(), 3);
        assert_eq!(sq.terms[&vec![1, 1, 0]], q_int(2));
        assert_eq!(sq.terms[&vec![2, 0, 0]], q_int(1));
    }

    #[test]
    fn mixed_truncation_is_rejected() {
        assert_eq!(class_multiply(&c(1, 1), &c(2, 1)), Err(FixedLocusError::MixedTruncation(1, 2)));
    }

    #[test]
    fn inverse_euler_cases() {
        let s = inverse_euler(&[q_int(2), q_int(3)], 0).unwrap();
        assert_eq!(s.constant_term(), q_frac(1, 6));
        let one = inverse_euler(&[q_int(5)], 1).unwrap();
        assert_eq!(one.terms[&vec![0, 0]], q_frac(1, 5));
        assert_eq!(one.terms[&vec![1, 0]], q_frac(1, 25));
        assert_eq!(inverse_euler(&[q_int(1), q_int(0)], 1), Err(FixedLocusError::VanishingWeight(1)));
    }

    #[test]
    fn integrate_reads_top_degree() {
        let table = ChernTable { entries: BTreeMap::from([(vec![1, 0, 0], q_int(3))]) };
        assert_eq!(integrate(&e(1, 0).scale(&q_int(2)), &table), q_int(6));
        assert_eq!(integrate(&c(1, 4), &table), q_int(0));
        assert_eq!(integrate(&TruncatedClass::scalar(0, 3, q_int(7)), &ChernTable::point(3)), q_int(7));
    }

    #[test]
    fn orthant_dataset() {
        let cone = GoodCone::from_i64("o2", &[&[1, 0], &[0, 1]]).unwrap();
        let ds = dataset_from_cone(&cone, &q_vec(&[1, 1])).unwrap();
        assert_eq!(ds.components.len(), 2);
        let mut weights: Vec<_> = ds.components.iter().map(|c| c.weights.clone()).collect();
        weights.sort();
        assert_eq!(weights, vec![vec![q_vec(&[0, 1]), q_vec(&[2, -2])], vec![q_vec(&[1, 0]), q_vec(&[-2, 2])]]);
    }

    #[test]
    fn json_round_trip() {
        let cone = GoodCone::from_i64("c", &[&[1, 0, 0], &[1, 1, 0], &[1, 1, 1], &[1, 0, 1]]).unwrap();
        let ds = dataset_from_cone(&cone, &q_vec(&[2, 1, 1])).unwrap();
        let back = LocalizationDataset::from_json(ds.to_json()).unwrap();
        assert_eq!(back, ds);
    }
}
