//! Good moment cones: validation, Reeb cone membership, slice polytopes and
//! fixed-point weight extraction.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{dot_q, format_rational_vec, Q};
use crate::lattice::{
    clear_denominators, det_q, inverse_q, kernel_vector, primitive, rank_q, smith_invariants, to_q,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("torus rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("need at least {needed} normals, got {got}")]
    TooFewNormals { needed: usize, got: usize },
    #[error("normal {index} has length {len}, expected {rank}")]
    WrongLength { index: usize, len: usize, rank: usize },
    #[error("normal {0} is zero")]
    ZeroNormal(usize),
    #[error("normals span a space of dimension {rank} < {ambient}: the cone contains a line")]
    NotStronglyConvex { rank: usize, ambient: usize },
    #[error("the cone has empty interior")]
    EmptyInterior,
    #[error("normal {0} does not define a facet")]
    RedundantNormal(usize),
    #[error("face with facets {facets:?} is not good: invariant factors {invariants:?}")]
    NotGood { facets: Vec<usize>, invariants: Vec<String> },
    #[error("vertex {vertex} lies on {facets} facets, expected {expected}")]
    NotSimple { vertex: usize, facets: usize, expected: usize },
    #[error("{0} is not in the open Reeb cone")]
    NotInReebCone(String),
    #[error("slicing field {0} must be an integer vector")]
    NonIntegralSlicingField(String),
    #[error("degenerate edge at vertex {0}")]
    DegenerateEdge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeWarning {
    /// Non-primitive normal `label * primitive`, read as an orbifold label.
    NonPrimitiveNormal { index: usize, label: BigInt },
}

impl fmt::Display for ConeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeWarning::NonPrimitiveNormal { index, label } => {
                write!(f, "normal {index} is not primitive; treated as orbifold label m={label}")
            }
        }
    }
}

/// A validated moment cone `C* = {x : <x, u_a> >= 0}`.
#[derive(Debug, Clone)]
pub struct GoodCone {
    pub name: Option<String>,
    pub rank: usize,
    /// Normals as supplied, labels included.
    pub normals: Vec<Vec<BigInt>>,
    pub primitive_normals: Vec<Vec<BigInt>>,
    pub labels: Vec<BigInt>,
    /// Primitive generators of the extreme rays of `C*`.
    pub rays: Vec<Vec<BigInt>>,
    /// Facets (normal indices) containing each ray, sorted.
    pub ray_facets: Vec<Vec<usize>>,
    pub warnings: Vec<ConeWarning>,
}

/// A nonzero proper face, by its rays and the facets containing it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Face {
    pub facets: Vec<usize>,
    pub rays: Vec<usize>,
}

pub fn validate_good_cone(normals: &[Vec<BigInt>], k: usize) -> Result<GoodCone, ConeError> {
    if k < 2 {
        return Err(ConeError::RankTooSmall(k));
    }
    if normals.len() < k {
        return Err(ConeError::TooFewNormals { needed: k, got: normals.len() });
    }
    let mut primitive_normals = Vec::new();
    let mut labels = Vec::new();
    let mut warnings = Vec::new();
    for (index, u) in normals.iter().enumerate() {
        if u.len() != k {
            return Err(ConeError::WrongLength { index, len: u.len(), rank: k });
        }
        let (p, g) = primitive(u);
        if g.is_zero() {
            return Err(ConeError::ZeroNormal(index));
        }
        if !g.is_one() {
            warnings.push(ConeWarning::NonPrimitiveNormal { index, label: g.clone() });
        }
        primitive_normals.push(p);
        labels.push(g);
    }
    let nq: Vec<Vec<Q>> = primitive_normals.iter().map(|u| to_q(u)).collect();
    let r = rank_q(&nq);
    if r < k {
        return Err(ConeError::NotStronglyConvex { rank: r, ambient: k });
    }

    let (rays, ray_facets) = extreme_rays(&nq);
    let rq: Vec<Vec<Q>> = rays.iter().map(|r| to_q(r)).collect();
    if rays.is_empty() || rank_q(&rq) < k {
        return Err(ConeError::EmptyInterior);
    }
    for a in 0..normals.len() {
        let on: Vec<Vec<Q>> = (0..rays.len()).filter(|&i| ray_facets[i].contains(&a)).map(|i| rq[i].clone()).collect();
        if rank_q(&on) < k - 1 {
            return Err(ConeError::RedundantNormal(a));
        }
        if (0..a).any(|b| primitive_normals[b] == primitive_normals[a]) {
            return Err(ConeError::RedundantNormal(a));
        }
    }

    let cone = GoodCone {
        name: None,
        rank: k,
        normals: normals.to_vec(),
        primitive_normals,
        labels,
        rays,
        ray_facets,
        warnings,
    };
    for face in cone.faces() {
        let m: Vec<Vec<BigInt>> = face.facets.iter().map(|&a| cone.primitive_normals[a].clone()).collect();
        let inv = smith_invariants(&m);
        if inv.iter().any(|d| !d.is_one()) {
            return Err(ConeError::NotGood {
                facets: face.facets,
                invariants: inv.iter().map(|d| d.to_string()).collect(),
            });
        }
    }
    Ok(cone)
}

/// Extreme rays of `{x : <x, u> >= 0}` for full-rank `normals`, with their
/// incident facets.
pub fn extreme_rays(normals: &[Vec<Q>]) -> (Vec<Vec<BigInt>>, Vec<Vec<usize>>) {
    let k = normals[0].len();
    let mut seen = BTreeSet::new();
    let mut rays = Vec::new();
    let mut incidence = Vec::new();
    for subset in (0..normals.len()).combinations(k - 1) {
        let rows: Vec<Vec<Q>> = subset.iter().map(|&a| normals[a].clone()).collect();
        let v = kernel_vector(&rows);
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let pairings: Vec<Q> = normals.iter().map(|u| dot_q(u, &v)).collect();
        let sign = if pairings.iter().all(|p| !p.is_negative()) {
            1
        } else if pairings.iter().all(|p| !p.is_positive()) {
            -1
        } else {
            continue;
        };
        let mut ray = clear_denominators(&v);
        if sign < 0 {
            ray.iter_mut().for_each(|x| *x = -x.clone());
        }
        if seen.insert(ray.clone()) {
            incidence.push((0..normals.len()).filter(|&a| pairings[a].is_zero()).collect());
            rays.push(ray);
        }
    }
    (rays, incidence)
}

impl GoodCone {
    pub fn from_i64(name: &str, normals: &[&[i64]]) -> Result<GoodCone, ConeError> {
        let k = normals.first().map_or(0, |u| u.len());
        let nz: Vec<Vec<BigInt>> = normals.iter().map(|u| u.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let mut cone = validate_good_cone(&nz, k)?;
        cone.name = Some(name.to_string());
        Ok(cone)
    }

    /// Dimension parameter `n = k - 1`.
    pub fn n(&self) -> usize {
        self.rank - 1
    }

    pub fn normals_q(&self) -> Vec<Vec<Q>> {
        self.normals.iter().map(|u| to_q(u)).collect()
    }

    pub fn rays_q(&self) -> Vec<Vec<Q>> {
        self.rays.iter().map(|r| to_q(r)).collect()
    }

    /// All nonzero proper faces.
    pub fn faces(&self) -> Vec<Face> {
        let all: BTreeSet<usize> = (0..self.rays.len()).collect();
        let closure = |rays: &BTreeSet<usize>| -> Vec<usize> {
            (0..self.normals.len()).filter(|a| rays.iter().all(|&i| self.ray_facets[i].contains(a))).collect()
        };
        let mut found: BTreeSet<Face> = BTreeSet::new();
        let mut frontier: Vec<BTreeSet<usize>> = (0..self.normals.len())
            .map(|a| all.iter().copied().filter(|&i| self.ray_facets[i].contains(&a)).collect())
            .collect();
        while let Some(rays) = frontier.pop() {
            if rays.is_empty() {
                continue;
            }
            let face = Face { facets: closure(&rays), rays: rays.iter().copied().collect() };
            if !found.insert(face.clone()) {
                continue;
            }
            for a in 0..self.normals.len() {
                if !face.facets.contains(&a) {
                    frontier.push(rays.iter().copied().filter(|&i| self.ray_facets[i].contains(&a)).collect());
                }
            }
        }
        found.into_iter().collect()
    }

    /// `<r, b> > 0` for every ray generator of `C*`.
    pub fn reeb_cone_contains(&self, b: &[Q]) -> bool {
        b.len() == self.rank && self.rays_q().iter().all(|r| dot_q(r, b).is_positive())
    }

    pub fn check_simple(&self) -> Result<(), ConeError> {
        for (vertex, f) in self.ray_facets.iter().enumerate() {
            if f.len() != self.rank - 1 {
                return Err(ConeError::NotSimple { vertex, facets: f.len(), expected: self.rank - 1 });
            }
        }
        Ok(())
    }

    /// `Δ = C* ∩ {<x, b_o> = 1/2}`.
    pub fn slice_polytope(&self, b_o: &[Q]) -> Result<SlicePolytope, ConeError> {
        if !self.reeb_cone_contains(b_o) {
            return Err(ConeError::NotInReebCone(format_rational_vec(b_o)));
        }
        self.check_simple()?;
        let half = Q::new(1.into(), 2.into());
        let vertices: Vec<Vec<Q>> = self
            .rays_q()
            .iter()
            .map(|r| {
                let s = &half / dot_q(r, b_o);
                r.iter().map(|x| x * &s).collect()
            })
            .collect();
        let mut edges = Vec::new();
        for (v, w) in (0..vertices.len()).tuple_combinations() {
            let shared = self.ray_facets[v].iter().filter(|a| self.ray_facets[w].contains(a)).count();
            if shared + 2 == self.rank {
                let diff: Vec<Q> = vertices[w].iter().zip(&vertices[v]).map(|(a, b)| a - b).collect();
                if diff.iter().all(|x| x.is_zero()) {
                    return Err(ConeError::DegenerateEdge(v));
                }
                edges.push(Edge { from: v, to: w, direction: clear_denominators(&diff) });
            }
        }
        Ok(SlicePolytope { b_o: b_o.to_vec(), vertices, vertex_facets: self.ray_facets.clone(), edges })
    }

    /// Fixed-point weights at a slice vertex.
    ///
    /// With `M` the matrix of rows `(b_o, u_1, ..., u_n)` built from the
    /// facets through the vertex, the columns `w_j` of `M^{-1}` give
    /// `κ_0 = w_0 = 2 x_v`, `κ_i = 2 w_i`, and `d_v = |det M|`.
    pub fn vertex_weights(&self, slice: &SlicePolytope, vertex: usize) -> Result<VertexWeights, ConeError> {
        if slice.b_o.iter().any(|x| !x.is_integer()) {
            return Err(ConeError::NonIntegralSlicingField(format_rational_vec(&slice.b_o)));
        }
        let facets = &slice.vertex_facets[vertex];
        if facets.len() != self.rank - 1 {
            return Err(ConeError::NotSimple { vertex, facets: facets.len(), expected: self.rank - 1 });
        }
        let mut m = vec![slice.b_o.clone()];
        m.extend(facets.iter().map(|&a| to_q(&self.normals[a])));
        let inv = inverse_q(&m).ok_or(ConeError::DegenerateEdge(vertex))?;
        let two = Q::from_integer(2.into());
        let kappa: Vec<Vec<Q>> = (0..self.rank)
            .map(|j| {
                let col = inv.iter().map(|row| row[j].clone());
                if j == 0 {
                    col.collect()
                } else {
                    col.map(|x| x * &two).collect()
                }
            })
            .collect();
        let mz: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        let d: BigInt = smith_invariants(&mz).iter().product();
        debug_assert_eq!(Q::from_integer(d.clone()), det_q(&m).abs());
        Ok(VertexWeights { vertex, d, kappa })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Primitive integer direction from `from` to `to`.
    pub direction: Vec<BigInt>,
}

#[derive(Debug, Clone)]
pub struct SlicePolytope {
    pub b_o: Vec<Q>,
    /// One vertex per ray of `C*`, in the cone's ray order.
    pub vertices: Vec<Vec<Q>>,
    pub vertex_facets: Vec<Vec<usize>>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeights {
    pub vertex: usize,
    pub d: BigInt,
    pub kappa: Vec<Vec<Q>>,
}
