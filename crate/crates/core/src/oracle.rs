//! Exact geometric reference values for toric cones: the Euclidean volume of
//! the truncated cone `R_b = {y in C* : <y, b> <= 1/2}` and lattice-normalized
//! measures of its facets on the boundary of `C*`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{dot_q, factorial, pow2, Q};
use crate::cone::{ConeError, GoodCone, SlicePolytope};
use crate::lattice::{det_q, rank_q, to_q, unimodular_with_first_row};
use crate::localize::FunctionalValue;

/// Pulling triangulation of the face spanned by `verts` (slice vertex
/// indices), of dimension `dim`. Vertices are pulled in the order given by
/// `order`, which must rank every vertex.
fn pulling(cone: &GoodCone, verts: &[usize], dim: usize, order: &[usize]) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![vec![verts[0]]];
    }
    let apex = *verts.iter().min_by_key(|&&v| order[v]).expect("nonempty face");
    let rq = cone.rays_q();
    let mut out = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for a in 0..cone.normals.len() {
        let sub: Vec<usize> = verts.iter().copied().filter(|&v| cone.ray_facets[v].contains(&a)).collect();
        if sub.is_empty() || sub.len() == verts.len() || sub.contains(&apex) || seen.contains(&sub) {
            continue;
        }
        let rows: Vec<Vec<Q>> = sub.iter().map(|&v| rq[v].clone()).collect();
        if rank_q(&rows) != dim {
            continue;
        }
        seen.push(sub.clone());
        for mut s in pulling(cone, &sub, dim - 1, order) {
            s.push(apex);
            out.push(s);
        }
    }
    out
}

fn slice(cone: &GoodCone, b: &[Q]) -> Result<SlicePolytope, ConeError> {
    cone.slice_polytope(b)
}

/// Euclidean volume of `R_b`, triangulating the slice with the given vertex
/// pulling order.
pub fn truncated_cone_volume_with_order(cone: &GoodCone, b: &[Q], order: &[usize]) -> Result<Q, ConeError> {
    let s = slice(cone, b)?;
    let all: Vec<usize> = (0..s.vertices.len()).collect();
    let n = cone.n();
    let simplices = pulling(cone, &all, n, order);
    let total: Q = simplices
        .iter()
        .map(|simplex| {
            let m: Vec<Vec<Q>> = simplex.iter().map(|&v| s.vertices[v].clone()).collect();
            det_q(&m).abs()
        })
        .sum();
    Ok(total / Q::from_integer(factorial(n + 1)))
}

pub fn truncated_cone_volume(cone: &GoodCone, b: &[Q]) -> Result<Q, ConeError> {
    let order: Vec<usize> = (0..cone.rays.len()).collect();
    truncated_cone_volume_with_order(cone, b, &order)
}

/// For every facet `a` of `C*`: the `n`-volume of `R_b ∩ {<y, u_a> = 0}` in
/// coordinates of the sublattice `u_a^perp ∩ Z^k`, divided by the label of
/// `u_a`.
pub fn facet_measures(cone: &GoodCone, b: &[Q]) -> Result<Vec<Q>, ConeError> {
    let s = slice(cone, b)?;
    let n = cone.n();
    let order: Vec<usize> = (0..s.vertices.len()).collect();
    let mut out = Vec::with_capacity(cone.normals.len());
    for a in 0..cone.normals.len() {
        let w = unimodular_with_first_row(&cone.primitive_normals[a]);
        let wq: Vec<Vec<Q>> = w.iter().map(|r| to_q(r)).collect();
        let coords = |x: &[Q]| -> Vec<Q> { wq[1..].iter().map(|row| dot_q(row, x)).collect() };
        let verts: Vec<usize> = (0..s.vertices.len()).filter(|&v| cone.ray_facets[v].contains(&a)).collect();
        let total: Q = pulling(cone, &verts, n - 1, &order)
            .iter()
            .map(|simplex| {
                let m: Vec<Vec<Q>> = simplex.iter().map(|&v| coords(&s.vertices[v])).collect();
                det_q(&m).abs()
            })
            .sum();
        let label = Q::from_integer(cone.labels[a].clone());
        out.push(total / Q::from_integer(factorial(n)) / label);
    }
    Ok(out)
}

/// `(n+1) 2^(n+2) pi^(n+1) vol(R_b)`.
pub fn oracle_volume(cone: &GoodCone, b: &[Q]) -> Result<FunctionalValue, ConeError> {
    let n = cone.n();
    let c = Q::from_integer(BigInt::from(n + 1) * pow2(n + 2));
    Ok(FunctionalValue { exact: c * truncated_cone_volume(cone, b)?, pi_power: n as u32 + 1 })
}

/// `n 2^(n+3) pi^(n+1) Σ_a facet measure`.
pub fn oracle_scalar(cone: &GoodCone, b: &[Q]) -> Result<FunctionalValue, ConeError> {
    let n = cone.n();
    let c = Q::from_integer(BigInt::from(n) * pow2(n + 3));
    let sum: Q = facet_measures(cone, b)?.into_iter().fold(Q::zero(), |a, x| a + x);
    Ok(FunctionalValue { exact: c * sum, pi_power: n as u32 + 1 })
}
