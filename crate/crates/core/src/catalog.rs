//! Built-in cones.

use crate::arith::{q_int, Q};
use crate::cone::{ConeError, GoodCone};

pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub normals: Vec<Vec<i64>>,
}

impl CatalogEntry {
    pub fn cone(&self) -> Result<GoodCone, ConeError> {
        let refs: Vec<&[i64]> = self.normals.iter().map(|v| v.as_slice()).collect();
        GoodCone::from_i64(self.name, &refs)
    }
}

fn orthant(k: usize) -> Vec<Vec<i64>> {
    (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect()
}

/// Cone over the lens space `L(p, q)`.
pub fn lens_normals(p: i64, q: i64) -> Vec<Vec<i64>> {
    vec![vec![1, 0], vec![-q, p]]
}

/// Quadrilateral cone of the `Y^{p,q}` family, `0 < q < p`.
pub fn ypq_normals(p: i64, q: i64) -> Vec<Vec<i64>> {
    vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, p, p], vec![1, p - q - 1, p - q]]
}

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry { name: "orthant2", description: "round S^3", normals: orthant(2) },
        CatalogEntry { name: "orthant3", description: "round S^5", normals: orthant(3) },
        CatalogEntry { name: "orthant4", description: "round S^7", normals: orthant(4) },
        CatalogEntry { name: "lens21", description: "lens space L(2,1)", normals: lens_normals(2, 1) },
        CatalogEntry { name: "lens31", description: "lens space L(3,1)", normals: lens_normals(3, 1) },
        CatalogEntry { name: "lens32", description: "lens space L(3,2)", normals: lens_normals(3, 2) },
        CatalogEntry {
            name: "conifold",
            description: "cone over a square, link S^2 x S^3",
            normals: vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1], vec![1, 0, 1]],
        },
        CatalogEntry { name: "y21", description: "Y^{2,1}", normals: ypq_normals(2, 1) },
        CatalogEntry { name: "y31", description: "Y^{3,1}", normals: ypq_normals(3, 1) },
        CatalogEntry { name: "y32", description: "Y^{3,2}", normals: ypq_normals(3, 2) },
        CatalogEntry {
            name: "orthant2-z2",
            description: "S^3 with a Z/2 orbifold label on one facet",
            normals: vec![vec![2, 0], vec![0, 1]],
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog cone `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Look up a catalog name, or build `ypq:p,q` on the fly.
pub fn get(name: &str) -> Result<GoodCone, CatalogError> {
    if let Some(spec) = name.strip_prefix("ypq:") {
        let parts: Vec<i64> = spec
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CatalogError::Unknown(name.to_string()))?;
        if let [p, q] = parts[..] {
            if 0 < q && q < p {
                let normals = ypq_normals(p, q);
                let refs: Vec<&[i64]> = normals.iter().map(|v| v.as_slice()).collect();
                return Ok(GoodCone::from_i64(name, &refs)?);
            }
        }
        return Err(CatalogError::Unknown(name.to_string()));
    }
    let entry = entries().into_iter().find(|e| e.name == name).ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
    Ok(entry.cone()?)
}

/// Sum of the facet normals: an integral point of the open Reeb cone.
pub fn normal_sum(cone: &GoodCone) -> Vec<Q> {
    (0..cone.rank)
        .map(|i| cone.primitive_normals.iter().map(|u| Q::from_integer(u[i].clone())).fold(q_int(0), |a, x| a + x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_validates() {
        for e in entries() {
            let cone = e.cone().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(cone.reeb_cone_contains(&normal_sum(&cone)), "{}", e.name);
            cone.check_simple().unwrap();
        }
        assert_eq!(get("ypq:4,1").unwrap().rays.len(), 4);
        assert!(get("ypq:1,2").is_err());
        assert!(get("nope").is_err());
    }
}
