//! File formats: cone JSON, dataset JSON and scan CSV.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{format_decimal, format_rational, Q};
use crate::catalog::{self, CatalogError};
use crate::cone::{validate_good_cone, ConeError, GoodCone};
use crate::fixed_locus::{FixedLocusError, LocalizationDataset};
use crate::optimize::ScanRow;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("rank {declared} does not match normal length {actual}")]
    RankMismatch { declared: usize, actual: usize },
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Dataset(#[from] FixedLocusError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeJson {
    #[serde(default)]
    pub name: Option<String>,
    pub rank: usize,
    pub normals: Vec<Vec<i64>>,
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })
}

pub fn parse_cone(text: &str) -> Result<GoodCone, IoError> {
    let raw: ConeJson = serde_json::from_str(text)?;
    if let Some(u) = raw.normals.iter().find(|u| u.len() != raw.rank) {
        return Err(IoError::RankMismatch { declared: raw.rank, actual: u.len() });
    }
    let normals: Vec<Vec<BigInt>> = raw.normals.iter().map(|u| u.iter().map(|&x| x.into()).collect()).collect();
    let mut cone = validate_good_cone(&normals, raw.rank)?;
    cone.name = raw.name;
    Ok(cone)
}

/// `catalog:NAME` or a path to a cone JSON file.
pub fn load_cone(source: &str) -> Result<GoodCone, IoError> {
    match source.strip_prefix("catalog:") {
        Some(name) => Ok(catalog::get(name)?),
        None => parse_cone(&read(Path::new(source))?),
    }
}

pub fn cone_to_json(cone: &GoodCone) -> serde_json::Value {
    let entry = |x: &BigInt| x.to_i64().map_or_else(|| serde_json::json!(x.to_string()), |v| serde_json::json!(v));
    let normals: Vec<Vec<serde_json::Value>> = cone.normals.iter().map(|u| u.iter().map(entry).collect()).collect();
    serde_json::json!({ "name": cone.name, "rank": cone.rank, "normals": normals })
}

pub fn parse_dataset(text: &str) -> Result<LocalizationDataset, IoError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    Ok(LocalizationDataset::from_json(value)?)
}

pub fn load_dataset(path: &Path) -> Result<LocalizationDataset, IoError> {
    parse_dataset(&read(path)?)
}

/// CSV with exact `t` and `b` columns followed by decimal functional values.
pub fn scan_csv(rows: &[ScanRow], rank: usize) -> String {
    let mut out = String::from("t");
    for i in 1..=rank {
        write!(out, ",b{i}").unwrap();
    }
    out.push_str(",V,S,H,dH/dt\n");
    for r in rows {
        out.push_str(&format_rational(&r.t));
        for x in &r.b {
            write!(out, ",{}", format_rational(x)).unwrap();
        }
        for x in [r.v, r.s, r.h, r.dh_dt] {
            write!(out, ",{}", format_decimal(x)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Rational vector rendered as strings, as used by every JSON schema here.
pub fn rational_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_round_trip() {
        let cone = parse_cone(r#"{"name": "z2", "rank": 2, "normals": [[2, 0], [0, 1]]}"#).unwrap();
        assert_eq!(cone.warnings.len(), 1);
        let again = parse_cone(&cone_to_json(&cone).to_string()).unwrap();
        assert_eq!(again.normals, cone.normals);
        assert_eq!(again.name.as_deref(), Some("z2"));
    }

    #[test]
    fn json_errors_carry_positions() {
        match parse_cone("{\n  \"rank\": 2,\n  \"normals\": [[1, 0], [0, 1]\n}") {
            Err(IoError::Json { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_cone(r#"{"rank": 3, "normals": [[1, 0], [0, 1]]}"#),
            Err(IoError::RankMismatch { .. })
        ));
        assert!(matches!(load_cone("catalog:nope"), Err(IoError::Catalog(_))));
    }
}
