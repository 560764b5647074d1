//! Built-in PD codes for small prime knots, validated against their classical
//! determinants when loaded.

use num_bigint::BigInt;
use thiserror::Error;

use crate::coloring::knot_determinant;
use crate::diagram::{build_diagram, parse_pd, Diagram, DiagramError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub pd: &'static str,
    pub determinant: u64,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { name: "3_1", pd: "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]", determinant: 3 },
    CatalogEntry { name: "4_1", pd: "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]", determinant: 5 },
    CatalogEntry {
        name: "5_1",
        pd: "X[1,6,2,7] X[3,8,4,9] X[5,10,6,1] X[7,2,8,3] X[9,4,10,5]",
        determinant: 5,
    },
    CatalogEntry {
        name: "5_2",
        pd: "X[1,4,2,5] X[3,8,4,9] X[5,10,6,1] X[9,6,10,7] X[7,2,8,3]",
        determinant: 7,
    },
    CatalogEntry {
        name: "6_1",
        pd: "X[1,4,2,5] X[7,10,8,11] X[3,9,4,8] X[9,3,10,2] X[5,12,6,1] X[11,6,12,7]",
        determinant: 9,
    },
    CatalogEntry {
        name: "6_2",
        pd: "X[1,4,2,5] X[5,10,6,11] X[3,9,4,8] X[9,3,10,2] X[7,12,8,1] X[11,6,12,7]",
        determinant: 11,
    },
    CatalogEntry {
        name: "6_3",
        pd: "X[4,2,5,1] X[8,4,9,3] X[12,9,1,10] X[10,5,11,6] X[6,11,7,12] X[2,8,3,7]",
        determinant: 13,
    },
    CatalogEntry {
        name: "7_1",
        pd: "X[1,8,2,9] X[3,10,4,11] X[5,12,6,13] X[7,14,8,1] X[9,2,10,3] X[11,4,12,5] X[13,6,14,7]",
        determinant: 7,
    },
    CatalogEntry {
        name: "7_4",
        pd: "X[10,2,11,1] X[2,10,3,9] X[8,4,9,3] X[14,8,1,7] X[4,14,5,13] X[12,6,13,5] X[6,12,7,11]",
        determinant: 15,
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown knot {0:?}")]
    Unknown(String),
    #[error("catalog entry {name}: {source}")]
    Diagram { name: &'static str, source: DiagramError },
    #[error("catalog entry {name}: expected {expected} regions, found {found}")]
    Regions { name: &'static str, expected: usize, found: usize },
    #[error("catalog entry {name}: determinant {found}, expected {expected}")]
    Determinant { name: &'static str, expected: u64, found: BigInt },
}

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|e| e.name)
}

impl CatalogEntry {
    pub fn load(&self) -> Result<Diagram, CatalogError> {
        let name = self.name;
        let pd = parse_pd(self.pd).map_err(|source| CatalogError::Diagram { name, source })?;
        let d = build_diagram(&pd).map_err(|source| CatalogError::Diagram { name, source })?;
        let expected = pd.len() + 2;
        if d.region_count() != expected {
            return Err(CatalogError::Regions { name, expected, found: d.region_count() });
        }
        let det = knot_determinant(&d);
        if det != BigInt::from(self.determinant) {
            return Err(CatalogError::Determinant { name, expected: self.determinant, found: det });
        }
        Ok(d)
    }
}

pub fn load(name: &str) -> Result<Diagram, CatalogError> {
    entry(name).ok_or_else(|| CatalogError::Unknown(name.to_string()))?.load()
}

/// Every catalog diagram, in catalog order.
pub fn load_all() -> Result<Vec<(&'static CatalogEntry, Diagram)>, CatalogError> {
    CATALOG.iter().map(|e| e.load().map(|d| (e, d))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_validate() {
        let all = load_all().unwrap();
        assert_eq!(all.len(), 9);
        let dets: Vec<u64> = all.iter().map(|(e, _)| e.determinant).collect();
        assert_eq!(dets, vec![3, 5, 5, 7, 9, 11, 13, 7, 15]);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(load("8_19"), Err(CatalogError::Unknown("8_19".into())));
    }
}
