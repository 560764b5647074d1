//! Subsets of Z_p up to affine equivalence, and the color sets whose palette
//! graph contains a connected R-subgraph on at least three vertices.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::lower_bound;
use crate::exactalg::{check_modulus, AlgebraError};
use crate::palette::{connected_r_witness, palette_graph, PaletteError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("set size {k} out of range 1..={p}")]
    InvalidSize { k: usize, p: u64 },
    #[error("color set is empty")]
    EmptySet,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Palette(#[from] PaletteError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalSet {
    pub modulus: u64,
    pub elements: Vec<u64>,
    pub canonical: bool,
}

impl CanonicalSet {
    pub fn as_set(&self) -> BTreeSet<u64> {
        self.elements.iter().copied().collect()
    }
}

/// Sorted image of `set` under `x -> s*x + t`.
pub fn affine_image(set: &[u64], s: u64, t: u64, p: u64) -> Vec<u64> {
    let mut image: Vec<u64> = set.iter().map(|&a| (s * a + t) % p).collect();
    image.sort_unstable();
    image
}

fn normalized(set: &[u64], p: u64) -> Vec<u64> {
    let mut v: Vec<u64> = set.iter().map(|&a| a % p).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Lexicographically smallest sorted affine image. The minimum always
/// contains 0, so only translations sending some element to 0 are tried.
pub fn canonical_affine(set: &[u64], p: u64) -> CanonicalSet {
    let set = normalized(set, p);
    let mut best: Option<Vec<u64>> = None;
    for s in 1..p {
        for &a in &set {
            let t = (p - s * a % p) % p;
            let image = affine_image(&set, s, t, p);
            if best.as_ref().is_none_or(|b| image < *b) {
                best = Some(image);
            }
        }
    }
    CanonicalSet { modulus: p, elements: best.unwrap_or_default(), canonical: true }
}

pub fn affine_equivalent(a: &[u64], b: &[u64], p: u64) -> bool {
    let (a, b) = (normalized(a, p), normalized(b, p));
    a.len() == b.len() && canonical_affine(&a, p).elements == canonical_affine(&b, p).elements
}

/// Number of distinct affine images of `set`, i.e. `p(p-1) / |stabilizer|`.
pub fn orbit_size(set: &[u64], p: u64) -> u64 {
    let set = normalized(set, p);
    let stabilizer = (1..p)
        .flat_map(|s| (0..p).map(move |t| (s, t)))
        .filter(|&(s, t)| affine_image(&set, s, t, p) == set)
        .count() as u64;
    p * (p - 1) / stabilizer
}

fn check_size(p: u64, k: usize) -> Result<(), EnumerateError> {
    check_modulus(p)?;
    if k == 0 || k as u64 > p {
        return Err(EnumerateError::InvalidSize { k, p });
    }
    Ok(())
}

/// Canonical representatives of all affine classes of `k`-subsets of Z_p, in
/// lexicographic order.
pub fn enumerate_classes(p: u64, k: usize) -> Result<Vec<CanonicalSet>, EnumerateError> {
    check_size(p, k)?;
    if k == 1 {
        return Ok(vec![CanonicalSet { modulus: p, elements: vec![0], canonical: true }]);
    }
    // every class with k >= 2 has a member containing {0, 1}
    let rest = k - 2;
    let found: BTreeSet<Vec<u64>> = if rest == 0 {
        BTreeSet::from([canonical_affine(&[0, 1], p).elements])
    } else {
        (2..p)
            .into_par_iter()
            .map(|first| {
                (first + 1..p)
                    .combinations(rest - 1)
                    .map(|tail| {
                        let mut s = vec![0, 1, first];
                        s.extend(tail);
                        canonical_affine(&s, p).elements
                    })
                    .collect::<BTreeSet<_>>()
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    };
    Ok(found.into_iter().map(|elements| CanonicalSet { modulus: p, elements, canonical: true }).collect())
}

pub fn admits_connected_r_subgraph(set: &[u64], p: u64) -> Result<bool, EnumerateError> {
    let s: BTreeSet<u64> = set.iter().copied().collect();
    if s.is_empty() {
        return Err(EnumerateError::EmptySet);
    }
    let g = palette_graph(&s, p)?;
    Ok(connected_r_witness(&g)?.is_some())
}

/// Classes of `k`-subsets whose palette graph contains a connected
/// R-subgraph with at least three vertices.
pub fn candidates(p: u64, k: usize) -> Result<Vec<CanonicalSet>, EnumerateError> {
    let classes = enumerate_classes(p, k)?;
    let keep = classes
        .par_iter()
        .map(|c| admits_connected_r_subgraph(&c.elements, p))
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(classes.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect())
}

/// Reference candidate lists at size `floor(log2 p) + 2` for odd primes
/// below 32, as printed representatives (compared up to affine equivalence).
pub const EXPECTED_CANDIDATES: &[(u64, &[&[u64]])] = &[
    (3, &[&[0, 1, 2]]),
    (5, &[&[0, 1, 2, 3]]),
    (7, &[&[0, 1, 2, 4]]),
    (11, &[&[0, 1, 2, 3, 6], &[0, 1, 2, 4, 7]]),
    (13, &[&[0, 1, 2, 4, 7]]),
    (
        17,
        &[
            &[0, 1, 2, 3, 5, 9],
            &[0, 1, 2, 3, 5, 10],
            &[0, 1, 2, 3, 5, 12],
            &[0, 1, 2, 3, 6, 9],
            &[0, 1, 2, 3, 6, 10],
            &[0, 1, 2, 3, 6, 11],
            &[0, 1, 2, 3, 6, 13],
            &[0, 1, 2, 3, 7, 11],
            &[0, 1, 2, 4, 5, 9],
            &[0, 1, 2, 4, 5, 10],
            &[0, 1, 2, 4, 5, 12],
            &[0, 1, 2, 4, 10, 13],
        ],
    ),
    (
        19,
        &[
            &[0, 1, 2, 3, 5, 10],
            &[0, 1, 2, 3, 6, 10],
            &[0, 1, 2, 3, 6, 11],
            &[0, 1, 2, 3, 6, 12],
            &[0, 1, 2, 3, 6, 13],
            &[0, 1, 2, 3, 6, 14],
            &[0, 1, 2, 3, 7, 12],
            &[0, 1, 2, 4, 5, 10],
            &[0, 1, 2, 4, 5, 14],
            &[0, 1, 2, 4, 7, 12],
            &[0, 1, 2, 4, 7, 15],
        ],
    ),
    (
        23,
        &[
            &[0, 1, 2, 3, 6, 12],
            &[0, 1, 2, 4, 7, 12],
            &[0, 1, 2, 4, 7, 13],
            &[0, 1, 2, 4, 7, 14],
            &[0, 1, 2, 4, 9, 14],
            &[0, 1, 2, 4, 10, 19],
        ],
    ),
    (29, &[&[0, 1, 2, 4, 8, 15]]),
    (31, &[&[0, 1, 2, 4, 8, 16]]),
];

pub fn expected_candidates(p: u64) -> Option<&'static [&'static [u64]]> {
    EXPECTED_CANDIDATES.iter().find(|(q, _)| *q == p).map(|(_, list)| *list)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub k: usize,
    pub classes: usize,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub p: u64,
    /// `floor(log2 p) + 2`.
    pub k: usize,
    /// Sizes below `k`; each must have no candidates.
    pub below: Vec<SizeSummary>,
    pub classes: Vec<Vec<u64>>,
    pub expected: Option<Vec<Vec<u64>>>,
    pub expected_match: Option<bool>,
    pub passed: bool,
}

fn same_classes(found: &[Vec<u64>], expected: &[&[u64]], p: u64) -> bool {
    let canon = |s: &[u64]| canonical_affine(s, p).elements;
    let a: BTreeSet<Vec<u64>> = found.iter().map(|s| canon(s)).collect();
    let b: BTreeSet<Vec<u64>> = expected.iter().map(|s| canon(s)).collect();
    a.len() == found.len() && b.len() == expected.len() && a == b
}

pub fn table_report(p: u64) -> Result<TableReport, EnumerateError> {
    check_modulus(p)?;
    let k = lower_bound(p);
    let below = (1..k)
        .map(|size| {
            Ok(SizeSummary {
                k: size,
                classes: enumerate_classes(p, size)?.len(),
                candidates: candidates(p, size)?.len(),
            })
        })
        .collect::<Result<Vec<_>, EnumerateError>>()?;
    let classes: Vec<Vec<u64>> = candidates(p, k)?.into_iter().map(|c| c.elements).collect();
    let expected = expected_candidates(p);
    let expected_match = expected.map(|e| same_classes(&classes, e, p));
    let passed = below.iter().all(|s| s.candidates == 0) && expected_match.unwrap_or(true);
    Ok(TableReport {
        p,
        k,
        below,
        classes,
        expected: expected.map(|e| e.iter().map(|s| s.to_vec()).collect()),
        expected_match,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_canonical(set: &[u64], p: u64) -> Vec<u64> {
        (1..p).flat_map(|s| (0..p).map(move |t| affine_image(set, s, t, p))).min().unwrap()
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_affine(&[1, 2, 3, 4], 5).elements, vec![0, 1, 2, 3]);
        assert_eq!(canonical_affine(&[0, 2, 4, 6], 7).elements, vec![0, 1, 2, 3]);
        assert_eq!(canonical_affine(&[0, 1, 2, 4], 7).elements, vec![0, 1, 2, 4]);
        assert_eq!(brute_canonical(&[0, 2, 4, 6], 7), vec![0, 1, 2, 3]);
        assert_eq!(brute_canonical(&[0, 1, 2, 4], 7), vec![0, 1, 2, 4]);
    }

    #[test]
    fn canonical_matches_brute_force() {
        for p in [3u64, 5, 7, 11] {
            for mask in 1u32..(1 << p) {
                let s: Vec<u64> = (0..p).filter(|&i| mask >> i & 1 == 1).collect();
                assert_eq!(canonical_affine(&s, p).elements, brute_canonical(&s, p), "{s:?} mod {p}");
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        assert!(affine_equivalent(&[0, 1, 2, 3], &[1, 2, 3, 4], 5));
        assert!(!affine_equivalent(&[0, 1, 2, 3], &[0, 1, 2, 4], 7));
        assert!(affine_equivalent(&[0], &[3], 7));
        assert!(!affine_equivalent(&[0, 1], &[0, 1, 2], 7));
    }

    #[test]
    fn class_lists() {
        let five = enumerate_classes(5, 4).unwrap();
        assert_eq!(five.iter().map(|c| orbit_size(&c.elements, 5)).sum::<u64>(), binomial(5, 4));
        let seven: Vec<Vec<u64>> = enumerate_classes(7, 4).unwrap().into_iter().map(|c| c.elements).collect();
        assert_eq!(seven, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4]]);
        assert_eq!(enumerate_classes(3, 3).unwrap()[0].elements, vec![0, 1, 2]);
        assert_eq!(enumerate_classes(7, 1).unwrap()[0].elements, vec![0]);
        assert!(matches!(enumerate_classes(7, 0), Err(EnumerateError::InvalidSize { .. })));
        assert!(matches!(enumerate_classes(5, 6), Err(EnumerateError::InvalidSize { .. })));
    }

    #[test]
    fn orbit_counts_cover_all_subsets() {
        for p in [5u64, 7, 11, 13] {
            for k in 1..=p.min(6) as usize {
                let total: u64 = enumerate_classes(p, k).unwrap().iter().map(|c| orbit_size(&c.elements, p)).sum();
                assert_eq!(total, binomial(p, k as u64), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn candidate_examples() {
        let c = candidates(7, 4).unwrap();
        assert_eq!(c.len(), 1);
        assert!(affine_equivalent(&c[0].elements, &[0, 1, 2, 4], 7));
        assert!(candidates(7, 3).unwrap().is_empty());
        let c = candidates(11, 5).unwrap();
        assert_eq!(c.len(), 2);
        let found: Vec<Vec<u64>> = c.into_iter().map(|c| c.elements).collect();
        assert!(same_classes(&found, &[&[0, 1, 2, 3, 6], &[0, 1, 2, 4, 7]], 11));
    }

    #[test]
    fn small_reports() {
        for p in [3u64, 5, 7, 11, 13] {
            let r = table_report(p).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.expected_match, Some(true));
        }
        let r = table_report(37).unwrap();
        assert_eq!(r.expected_match, None);
    }
}
