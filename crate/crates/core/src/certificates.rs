//! Determinant certificates for the lower bound on the number of colors.
//!
//! Given a nontrivial coloring with `l` colors, the coloring matrix is
//! augmented by one row (either `e_1` or `e_i - e_j`), columns of regions
//! sharing a color are summed, and an `(l-1)`-square submatrix is found whose
//! determinant is a nonzero multiple of `p`. Its rows satisfy the row-shape
//! condition (★), so `p <= |det| <= 2^(l-1)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{
    affine_transform, alexander_at_minus_one, checkerboard_coloring, coloring_matrix, ColoringError,
    DehnColoring,
};
use crate::diagram::Diagram;
use crate::exactalg::{det_int, rank_int, rank_mod_p, AlgebraError, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate requires nontrivial coloring")]
    TrivialColoring,
    #[error("coloring is mod {coloring}, requested mod {requested}")]
    ModulusMismatch { coloring: u64, requested: u64 },
    #[error("certificate extraction failed: no nonzero {0}-minor in the merged matrix")]
    ExtractionFailed(usize),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Nonzero-entry multisets admitted by (★), each sorted ascending.
pub const STAR_MULTISETS: [&[i64]; 15] = [
    &[-2],
    &[-1],
    &[1],
    &[2],
    &[-2, 1],
    &[-2, 2],
    &[-1, -1],
    &[-1, 1],
    &[-1, 2],
    &[1, 1],
    &[-2, 1, 1],
    &[-1, -1, 1],
    &[-1, -1, 2],
    &[-1, 1, 1],
    &[-1, -1, 1, 1],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// Extra row `e_1`; the coloring is shifted so region 0 has color 0.
    A,
    /// Extra row `e_i - e_j` for regions with equal color but opposite
    /// checkerboard shade.
    B { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedMatrix {
    pub matrix: IntMatrix,
    pub variant: Variant,
    /// The coloring the matrix annihilates mod p.
    pub coloring: DehnColoring,
}

fn require_nontrivial(d: &Diagram, c: &DehnColoring) -> Result<(), CertificateError> {
    c.validate(d)?;
    if c.is_trivial(d) {
        return Err(CertificateError::TrivialColoring);
    }
    Ok(())
}

/// Lexicographically smallest `i < j` with `C(x_i) = C(x_j)` but different
/// checkerboard shades.
fn split_pair(d: &Diagram, c: &DehnColoring) -> Result<Option<(usize, usize)>, CertificateError> {
    let shade = checkerboard_coloring(d, c.modulus)?;
    let r = d.region_count();
    Ok((0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .find(|&(i, j)| c.values[i] == c.values[j] && shade.values[i] != shade.values[j]))
}

pub fn augmented_matrix(d: &Diagram, c: &DehnColoring) -> Result<AugmentedMatrix, CertificateError> {
    require_nontrivial(d, c)?;
    match split_pair(d, c)? {
        None => {
            let shifted = affine_transform(c, 1, -(c.values[0] as i64))?;
            Ok(AugmentedMatrix { matrix: alexander_at_minus_one(d), variant: Variant::A, coloring: shifted })
        }
        Some((i, j)) => {
            let mut m = coloring_matrix(d);
            let mut row = vec![0i64; d.region_count()];
            row[i] = 1;
            row[j] = -1;
            m.push_row(&row);
            Ok(AugmentedMatrix { matrix: m, variant: Variant::B { i, j }, coloring: c.clone() })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equals,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankClaim {
    pub claim: String,
    pub observed: usize,
    pub relation: Relation,
    pub bound: usize,
    pub passed: bool,
}

impl RankClaim {
    fn new(claim: impl Into<String>, observed: usize, relation: Relation, bound: usize) -> Self {
        let passed = match relation {
            Relation::Equals => observed == bound,
            Relation::AtMost => observed <= bound,
        };
        Self { claim: claim.into(), observed, relation, bound, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub modulus: u64,
    pub crossings: usize,
    pub claims: Vec<RankClaim>,
}

impl RankReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

fn check_modulus_matches(c: &DehnColoring, p: u64) -> Result<(), CertificateError> {
    if c.modulus != p {
        return Err(CertificateError::ModulusMismatch { coloring: c.modulus, requested: p });
    }
    Ok(())
}

fn annihilates(m: &IntMatrix, c: &DehnColoring) -> bool {
    m.mul_vec_mod(&c.values, c.modulus).iter().all(|&x| x == 0)
}

/// Rank statements for the coloring matrix and both augmentations.
pub fn rank_checks(d: &Diagram, c: &DehnColoring, p: u64) -> Result<RankReport, CertificateError> {
    check_modulus_matches(c, p)?;
    require_nontrivial(d, c)?;
    let n = d.crossing_count();
    let mut claims = Vec::new();

    let m = coloring_matrix(d);
    claims.push(RankClaim::new("rank_Z M", rank_int(&m), Relation::Equals, n));
    claims.push(RankClaim::new(format!("rank_{p} M"), rank_mod_p(&m, p)?, Relation::AtMost, n - 1));

    let a = alexander_at_minus_one(d);
    let shifted = affine_transform(c, 1, -(c.values[0] as i64))?;
    claims.push(RankClaim::new("rank_Z A(-1)", rank_int(&a), Relation::Equals, n + 1));
    claims.push(RankClaim::new(format!("rank_{p} A(-1)"), rank_mod_p(&a, p)?, Relation::AtMost, n));
    claims.push(RankClaim::new(
        "A(-1) annihilates C - C(x_1)",
        usize::from(!annihilates(&a, &shifted)),
        Relation::Equals,
        0,
    ));

    if let Some((i, j)) = split_pair(d, c)? {
        let mut b = coloring_matrix(d);
        let mut row = vec![0i64; d.region_count()];
        row[i] = 1;
        row[j] = -1;
        b.push_row(&row);
        let tag = format!("B[{},{}]", i + 1, j + 1);
        claims.push(RankClaim::new(format!("rank_Z {tag}"), rank_int(&b), Relation::Equals, n + 1));
        claims.push(RankClaim::new(format!("rank_{p} {tag}"), rank_mod_p(&b, p)?, Relation::AtMost, n));
        claims.push(RankClaim::new(format!("{tag} annihilates C"), usize::from(!annihilates(&b, c)), Relation::Equals, 0));
    }
    Ok(RankReport { modulus: p, crossings: n, claims })
}

/// Sums the columns of regions sharing a color; one column per color in
/// increasing color order.
pub fn merge_columns(m: &IntMatrix, c: &DehnColoring) -> IntMatrix {
    assert_eq!(m.cols(), c.values.len(), "one coloring value per column");
    let colors: BTreeMap<u64, usize> = c.colors_used().into_iter().enumerate().map(|(k, v)| (v, k)).collect();
    let mut rows = vec![vec![BigInt::zero(); colors.len()]; m.rows()];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, &v) in c.values.iter().enumerate() {
            row[colors[&v]] += m.get(i, j);
        }
    }
    IntMatrix::from_big_rows(rows, colors.len())
}

fn star_row(row: &[BigInt]) -> bool {
    let mut nz: Vec<i64> = Vec::new();
    for x in row.iter().filter(|x| !x.is_zero()) {
        match x.to_i64() {
            Some(v) => nz.push(v),
            None => return false,
        }
    }
    nz.sort_unstable();
    STAR_MULTISETS.contains(&nz.as_slice())
}

/// Whether each row's nonzero-entry multiset is admitted by (★).
pub fn check_star(m: &IntMatrix) -> Vec<bool> {
    (0..m.rows()).map(|i| star_row(m.row(i))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub modulus: u64,
    pub variant: Variant,
    pub ell: usize,
    pub merged: IntMatrix,
    pub merged_rank_int: usize,
    pub merged_rank_p: usize,
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub det_value: BigInt,
    /// (★) verdict for each selected row.
    pub star_rows: Vec<bool>,
}

impl Certificate {
    pub fn submatrix(&self) -> IntMatrix {
        self.merged.submatrix(&self.row_indices, &self.col_indices)
    }

    /// `2^(l-1)`.
    pub fn upper_bound(&self) -> BigInt {
        BigInt::from(1) << (self.ell - 1)
    }

    /// Every invariant the certificate is expected to satisfy that does not
    /// hold, described in words. Empty for a sound certificate.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = BigInt::from(self.modulus);
        let abs = self.det_value.abs();
        if self.det_value.is_zero() {
            out.push("det M3 = 0".to_string());
        }
        if !(&self.det_value % &p).is_zero() {
            out.push(format!("{} does not divide det M3 = {}", self.modulus, self.det_value));
        }
        if abs < p {
            out.push(format!("|det M3| = {abs} < p = {}", self.modulus));
        }
        if abs > self.upper_bound() {
            out.push(format!("|det M3| = {abs} > 2^{}", self.ell - 1));
        }
        for (k, ok) in self.star_rows.iter().enumerate() {
            if !ok {
                out.push(format!("row {} of M3 violates (★)", self.row_indices[k]));
            }
        }
        if self.merged_rank_int != self.ell - 1 {
            out.push(format!("rank_Z M2 = {}, expected {}", self.merged_rank_int, self.ell - 1));
        }
        if self.merged_rank_p + 2 > self.ell {
            out.push(format!("rank_{} M2 = {} exceeds {}", self.modulus, self.merged_rank_p, self.ell - 2));
        }
        out
    }

    pub fn is_sound(&self) -> bool {
        self.violations().is_empty()
    }
}

pub fn extract_certificate(d: &Diagram, c: &DehnColoring, p: u64) -> Result<Certificate, CertificateError> {
    check_modulus_matches(c, p)?;
    let aug = augmented_matrix(d, c)?;
    let merged = merge_columns(&aug.matrix, &aug.coloring);
    let ell = merged.cols();
    let k = ell - 1;
    let merged_rank_int = rank_int(&merged);
    let merged_rank_p = rank_mod_p(&merged, p)?;

    for cols in (0..ell).combinations(k) {
        for rows in (0..merged.rows()).combinations(k) {
            let sub = merged.submatrix(&rows, &cols);
            let det = det_int(&sub)?;
            if det.is_zero() {
                continue;
            }
            let star_rows = check_star(&sub);
            return Ok(Certificate {
                modulus: p,
                variant: aug.variant,
                ell,
                merged,
                merged_rank_int,
                merged_rank_p,
                row_indices: rows,
                col_indices: cols,
                det_value: det,
                star_rows,
            });
        }
    }
    Err(CertificateError::ExtractionFailed(k))
}

/// Random order-`k` matrix whose rows satisfy (★), reproducible per seed.
pub fn random_star_matrix(k: usize, seed: u64) -> IntMatrix {
    assert!(k >= 1, "order must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: Vec<&[i64]> = STAR_MULTISETS.iter().copied().filter(|s| s.len() <= k).collect();
    let mut m = IntMatrix::zeros(k, k);
    for i in 0..k {
        let shape = shapes[rng.gen_range(0..shapes.len())];
        let cols = sample(&mut rng, k, shape.len());
        for (col, &v) in cols.iter().zip(shape) {
            m.set(i, col, v);
        }
    }
    m
}

/// Order-`k` diagonal matrix of 2's, which attains `|det| = 2^k`.
pub fn tight_star_matrix(k: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(k, k);
    for i in 0..k {
        m.set(i, i, 2);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderStats {
    pub order: usize,
    pub cases: u64,
    pub max_abs_det: BigInt,
    pub violations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCampaign {
    pub cases: u64,
    pub by_order: Vec<OrderStats>,
}

impl StarCampaign {
    pub fn violation_count(&self) -> usize {
        self.by_order.iter().map(|o| o.violations.len()).sum()
    }
}

/// Checks `|det| <= 2^k` on `cases` random (★)-matrices, cycling the order
/// through `1..=max_order`. Case `i` uses seed `seed + i`.
pub fn star_campaign(cases: u64, max_order: usize, seed: u64) -> StarCampaign {
    let max_order = max_order.max(1);
    let results: Vec<(usize, u64, BigInt)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let k = 1 + (i % max_order as u64) as usize;
            let s = seed.wrapping_add(i);
            let det = det_int(&random_star_matrix(k, s)).expect("square").abs();
            (k, s, det)
        })
        .collect();
    let mut by_order: Vec<OrderStats> = (1..=max_order)
        .map(|order| OrderStats { order, cases: 0, max_abs_det: BigInt::zero(), violations: Vec::new() })
        .collect();
    for (k, s, det) in results {
        let stats = &mut by_order[k - 1];
        stats.cases += 1;
        if det > BigInt::from(1) << k {
            stats.violations.push(s);
        }
        if det > stats.max_abs_det {
            stats.max_abs_det = det;
        }
    }
    StarCampaign { cases, by_order }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{colorings, ColoringKind, DEFAULT_BUDGET};
    use crate::diagram::Diagram;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
    const FIGURE_EIGHT: &str = "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]";

    fn nontrivial(d: &Diagram, p: u64, colors: usize) -> DehnColoring {
        colorings(d, p, DEFAULT_BUDGET)
            .unwrap()
            .colorings
            .unwrap()
            .into_iter()
            .find(|c| !c.is_trivial(d) && c.color_count() == colors)
            .unwrap()
    }

    #[test]
    fn star_examples() {
        assert_eq!(check_star(&IntMatrix::from_rows(&[[1, -1, 1, -1]])), vec![true]);
        assert_eq!(check_star(&IntMatrix::from_rows(&[[2, 1, 0]])), vec![false]);
        assert_eq!(check_star(&IntMatrix::from_rows(&[[1, 0, 0]])), vec![true]);
        assert_eq!(check_star(&IntMatrix::from_rows(&[[0, 0, 0]])), vec![false]);
        assert_eq!(check_star(&IntMatrix::from_rows(&[[2, 2]])), vec![false]);
        assert_eq!(check_star(&IntMatrix::from_rows(&[[-1, 2, -1]])), vec![true]);
    }

    #[test]
    fn merge_examples() {
        let row = IntMatrix::from_rows(&[[1, -1, 1, -1]]);
        let c = DehnColoring { modulus: 3, values: vec![0, 1, 0, 2] };
        assert_eq!(merge_columns(&row, &c).to_i64_rows(), vec![vec![2, -1, -1]]);

        let row = IntMatrix::from_rows(&[[1, 0, -1, 0]]);
        let c = DehnColoring { modulus: 3, values: vec![2, 0, 2, 1] };
        assert_eq!(merge_columns(&row, &c).to_i64_rows(), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn trefoil_certificate() {
        let d = Diagram::from_pd_text(TREFOIL).unwrap();
        let c = nontrivial(&d, 3, 3);
        let aug = augmented_matrix(&d, &c).unwrap();
        assert_eq!((aug.matrix.rows(), aug.matrix.cols()), (4, 5));
        let merged = merge_columns(&aug.matrix, &aug.coloring);
        assert_eq!((merged.rows(), merged.cols()), (4, 3));

        let report = rank_checks(&d, &c, 3).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert_eq!(report.claims[0].observed, 3);
        assert_eq!(report.claims[1].observed, 2);

        let cert = extract_certificate(&d, &c, 3).unwrap();
        assert_eq!(cert.ell, 3);
        assert_eq!(cert.det_value.abs(), BigInt::from(3));
        assert!(cert.is_sound(), "{:?}", cert.violations());
    }

    #[test]
    fn figure_eight_certificate() {
        let d = Diagram::from_pd_text(FIGURE_EIGHT).unwrap();
        let c = nontrivial(&d, 5, 4);
        let aug = augmented_matrix(&d, &c).unwrap();
        assert_eq!((aug.matrix.rows(), aug.matrix.cols()), (5, 6));
        let report = rank_checks(&d, &c, 5).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert_eq!(report.claims[0].observed, 4);
        assert_eq!(report.claims[2].observed, 5);
        let cert = extract_certificate(&d, &c, 5).unwrap();
        assert_eq!(cert.ell, 4);
        assert_eq!(cert.det_value.abs(), BigInt::from(5));
        assert!(cert.is_sound(), "{:?}", cert.violations());
    }

    #[test]
    fn variant_shapes() {
        for (text, p) in [(TREFOIL, 3), (FIGURE_EIGHT, 5)] {
            let d = Diagram::from_pd_text(text).unwrap();
            let space = colorings(&d, p, DEFAULT_BUDGET).unwrap();
            for c in space.colorings.unwrap().iter().filter(|c| !c.is_trivial(&d)) {
                let aug = augmented_matrix(&d, c).unwrap();
                let merged = merge_columns(&aug.matrix, &aug.coloring);
                let last = merged.rows() - 1;
                let extra = &check_star(&merged.submatrix(&[last], &(0..merged.cols()).collect::<Vec<_>>()))[0];
                match aug.variant {
                    Variant::A => {
                        assert_eq!(aug.coloring.values[0], 0);
                        assert!(*extra);
                        let nz = merged.row(last).iter().filter(|x| !x.is_zero()).count();
                        assert_eq!(nz, 1);
                    }
                    Variant::B { i, j } => {
                        assert!(i < j);
                        assert!(merged.row(last).iter().all(|x| x.is_zero()));
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_coloring_rejected() {
        let d = Diagram::from_pd_text(TREFOIL).unwrap();
        let c = DehnColoring::constant(&d, 3, 1);
        assert_eq!(augmented_matrix(&d, &c), Err(CertificateError::TrivialColoring));
        assert_eq!(extract_certificate(&d, &c, 3).unwrap_err(), CertificateError::TrivialColoring);
        let cb = checkerboard_coloring(&d, 3).unwrap();
        assert_eq!(crate::coloring::classify(&d, &cb).unwrap().kind, ColoringKind::TwoTrivial);
        assert_eq!(extract_certificate(&d, &cb, 3).unwrap_err(), CertificateError::TrivialColoring);
    }

    #[test]
    fn random_star_matrices() {
        for k in 1..=8 {
            for seed in 0..200 {
                let m = random_star_matrix(k, seed);
                assert!(check_star(&m).into_iter().all(|b| b));
                assert_eq!(m, random_star_matrix(k, seed));
            }
        }
        for seed in 0..200 {
            let m = random_star_matrix(1, seed);
            let v = m.get(0, 0).to_i64().unwrap();
            assert!([-2, -1, 1, 2].contains(&v));
        }
    }

    #[test]
    fn small_campaign() {
        let campaign = star_campaign(10_000, 5, 0);
        assert_eq!(campaign.violation_count(), 0);
        assert_eq!(campaign.by_order.iter().map(|o| o.cases).sum::<u64>(), 10_000);
        for k in 1..=10 {
            let m = tight_star_matrix(k);
            assert!(check_star(&m).into_iter().all(|b| b));
            assert_eq!(det_int(&m).unwrap(), BigInt::from(1) << k);
        }
    }
}
