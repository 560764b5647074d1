//! Dehn colorings of knot diagrams.
//!
//! A Dehn p-coloring assigns a residue to every region so that at each
//! crossing the two regions on one side of the under-strand sum to the two on
//! the other side. The solutions form the mod-p nullspace of the coloring
//! matrix, which always contains the constant and checkerboard colorings.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{checkerboard, Diagram, DiagramError};
use crate::exactalg::{
    check_modulus, nullspace_mod_p, rank_mod_p, residue, smith_invariant_factors, AlgebraError,
    IntMatrix, ModVector,
};

/// Enumeration budget used when none is configured.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("not a coloring: crossing {crossing} violates the coloring relation")]
    NotAColoring { crossing: usize },
    #[error("not a coloring: expected {expected} region values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("not a regular transformation: scale {0} is not invertible")]
    NotRegular(i64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DehnColoring {
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl DehnColoring {
    pub fn new(modulus: u64, values: Vec<i64>) -> Self {
        Self { modulus, values: values.into_iter().map(|v| residue(v, modulus)).collect() }
    }

    pub fn constant(d: &Diagram, modulus: u64, t: u64) -> Self {
        Self { modulus, values: vec![t % modulus; d.region_count()] }
    }

    pub fn colors_used(&self) -> BTreeSet<u64> {
        self.values.iter().copied().collect()
    }

    pub fn color_count(&self) -> usize {
        self.colors_used().len()
    }

    /// Index of the first crossing whose relation fails, if any.
    pub fn first_violation(&self, d: &Diagram) -> Option<usize> {
        let p = self.modulus;
        d.crossings().iter().position(|x| {
            let ([a, b], [c, e]) = x.sides();
            (self.values[a] + self.values[b]) % p != (self.values[c] + self.values[e]) % p
        })
    }

    pub fn validate(&self, d: &Diagram) -> Result<(), ColoringError> {
        if self.values.len() != d.region_count() {
            return Err(ColoringError::WrongLength { expected: d.region_count(), got: self.values.len() });
        }
        match self.first_violation(d) {
            Some(crossing) => Err(ColoringError::NotAColoring { crossing }),
            None => Ok(()),
        }
    }

    /// True when every crossing is trivially colored.
    pub fn is_trivial(&self, d: &Diagram) -> bool {
        d.crossings().iter().all(|x| {
            let [q12, _, q34, _] = x.quadrants;
            self.values[q12] == self.values[q34]
        })
    }
}

/// The n x (n+2) Dehn coloring matrix: +1 on the two quadrants on one side of
/// each under-strand, -1 on the other two, summed where quadrants coincide.
pub fn coloring_matrix(d: &Diagram) -> IntMatrix {
    let mut m = IntMatrix::zeros(d.crossing_count(), d.region_count());
    for (i, x) in d.crossings().iter().enumerate() {
        let (plus, minus) = x.sides();
        for r in plus {
            m.add_to(i, r, 1);
        }
        for r in minus {
            m.add_to(i, r, -1);
        }
    }
    m
}

/// The coloring matrix with the extra row `e_1` appended: the Alexander
/// matrix of the knot group evaluated at t = -1.
pub fn alexander_at_minus_one(d: &Diagram) -> IntMatrix {
    let mut m = coloring_matrix(d);
    let mut e1 = vec![0i64; d.region_count()];
    e1[0] = 1;
    m.push_row(&e1);
    m
}

/// Gcd of the maximal minors of [`alexander_at_minus_one`].
pub fn knot_determinant(d: &Diagram) -> BigInt {
    let a = alexander_at_minus_one(d);
    smith_invariant_factors(&a).iter().fold(BigInt::one(), |acc, f| acc * f).abs()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringSpace {
    pub modulus: u64,
    pub basis: Vec<ModVector>,
    pub dimension: usize,
    pub count: BigUint,
    /// All colorings in lexicographic order, present when `count` fits the
    /// budget.
    pub colorings: Option<Vec<DehnColoring>>,
}

fn combine(basis: &[ModVector], coeffs: &[u64], p: u64, out: &mut [u64]) {
    out.iter_mut().for_each(|x| *x = 0);
    for (v, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, &e) in out.iter_mut().zip(&v.entries) {
            *o = (*o + c * e) % p;
        }
    }
}

/// Advances a base-`p` counter; returns false after the last value.
fn increment(coeffs: &mut [u64], p: u64) -> bool {
    for c in coeffs.iter_mut().rev() {
        *c += 1;
        if *c < p {
            return true;
        }
        *c = 0;
    }
    false
}

fn count_within(p: u64, dimension: usize, budget: u64) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..dimension {
        total = total.checked_mul(p)?;
        if total > budget {
            return None;
        }
    }
    Some(total)
}

pub fn colorings(d: &Diagram, p: u64, budget: u64) -> Result<ColoringSpace, ColoringError> {
    check_modulus(p)?;
    let basis = nullspace_mod_p(&coloring_matrix(d), p)?;
    let dimension = basis.len();
    let count = BigUint::from(p).pow(dimension as u32);
    let colorings = count_within(p, dimension, budget).map(|_| {
        let mut all: Vec<DehnColoring> = (0..p)
            .into_par_iter()
            .flat_map_iter(|lead| {
                let mut coeffs = vec![0u64; dimension];
                let mut out = Vec::new();
                if dimension == 0 {
                    if lead == 0 {
                        out.push(DehnColoring { modulus: p, values: vec![0; d.region_count()] });
                    }
                    return out;
                }
                coeffs[0] = lead;
                let mut values = vec![0u64; d.region_count()];
                loop {
                    combine(&basis, &coeffs, p, &mut values);
                    out.push(DehnColoring { modulus: p, values: values.clone() });
                    if !increment(&mut coeffs[1..], p) {
                        break;
                    }
                }
                out
            })
            .collect();
        all.sort();
        all
    });
    Ok(ColoringSpace { modulus: p, basis, dimension, count, colorings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringKind {
    OneTrivial,
    TwoTrivial,
    Nontrivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringClass {
    pub kind: ColoringKind,
    pub colors_used: BTreeSet<u64>,
}

pub fn classify(d: &Diagram, c: &DehnColoring) -> Result<ColoringClass, ColoringError> {
    c.validate(d)?;
    let colors_used = c.colors_used();
    let kind = if colors_used.len() == 1 {
        ColoringKind::OneTrivial
    } else if c.is_trivial(d) {
        // trivial at every crossing forces the checkerboard pattern
        debug_assert_eq!(colors_used.len(), 2);
        ColoringKind::TwoTrivial
    } else {
        ColoringKind::Nontrivial
    };
    Ok(ColoringClass { kind, colors_used })
}

/// Region-wise `s*C + t`.
pub fn affine_transform(c: &DehnColoring, s: i64, t: i64) -> Result<DehnColoring, ColoringError> {
    let p = c.modulus;
    let scale = residue(s, p);
    if scale == 0 {
        return Err(ColoringError::NotRegular(s));
    }
    let s = scale;
    let t = residue(t, p);
    Ok(DehnColoring { modulus: p, values: c.values.iter().map(|&v| (s * v + t) % p).collect() })
}

/// `floor(log2 p) + 2`, the least number of colors any nontrivial Dehn
/// p-coloring can use.
pub fn lower_bound(p: u64) -> usize {
    (63 - p.leading_zeros() as usize) + 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinColors {
    pub modulus: u64,
    /// `None` when the diagram has no nontrivial coloring.
    pub min: Option<usize>,
    pub witness: Option<DehnColoring>,
    pub lower_bound: usize,
    /// True when every coloring was examined, false when only affine class
    /// representatives were.
    pub exhaustive: bool,
    pub examined: u64,
}

type Best = Option<(usize, Vec<u64>)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if (y.0, &y.1) < (x.0, &x.1) { y } else { x }),
    }
}

fn distinct_count(values: &[u64], seen: &mut [bool]) -> usize {
    seen.iter_mut().for_each(|s| *s = false);
    let mut k = 0;
    for &v in values {
        if !seen[v as usize] {
            seen[v as usize] = true;
            k += 1;
        }
    }
    k
}

pub fn min_colors_diagram(d: &Diagram, p: u64, budget: u64) -> Result<MinColors, ColoringError> {
    check_modulus(p)?;
    let m = coloring_matrix(d);
    let dimension = m.cols() - rank_mod_p(&m, p)?;
    let lower = lower_bound(p);
    if dimension <= 2 {
        return Ok(MinColors { modulus: p, min: None, witness: None, lower_bound: lower, exhaustive: true, examined: 0 });
    }
    let regions = d.region_count();
    let probe = |basis: &[ModVector], coeffs: &[u64], values: &mut Vec<u64>, seen: &mut Vec<bool>| -> Best {
        combine(basis, coeffs, p, values);
        let c = DehnColoring { modulus: p, values: std::mem::take(values) };
        let result = if c.is_trivial(d) { None } else { Some((distinct_count(&c.values, seen), c.values.clone())) };
        *values = c.values;
        result
    };

    let (best, exhaustive, examined) = if let Some(total) = count_within(p, dimension, budget) {
        let basis = nullspace_mod_p(&m, p)?;
        let best = (0..p)
            .into_par_iter()
            .map(|lead| {
                let mut coeffs = vec![0u64; dimension];
                coeffs[0] = lead;
                let mut values = vec![0u64; regions];
                let mut seen = vec![false; p as usize];
                let mut best: Best = None;
                loop {
                    best = better(best, probe(&basis, &coeffs, &mut values, &mut seen));
                    if !increment(&mut coeffs[1..], p) {
                        break;
                    }
                }
                best
            })
            .reduce(|| None, better);
        (best, true, total)
    } else {
        // Affine quotient: region 0 fixed to 0, first nonzero coefficient 1.
        let basis = nullspace_mod_p(&alexander_at_minus_one(d), p)?;
        let k = basis.len();
        let best = (0..k)
            .into_par_iter()
            .map(|lead| {
                let mut coeffs = vec![0u64; k];
                coeffs[lead] = 1;
                let mut values = vec![0u64; regions];
                let mut seen = vec![false; p as usize];
                let mut best: Best = None;
                loop {
                    best = better(best, probe(&basis, &coeffs, &mut values, &mut seen));
                    if !increment(&mut coeffs[lead + 1..], p) {
                        break;
                    }
                }
                best
            })
            .reduce(|| None, better);
        let reps = (0..k).map(|lead| (p as u128).pow((k - 1 - lead) as u32)).sum::<u128>();
        (best, false, reps.min(u64::MAX as u128) as u64)
    };

    Ok(MinColors {
        modulus: p,
        min: best.as_ref().map(|b| b.0),
        witness: best.map(|b| DehnColoring { modulus: p, values: b.1 }),
        lower_bound: lower,
        exhaustive,
        examined,
    })
}

/// A Fox coloring, indexed by arc.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoxColoring {
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl FoxColoring {
    pub fn is_valid(&self, d: &Diagram) -> bool {
        let p = self.modulus;
        (0..d.crossing_count()).all(|x| {
            let (u, v) = d.under_arcs(x);
            let w = d.over_arc(x);
            (self.values[u] + self.values[v]) % p == 2 * self.values[w] % p
        })
    }
}

/// Each arc receives the sum of the two region colors beside it.
pub fn fox_from_dehn(d: &Diagram, c: &DehnColoring) -> Result<FoxColoring, ColoringError> {
    c.validate(d)?;
    let p = c.modulus;
    let mut values: Vec<Option<u64>> = vec![None; d.arcs().len()];
    for s in 0..d.semiarc_count() {
        let [a, b] = d.semiarc_regions(s);
        let sum = (c.values[a] + c.values[b]) % p;
        let slot = &mut values[d.arc_of(s)];
        match slot {
            None => *slot = Some(sum),
            Some(prev) => assert_eq!(*prev, sum, "arc sum varies along arc {}", d.arc_of(s)),
        }
    }
    Ok(FoxColoring { modulus: p, values: values.into_iter().map(|v| v.expect("every arc has a semiarc")).collect() })
}

/// Fox relations `u + u' - 2w` per crossing, one column per arc.
pub fn fox_matrix(d: &Diagram) -> IntMatrix {
    let mut m = IntMatrix::zeros(d.crossing_count(), d.arcs().len());
    for x in 0..d.crossing_count() {
        let (u, v) = d.under_arcs(x);
        m.add_to(x, u, 1);
        m.add_to(x, v, 1);
        m.add_to(x, d.over_arc(x), -2);
    }
    m
}

/// Number of Fox p-colorings, from the nullity of [`fox_matrix`].
pub fn fox_coloring_count(d: &Diagram, p: u64) -> Result<BigUint, ColoringError> {
    let m = fox_matrix(d);
    let nullity = m.cols() - rank_mod_p(&m, p)?;
    Ok(BigUint::from(p).pow(nullity as u32))
}

/// The checkerboard shading read as a coloring with colors {0, 1}.
pub fn checkerboard_coloring(d: &Diagram, p: u64) -> Result<DehnColoring, ColoringError> {
    let cb = checkerboard(d)?;
    Ok(DehnColoring { modulus: p, values: cb.shading.iter().map(|&s| s as u64).collect() })
}

impl ColoringSpace {
    pub fn is_colorable(&self) -> bool {
        self.dimension >= 3
    }
}
