//! Knot diagrams from PD codes.
//!
//! A PD code lists each crossing as the four semiarc labels met when walking
//! counterclockwise around it, starting at the incoming under-strand, so the
//! under-strand sits at positions 1 and 3 and the over-strand at 2 and 4.
//! Regions are the orbits of the corner permutation of the underlying
//! 4-valent plane graph.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid PD code: {0}")]
    InvalidPd(String),
    #[error("non-planar or corrupt PD code: {0}")]
    NonPlanar(String),
    #[error("links with {0} components are not supported; expected a knot")]
    MultiComponent(usize),
    #[error("diagram not checkerboard-colorable")]
    NotCheckerboard,
}

/// Validated PD code: every semiarc label occurs exactly twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PdCode {
    crossings: Vec<[i64; 4]>,
}

impl PdCode {
    pub fn new(crossings: Vec<[i64; 4]>) -> Result<Self, DiagramError> {
        if crossings.is_empty() {
            return Err(DiagramError::InvalidPd("no crossings".into()));
        }
        let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
        for x in &crossings {
            for &s in x {
                *seen.entry(s).or_default() += 1;
            }
        }
        if let Some((s, k)) = seen.iter().find(|(_, &k)| k != 2) {
            return Err(DiagramError::InvalidPd(format!("semiarc {s} appears {k} times")));
        }
        Ok(Self { crossings })
    }

    pub fn crossings(&self) -> &[[i64; 4]] {
        &self.crossings
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.crossings.iter().map(|[a, b, c, d]| format!("X[{a},{b},{c},{d}]")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for PdCode {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

fn quad(v: &[i64]) -> Result<[i64; 4], DiagramError> {
    <[i64; 4]>::try_from(v)
        .map_err(|_| DiagramError::Parse(format!("crossing {v:?} has {} entries, expected 4", v.len())))
}

/// Parses `X[a,b,c,d] X[...] ...` (optionally wrapped in `PD[...]`) or a JSON
/// array of 4-element integer arrays.
pub fn parse_pd(text: &str) -> Result<PdCode, DiagramError> {
    let text = text.trim();
    if text.starts_with('[') {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(text).map_err(|e| DiagramError::Parse(e.to_string()))?;
        let crossings = rows.iter().map(|r| quad(r)).collect::<Result<Vec<_>, _>>()?;
        return PdCode::new(crossings);
    }

    let mut body = text;
    if let Some(rest) = body.strip_prefix("PD[") {
        body = rest.strip_suffix(']').ok_or_else(|| DiagramError::Parse("unterminated PD[".into()))?;
    }
    let mut crossings = Vec::new();
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        let after_x = rest
            .strip_prefix('X')
            .ok_or_else(|| DiagramError::Parse(format!("expected X[...] at {:?}", truncate(rest))))?
            .trim_start();
        let inner = after_x
            .strip_prefix('[')
            .ok_or_else(|| DiagramError::Parse("expected '[' after X".into()))?;
        let close = inner.find(']').ok_or_else(|| DiagramError::Parse("unterminated X[".into()))?;
        let nums = inner[..close]
            .split(',')
            .map(|t| {
                t.trim().parse::<i64>().map_err(|_| DiagramError::Parse(format!("bad semiarc label {:?}", t.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        crossings.push(quad(&nums)?);
        rest = inner[close + 1..].trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    PdCode::new(crossings)
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(16) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// One side of a semiarc, as seen from a region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub semiarc: usize,
    pub side: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    /// Semiarc indices at PD positions 1..4.
    pub semiarcs: [usize; 4],
    /// Regions in the quadrants between positions (1,2), (2,3), (3,4), (4,1).
    pub quadrants: [usize; 4],
}

impl Crossing {
    /// The two regions on the over-strand-2 side of the under-strand, then the
    /// two on the other side.
    pub fn sides(&self) -> ([usize; 2], [usize; 2]) {
        let [q12, q23, q34, q41] = self.quadrants;
        ([q12, q23], [q34, q41])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pd: PdCode,
    semiarc_labels: Vec<i64>,
    crossings: Vec<Crossing>,
    regions: Vec<Vec<Slot>>,
    /// Region on side 0 and side 1 of each semiarc.
    semiarc_regions: Vec<[usize; 2]>,
    arcs: Vec<Vec<usize>>,
    semiarc_arc: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

pub fn build_diagram(pd: &PdCode) -> Result<Diagram, DiagramError> {
    let n = pd.len();
    let mut labels: Vec<i64> = pd.crossings.iter().flatten().copied().collect();
    labels.sort_unstable();
    labels.dedup();
    let index_of: BTreeMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let semiarcs: Vec<[usize; 4]> =
        pd.crossings.iter().map(|x| x.map(|l| index_of[&l])).collect();

    // occurrences[s] = the two (crossing, position) pairs, in reading order
    let mut occurrences = vec![Vec::with_capacity(2); labels.len()];
    for (x, q) in semiarcs.iter().enumerate() {
        for (pos, &s) in q.iter().enumerate() {
            occurrences[s].push((x, pos));
        }
    }

    let mut strands = UnionFind::new(labels.len());
    for q in &semiarcs {
        strands.union(q[0], q[2]);
        strands.union(q[1], q[3]);
    }
    let components = (0..labels.len()).filter(|&s| strands.find(s) == s).count();
    if components != 1 {
        return Err(DiagramError::MultiComponent(components));
    }

    // corner 4x+i lies between positions i and i+1 of crossing x
    let corners = 4 * n;
    let mut next = vec![0usize; corners];
    let mut step_slot = vec![Slot { semiarc: 0, side: 0 }; corners];
    for x in 0..n {
        for i in 0..4 {
            let pos = (i + 1) % 4;
            let s = semiarcs[x][pos];
            let occ = &occurrences[s];
            let (other, side) = if occ[0] == (x, pos) { (occ[1], 1) } else { (occ[0], 0) };
            next[4 * x + i] = 4 * other.0 + other.1;
            step_slot[4 * x + i] = Slot { semiarc: s, side };
        }
    }

    let mut region_of_corner = vec![usize::MAX; corners];
    let mut faces: Vec<(Vec<usize>, Vec<Slot>)> = Vec::new();
    for start in 0..corners {
        if region_of_corner[start] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut slots = Vec::new();
        let mut c = start;
        loop {
            if region_of_corner[c] != usize::MAX {
                if c == start {
                    break;
                }
                return Err(DiagramError::NonPlanar("face traversal did not close".into()));
            }
            region_of_corner[c] = faces.len();
            cycle.push(c);
            slots.push(step_slot[c]);
            c = next[c];
        }
        faces.push((cycle, slots));
    }
    if faces.len() != n + 2 {
        return Err(DiagramError::NonPlanar(format!(
            "{} faces for {n} crossings, expected {}",
            faces.len(),
            n + 2
        )));
    }

    // order regions by their smallest slot
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&f| faces[f].1.iter().min().copied());
    let mut rank = vec![0usize; faces.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut regions = vec![Vec::new(); faces.len()];
    for (old, (cycle, slots)) in faces.into_iter().enumerate() {
        for c in cycle {
            region_of_corner[c] = rank[old];
        }
        regions[rank[old]] = slots;
    }

    let crossings: Vec<Crossing> = (0..n)
        .map(|x| Crossing {
            semiarcs: semiarcs[x],
            quadrants: [0, 1, 2, 3].map(|i| region_of_corner[4 * x + i]),
        })
        .collect();

    let semiarc_regions: Vec<[usize; 2]> = occurrences
        .iter()
        .map(|occ| {
            let (x, pos) = occ[0];
            [region_of_corner[4 * x + pos], region_of_corner[4 * x + (pos + 3) % 4]]
        })
        .collect();
    if let Some(s) = semiarc_regions.iter().position(|[a, b]| a == b) {
        return Err(DiagramError::NonPlanar(format!("semiarc {} has one region on both sides", labels[s])));
    }

    let mut over = UnionFind::new(labels.len());
    for q in &semiarcs {
        over.union(q[1], q[3]);
    }
    let mut arc_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut arcs: Vec<Vec<usize>> = Vec::new();
    let mut semiarc_arc = vec![0usize; labels.len()];
    for s in 0..labels.len() {
        let root = over.find(s);
        let a = *arc_index.entry(root).or_insert_with(|| {
            arcs.push(Vec::new());
            arcs.len() - 1
        });
        arcs[a].push(s);
        semiarc_arc[s] = a;
    }

    Ok(Diagram {
        pd: pd.clone(),
        semiarc_labels: labels,
        crossings,
        regions,
        semiarc_regions,
        arcs,
        semiarc_arc,
    })
}

impl Diagram {
    pub fn from_pd_text(text: &str) -> Result<Self, DiagramError> {
        build_diagram(&parse_pd(text)?)
    }

    pub fn pd(&self) -> &PdCode {
        &self.pd
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn semiarc_count(&self) -> usize {
        self.semiarc_labels.len()
    }

    pub fn semiarc_label(&self, s: usize) -> i64 {
        self.semiarc_labels[s]
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Boundary of each region as the slots met along its face cycle.
    pub fn regions(&self) -> &[Vec<Slot>] {
        &self.regions
    }

    pub fn semiarc_regions(&self, s: usize) -> [usize; 2] {
        self.semiarc_regions[s]
    }

    pub fn arcs(&self) -> &[Vec<usize>] {
        &self.arcs
    }

    pub fn arc_of(&self, semiarc: usize) -> usize {
        self.semiarc_arc[semiarc]
    }

    /// Arcs ending at crossing `x` from below (positions 1 and 3).
    pub fn under_arcs(&self, x: usize) -> (usize, usize) {
        let s = self.crossings[x].semiarcs;
        (self.semiarc_arc[s[0]], self.semiarc_arc[s[2]])
    }

    pub fn over_arc(&self, x: usize) -> usize {
        self.semiarc_arc[self.crossings[x].semiarcs[1]]
    }
}

/// Proper two-shading of the regions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkerboard {
    pub shading: Vec<u8>,
}

pub fn checkerboard(d: &Diagram) -> Result<Checkerboard, DiagramError> {
    let r = d.region_count();
    let mut adjacency = vec![Vec::new(); r];
    for &[a, b] in &d.semiarc_regions {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut shade: Vec<Option<u8>> = vec![None; r];
    let mut queue = VecDeque::new();
    for start in 0..r {
        if shade[start].is_some() {
            continue;
        }
        shade[start] = Some(0);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let su = shade[u].unwrap();
            for &v in &adjacency[u] {
                match shade[v] {
                    None => {
                        shade[v] = Some(1 - su);
                        queue.push_back(v);
                    }
                    Some(sv) if sv == su => return Err(DiagramError::NotCheckerboard),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(Checkerboard { shading: shade.into_iter().map(Option::unwrap).collect() })
}
