//! R-palette graphs.
//!
//! The vertices of `G_S` are the sums `a1 + a2` of two (not necessarily
//! distinct) colors of `S`. Two distinct sums `b1`, `b2` are joined when some
//! representing pairs could meet as the under-arcs of a colored crossing, and
//! the edge carries the over-arc sum `(b1 + b2) / 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coloring::{fox_from_dehn, ColoringError, DehnColoring};
use crate::diagram::Diagram;
use crate::exactalg::{check_modulus, inv_mod_p, AlgebraError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaletteError {
    #[error("color set is empty")]
    EmptySet,
    #[error("color {color} is not a residue mod {modulus}")]
    OutOfRange { color: u64, modulus: u64 },
    #[error("not a full palette graph: edge {u}-{v} has label {label} outside the vertex set")]
    NotFull { u: u64, v: u64, label: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaletteGraph {
    pub modulus: u64,
    pub vertices: BTreeSet<u64>,
    /// Keyed by `(u, v)` with `u < v`; the value is the edge label.
    pub edges: BTreeMap<(u64, u64), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: u64,
    pub v: u64,
    pub label: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteJson {
    pub p: u64,
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeJson>,
}

fn half(p: u64) -> u64 {
    inv_mod_p(2, p).expect("p is odd")
}

impl PaletteGraph {
    fn empty(modulus: u64) -> Self {
        Self { modulus, vertices: BTreeSet::new(), edges: BTreeMap::new() }
    }

    fn add_edge(&mut self, b1: u64, b2: u64, label: u64) {
        debug_assert_ne!(b1, b2);
        self.edges.insert((b1.min(b2), b1.max(b2)), label);
    }

    pub fn label(&self, u: u64, v: u64) -> Option<u64> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn to_json(&self) -> PaletteJson {
        PaletteJson {
            p: self.modulus,
            vertices: self.vertices.iter().copied().collect(),
            edges: self.edges.iter().map(|(&(u, v), &label)| EdgeJson { u, v, label }).collect(),
        }
    }

    pub fn from_json(j: &PaletteJson) -> Self {
        let mut g = Self::empty(j.p);
        g.vertices.extend(j.vertices.iter().copied());
        for e in &j.edges {
            g.add_edge(e.u, e.v, e.label);
        }
        g
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  {v};");
        }
        for (&(u, v), label) in &self.edges {
            let _ = writeln!(out, "  {u} -- {v} [label=\"{label}\"];");
        }
        out.push_str("}\n");
        out
    }

    /// The whole graph as an [`RSubgraph`] of itself.
    pub fn as_subgraph(&self) -> RSubgraph {
        RSubgraph { vertices: self.vertices.clone(), edges: self.edges.keys().copied().collect() }
    }
}

pub fn palette_graph(set: &BTreeSet<u64>, p: u64) -> Result<PaletteGraph, PaletteError> {
    check_modulus(p)?;
    if set.is_empty() {
        return Err(PaletteError::EmptySet);
    }
    if let Some(&color) = set.iter().find(|&&a| a >= p) {
        return Err(PaletteError::OutOfRange { color, modulus: p });
    }
    let colors: Vec<u64> = set.iter().copied().collect();
    let mut g = PaletteGraph::empty(p);
    let pairs: Vec<(u64, u64)> =
        colors.iter().flat_map(|&a| colors.iter().map(move |&b| (a, b))).collect();
    for &(a1, a2) in &pairs {
        g.vertices.insert((a1 + a2) % p);
    }
    for &(a1, a2) in &pairs {
        for &(a3, a4) in &pairs {
            let (b1, b2) = ((a1 + a2) % p, (a3 + a4) % p);
            // pairs are ordered, so this also covers a1 + a4 = a2 + a3
            if b1 != b2 && (a1 + a3) % p == (a2 + a4) % p {
                g.add_edge(b1, b2, (a1 + a3) % p);
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RSubgraph {
    pub vertices: BTreeSet<u64>,
    pub edges: BTreeSet<(u64, u64)>,
}

pub fn is_r_subgraph(h: &RSubgraph, g: &PaletteGraph) -> bool {
    h.vertices.is_subset(&g.vertices)
        && h.edges.iter().all(|&(u, v)| {
            h.vertices.contains(&u)
                && h.vertices.contains(&v)
                && g.label(u, v).is_some_and(|label| h.vertices.contains(&label))
        })
}

fn components(vertices: &BTreeSet<u64>, edges: &BTreeSet<(u64, u64)>) -> BTreeMap<u64, u64> {
    // component id = smallest vertex in the component
    let mut comp: BTreeMap<u64, u64> = vertices.iter().map(|&v| (v, v)).collect();
    loop {
        let mut changed = false;
        for &(u, v) in edges {
            let m = comp[&u].min(comp[&v]);
            for w in [u, v] {
                if comp[&w] != m {
                    comp.insert(w, m);
                    changed = true;
                }
            }
        }
        if !changed {
            return comp;
        }
    }
}

fn check_full(g: &PaletteGraph) -> Result<(), PaletteError> {
    match g.edges.iter().find(|(_, label)| !g.vertices.contains(label)) {
        Some((&(u, v), &label)) => Err(PaletteError::NotFull { u, v, label }),
        None => Ok(()),
    }
}

/// Greatest fixpoint of deleting every edge whose label lies in a different
/// component than the edge. Every connected R-subgraph of `g` survives, and
/// each surviving component is itself an R-subgraph.
pub fn r_fixpoint(g: &PaletteGraph) -> Result<RSubgraph, PaletteError> {
    check_full(g)?;
    let mut edges: BTreeSet<(u64, u64)> = g.edges.keys().copied().collect();
    loop {
        let comp = components(&g.vertices, &edges);
        let before = edges.len();
        edges.retain(|&(u, v)| comp[&g.label(u, v).unwrap()] == comp[&u]);
        if edges.len() == before {
            return Ok(RSubgraph { vertices: g.vertices.clone(), edges });
        }
    }
}

/// Vertex set of a connected R-subgraph with at least three vertices, or
/// `None` if `g` has none. Among candidates, the component holding the
/// smallest vertex is returned.
pub fn connected_r_witness(g: &PaletteGraph) -> Result<Option<BTreeSet<u64>>, PaletteError> {
    let fixed = r_fixpoint(g)?;
    let comp = components(&fixed.vertices, &fixed.edges);
    let mut groups: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for (&v, &c) in &comp {
        groups.entry(c).or_default().insert(v);
    }
    Ok(groups.into_values().find(|vs| vs.len() >= 3))
}

/// The witness as a subgraph: its vertices and every edge of `g` inside it.
pub fn witness_subgraph(g: &PaletteGraph, vertices: &BTreeSet<u64>) -> RSubgraph {
    let edges = g
        .edges
        .iter()
        .filter(|(&(u, v), label)| vertices.contains(&u) && vertices.contains(&v) && vertices.contains(label))
        .map(|(&e, _)| e)
        .collect();
    RSubgraph { vertices: vertices.clone(), edges }
}

/// Palette graph of a colored diagram: arc color classes as vertices, one
/// edge per crossing whose under-arcs have different classes.
pub fn palette_graph_of_diagram(d: &Diagram, c: &DehnColoring) -> Result<PaletteGraph, PaletteError> {
    let p = c.modulus;
    check_modulus(p)?;
    let fox = fox_from_dehn(d, c)?;
    let inv2 = half(p);
    let mut g = PaletteGraph::empty(p);
    g.vertices.extend(fox.values.iter().copied());
    for x in 0..d.crossing_count() {
        let (u, v) = d.under_arcs(x);
        let (b1, b2) = (fox.values[u], fox.values[v]);
        if b1 != b2 {
            g.add_edge(b1, b2, (b1 + b2) % p * inv2 % p);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{colorings, DEFAULT_BUDGET};

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn two_colors_mod_5() {
        let g = palette_graph(&set(&[0, 1]), 5).unwrap();
        assert_eq!(g.vertices, set(&[0, 1, 2]));
        assert_eq!(g.edges, BTreeMap::from([((0, 2), 1)]));
        assert_eq!(connected_r_witness(&g).unwrap(), None);
    }

    #[test]
    fn example_mod_7() {
        let bad = palette_graph(&set(&[0, 1, 2, 3]), 7).unwrap();
        assert_eq!(connected_r_witness(&bad).unwrap(), None);
        let good = palette_graph(&set(&[0, 1, 2, 4]), 7).unwrap();
        let w = connected_r_witness(&good).unwrap().unwrap();
        assert!(w.len() >= 3);
        assert!(is_r_subgraph(&witness_subgraph(&good, &w), &good));
        // the whole graph is connected and already an R-subgraph
        assert_eq!(w, good.vertices);
        assert!(is_r_subgraph(&good.as_subgraph(), &good));
    }

    #[test]
    fn labels_are_vertices() {
        for p in [3u64, 5, 7, 11] {
            for mask in 1u32..(1 << p.min(7)) {
                let s: BTreeSet<u64> = (0..p.min(7)).filter(|&i| mask >> i & 1 == 1).collect();
                let g = palette_graph(&s, p).unwrap();
                for (&(u, v), &label) in &g.edges {
                    assert!(u < v);
                    assert!(g.vertices.contains(&label));
                    assert_eq!(2 * label % p, (u + v) % p);
                }
            }
        }
    }

    #[test]
    fn r_subgraph_predicate() {
        let g = palette_graph(&set(&[0, 1]), 5).unwrap();
        let single = RSubgraph { vertices: set(&[1]), edges: BTreeSet::new() };
        assert!(is_r_subgraph(&single, &g));
        let missing_label = RSubgraph { vertices: set(&[0, 2]), edges: BTreeSet::from([(0, 2)]) };
        assert!(!is_r_subgraph(&missing_label, &g));
        let foreign = RSubgraph { vertices: set(&[4]), edges: BTreeSet::new() };
        assert!(!is_r_subgraph(&foreign, &g));
    }

    #[test]
    fn errors() {
        assert_eq!(palette_graph(&BTreeSet::new(), 5), Err(PaletteError::EmptySet));
        assert!(matches!(palette_graph(&set(&[0, 1]), 9), Err(PaletteError::Algebra(_))));
        assert_eq!(palette_graph(&set(&[0, 5]), 5), Err(PaletteError::OutOfRange { color: 5, modulus: 5 }));
        let mut g = palette_graph(&set(&[0, 1]), 5).unwrap();
        g.vertices.remove(&1);
        assert!(matches!(connected_r_witness(&g), Err(PaletteError::NotFull { .. })));
    }

    #[test]
    fn trefoil_triangle() {
        let d = Diagram::from_pd_text("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let all = colorings(&d, 3, DEFAULT_BUDGET).unwrap().colorings.unwrap();
        for c in all.iter().filter(|c| !c.is_trivial(&d)) {
            let g = palette_graph_of_diagram(&d, c).unwrap();
            assert_eq!(g.vertices, set(&[0, 1, 2]));
            assert_eq!(g.edges.len(), 3);
            for (&(u, v), &label) in &g.edges {
                assert_eq!(set(&[u, v, label]), set(&[0, 1, 2]));
            }
        }
        let constant = DehnColoring::constant(&d, 3, 1);
        let g = palette_graph_of_diagram(&d, &constant).unwrap();
        assert_eq!(g.vertices, set(&[2]));
        assert!(g.edges.is_empty());
    }

    #[test]
    fn dot_and_json() {
        let g = palette_graph(&set(&[0, 1]), 5).unwrap();
        assert_eq!(g.to_dot("g"), "graph g {\n  0;\n  1;\n  2;\n  0 -- 2 [label=\"1\"];\n}\n");
        let j = g.to_json();
        assert_eq!(PaletteGraph::from_json(&j), g);
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"p":5,"vertices":[0,1,2],"edges":[{"u":0,"v":2,"label":1}]}"#
        );
    }
}
