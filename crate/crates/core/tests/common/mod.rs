//! Brute-force oracles built straight from the definitions, sharing as little
//! code with the library as possible.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use knotcol::Diagram;

/// Odometer over all vectors in `[0, p)^len`; calls `f` on each.
pub fn for_each_assignment(len: usize, p: u64, mut f: impl FnMut(&[u64])) {
    let mut v = vec![0u64; len];
    loop {
        f(&v);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
        }
    }
}

pub fn is_dehn(d: &Diagram, p: u64, c: &[u64]) -> bool {
    d.crossings().iter().all(|x| {
        let [a, b, e, f] = x.quadrants;
        (c[a] + c[b]) % p == (c[e] + c[f]) % p
    })
}

/// Every Dehn p-coloring, found by trying all region assignments.
pub fn brute_dehn(d: &Diagram, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for_each_assignment(d.region_count(), p, |c| {
        if is_dehn(d, p, c) {
            out.push(c.to_vec());
        }
    });
    out
}

/// Two-shade checkerboard by BFS across semiarcs.
pub fn shading(d: &Diagram) -> Vec<u8> {
    let r = d.region_count();
    let mut adj = vec![Vec::new(); r];
    for s in 0..d.semiarc_count() {
        let [a, b] = d.semiarc_regions(s);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut shade = vec![u8::MAX; r];
    shade[0] = 0;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for &b in &adj[a] {
            if shade[b] == u8::MAX {
                shade[b] = 1 - shade[a];
                stack.push(b);
            }
        }
    }
    shade
}

/// Constant on each checkerboard shade (covers the constant colorings).
pub fn is_trivial(shade: &[u8], c: &[u64]) -> bool {
    let mut seen: [Option<u64>; 2] = [None, None];
    for (&s, &v) in shade.iter().zip(c) {
        match seen[s as usize] {
            None => seen[s as usize] = Some(v),
            Some(w) if w != v => return false,
            _ => {}
        }
    }
    true
}

pub fn distinct(c: &[u64]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

/// Minimum number of colors over nontrivial colorings, by exhaustion.
pub fn brute_min_colors(d: &Diagram, p: u64) -> Option<usize> {
    let shade = shading(d);
    let mut best: Option<usize> = None;
    for_each_assignment(d.region_count(), p, |c| {
        if is_dehn(d, p, c) && !is_trivial(&shade, c) {
            let k = distinct(c);
            best = Some(best.map_or(k, |b| b.min(k)));
        }
    });
    best
}

/// Arcs from the PD code alone: labels at positions 2 and 4 of a quadruple
/// lie on the same arc.
pub struct PdArcs {
    pub count: usize,
    /// (under-in, under-out, over) arc ids per crossing.
    pub crossings: Vec<(usize, usize, usize)>,
}

pub fn pd_arcs(pd: &[[i64; 4]]) -> PdArcs {
    let mut parent: HashMap<i64, i64> = HashMap::new();
    fn find(parent: &mut HashMap<i64, i64>, x: i64) -> i64 {
        let up = *parent.entry(x).or_insert(x);
        if up == x {
            return x;
        }
        let root = find(parent, up);
        parent.insert(x, root);
        root
    }
    for q in pd {
        for &l in q {
            find(&mut parent, l);
        }
        let (a, b) = (find(&mut parent, q[1]), find(&mut parent, q[3]));
        parent.insert(a, b);
    }
    let mut ids: BTreeMap<i64, usize> = BTreeMap::new();
    let mut id = |parent: &mut HashMap<i64, i64>, l: i64| {
        let root = find(parent, l);
        let n = ids.len();
        *ids.entry(root).or_insert(n)
    };
    let crossings =
        pd.iter().map(|q| (id(&mut parent, q[0]), id(&mut parent, q[2]), id(&mut parent, q[1]))).collect();
    PdArcs { count: ids.len(), crossings }
}

/// Number of Fox p-colorings by trying all arc assignments.
pub fn brute_fox_count(pd: &[[i64; 4]], p: u64) -> usize {
    let arcs = pd_arcs(pd);
    let mut n = 0;
    for_each_assignment(arcs.count, p, |f| {
        if arcs.crossings.iter().all(|&(u, v, w)| (f[u] + f[v]) % p == 2 * f[w] % p) {
            n += 1;
        }
    });
    n
}

pub fn det_cofactor(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .filter(|&j| m[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_cofactor(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k`-minors.
pub fn gcd_of_minors(m: &[Vec<i128>], k: usize) -> i128 {
    let cols = m.first().map_or(0, |r| r.len());
    let mut g = 0;
    for rs in subsets(m.len(), k) {
        for cs in subsets(cols, k) {
            let sub: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
            g = gcd(g, det_cofactor(&sub));
        }
    }
    g
}

/// Knot determinant as the gcd of the (n-1)-minors of the Fox matrix, built
/// from the PD code.
pub fn determinant_oracle(pd: &[[i64; 4]]) -> i128 {
    let arcs = pd_arcs(pd);
    let mut m = vec![vec![0i128; arcs.count]; pd.len()];
    for (x, &(u, v, w)) in arcs.crossings.iter().enumerate() {
        m[x][u] += 1;
        m[x][v] += 1;
        m[x][w] -= 2;
    }
    gcd_of_minors(&m, pd.len() - 1)
}

/// Palette graph of a color set from the definition: vertex sums of ordered
/// pairs; an edge b1 -- b2 labelled a1 + a3 when a1 + a3 = a2 + a4.
pub fn palette_oracle(s: &BTreeSet<u64>, p: u64) -> (BTreeSet<u64>, BTreeMap<(u64, u64), u64>) {
    let mut vertices = BTreeSet::new();
    let mut edges = BTreeMap::new();
    for &a1 in s {
        for &a2 in s {
            vertices.insert((a1 + a2) % p);
            for &a3 in s {
                for &a4 in s {
                    let (b1, b2) = ((a1 + a2) % p, (a3 + a4) % p);
                    if b1 != b2 && (a1 + a3) % p == (a2 + a4) % p {
                        let prev = edges.insert((b1.min(b2), b1.max(b2)), (a1 + a3) % p);
                        assert!(prev.is_none_or(|l| l == (a1 + a3) % p), "label is not well defined");
                    }
                }
            }
        }
    }
    (vertices, edges)
}

pub fn connected(vertices: &BTreeSet<u64>, edges: impl IntoIterator<Item = (u64, u64)>) -> bool {
    let Some(&start) = vertices.iter().next() else { return true };
    let edges: Vec<(u64, u64)> = edges.into_iter().collect();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in &edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && vertices.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == vertices.len()
}

/// Whether some vertex subset of size >= 3 carries a connected R-subgraph.
/// For a fixed vertex set the largest admissible edge set is the best choice,
/// so only that one is tested.
pub fn brute_has_connected_r(vertices: &BTreeSet<u64>, edges: &BTreeMap<(u64, u64), u64>) -> bool {
    let vs: Vec<u64> = vertices.iter().copied().collect();
    let n = vs.len();
    if n < 3 {
        return false;
    }
    (0u64..1 << n).filter(|m| m.count_ones() >= 3).any(|mask| {
        let sub: BTreeSet<u64> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| vs[i]).collect();
        let kept = edges
            .iter()
            .filter(|(&(u, v), l)| sub.contains(&u) && sub.contains(&v) && sub.contains(l))
            .map(|(&e, _)| e);
        connected(&sub, kept)
    })
}

pub const CATALOG_DETERMINANTS: [(&str, i128); 9] =
    [("3_1", 3), ("4_1", 5), ("5_1", 5), ("5_2", 7), ("6_1", 9), ("6_2", 11), ("6_3", 13), ("7_1", 7), ("7_4", 15)];

pub fn odd_primes_below(n: u64) -> Vec<u64> {
    (3..n).filter(|&q| (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)).collect()
}

/// (name, diagram, p) for every catalog knot and every odd prime p < 32
/// dividing its determinant.
pub fn colorable_cases() -> Vec<(&'static str, Diagram, u64)> {
    let mut out = Vec::new();
    for (name, det) in CATALOG_DETERMINANTS {
        let d = knotcol::catalog::load(name).unwrap();
        for p in odd_primes_below(32) {
            if det % p as i128 == 0 {
                out.push((name, d.clone(), p));
            }
        }
    }
    out
}
