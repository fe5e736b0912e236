//! Test-side oracles. Everything here is brute force and shares no code with
//! the library beyond the `Graph` container.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use gridwall::Graph;
use proptest::prelude::*;

/// Graphs on `1..=max_n` vertices with independent edge bits.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    arb_graph_range(1, max_n)
}

pub fn arb_graph_range(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

pub fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if bits[k] {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Calls `f` on every map `[n] -> [m]` until it returns true.
pub fn any_map(n: usize, m: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if n == 0 {
        return f(&[]);
    }
    if m == 0 {
        return false;
    }
    let mut map = vec![0; n];
    loop {
        if f(&map) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

pub fn is_hom(g: &Graph, h: &[Vec<bool>], map: &[usize]) -> bool {
    g.edges().iter().all(|&(u, v)| h[map[u]][map[v]])
}

pub fn is_injective(map: &[usize]) -> bool {
    let set: BTreeSet<_> = map.iter().collect();
    set.len() == map.len()
}

pub fn brute_hom(g: &Graph, h: &Graph) -> bool {
    let a = adjacency(h);
    any_map(g.vertex_count(), h.vertex_count(), |m| is_hom(g, &a, m))
}

pub fn brute_emb(g: &Graph, h: &Graph) -> bool {
    let a = adjacency(h);
    any_map(g.vertex_count(), h.vertex_count(), |m| is_injective(m) && is_hom(g, &a, m))
}

/// `colors[w]` is the pattern vertex that target vertex `w` may host.
pub fn brute_colemb(g: &Graph, h: &Graph, colors: &[usize]) -> bool {
    let a = adjacency(h);
    any_map(g.vertex_count(), h.vertex_count(), |m| {
        m.iter().enumerate().all(|(v, &w)| colors[w] == v) && is_hom(g, &a, m)
    })
}

/// Every endomorphism whose image contains `frame` is onto.
pub fn brute_is_frame(g: &Graph, frame: &[usize]) -> bool {
    let a = adjacency(g);
    let n = g.vertex_count();
    !any_map(n, n, |m| {
        if !is_hom(g, &a, m) {
            return false;
        }
        let image: BTreeSet<usize> = m.iter().copied().collect();
        frame.iter().all(|f| image.contains(f)) && image.len() < n
    })
}

pub fn bfs(g: &Graph, src: usize) -> Vec<Option<usize>> {
    let a = adjacency(g);
    let mut dist = vec![None; g.vertex_count()];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for v in 0..g.vertex_count() {
            if a[u][v] && dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

/// Number of simple `k`-cycles, counted as closed walks without repeats.
pub fn brute_cycle_count(g: &Graph, k: usize) -> usize {
    let a = adjacency(g);
    let n = g.vertex_count();
    fn walk(a: &[Vec<bool>], path: &mut Vec<usize>, k: usize, count: &mut usize) {
        let last = *path.last().unwrap();
        if path.len() == k {
            if a[last][path[0]] {
                *count += 1;
            }
            return;
        }
        for v in 0..a.len() {
            if a[last][v] && !path.contains(&v) {
                path.push(v);
                walk(a, path, k, count);
                path.pop();
            }
        }
    }
    let mut count = 0;
    for s in 0..n {
        walk(&a, &mut vec![s], k, &mut count);
    }
    count / (2 * k)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    V,
    U,
}

/// Adjacency in `W_{s,t}` decided pair by pair from the definition, with the
/// rung `v_{s+1,j} u_{s+1,j}` closing each row.
fn wall_adjacent(t: usize, a: (Kind, usize, usize), b: (Kind, usize, usize)) -> bool {
    use Kind::{U, V};
    let rule = |x: (Kind, usize, usize), y: (Kind, usize, usize)| match (x, y) {
        ((V, i, 1), (V, i2, 1)) => i2 == i + 1,
        ((V, i, j), (V, i2, j2)) if t % 2 == 1 && j == t + 1 && j2 == t + 1 => i2 == i + 1,
        ((U, i, j), (U, i2, j2)) if t % 2 == 0 && j == t + 1 && j2 == t + 1 => i2 == i + 1,
        ((V, i, j), (U, i2, j2)) if j == j2 && (2..=t).contains(&j) => i2 == i,
        ((U, i, j), (V, i2, j2)) if j == j2 && (2..=t).contains(&j) => i2 == i + 1,
        ((V, i, j), (V, i2, j2)) if i == i2 && j % 2 == 1 && j <= t => j2 == j + 1,
        ((U, i, j), (U, i2, j2)) if i == i2 && j % 2 == 0 && j <= t => j2 == j + 1,
        _ => false,
    };
    rule(a, b) || rule(b, a)
}

fn wall_name(k: Kind, i: usize, j: usize) -> String {
    match k {
        Kind::V => format!("v_{{{i},{j}}}"),
        Kind::U => format!("u_{{{i},{j}}}"),
    }
}

/// The wall from its definition, keyed by vertex name.
pub fn wall_by_name(s: usize, t: usize) -> (BTreeSet<String>, BTreeSet<(String, String)>) {
    let mut verts = Vec::new();
    for i in 1..=s + 1 {
        for j in 1..=t {
            verts.push((Kind::V, i, j));
        }
        for j in 2..=t {
            verts.push((Kind::U, i, j));
        }
        verts.push((if t % 2 == 1 { Kind::V } else { Kind::U }, i, t + 1));
    }
    let mut edges = BTreeSet::new();
    for (x, &a) in verts.iter().enumerate() {
        for &b in &verts[x + 1..] {
            if wall_adjacent(t, a, b) {
                let (na, nb) = (wall_name(a.0, a.1, a.2), wall_name(b.0, b.1, b.2));
                edges.insert(if na < nb { (na, nb) } else { (nb, na) });
            }
        }
    }
    (verts.iter().map(|&(k, i, j)| wall_name(k, i, j)).collect(), edges)
}

/// Edges of `g` as label pairs.
pub fn named_edges(g: &Graph) -> BTreeSet<(String, String)> {
    g.edges()
        .iter()
        .map(|&(x, y)| {
            let (a, b) = (g.label(x).unwrap().to_string(), g.label(y).unwrap().to_string());
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect()
}
