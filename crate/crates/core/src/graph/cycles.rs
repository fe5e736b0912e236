use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::{Graph, GraphError};

/// All simple cycles of length `k`, each listed once.
///
/// A cycle is reported in canonical form: it starts at its smallest vertex and
/// runs in the direction whose second vertex is smaller than its last.
pub fn enumerate_cycles(g: &Graph, k: usize) -> Result<Vec<Vec<usize>>, GraphError> {
    if k < 3 {
        return Err(GraphError::CycleLength(k));
    }
    let mut out = Vec::new();
    let mut on_path = FixedBitSet::with_capacity(g.vertex_count());
    let mut path = Vec::with_capacity(k);
    for start in g.vertices() {
        path.push(start);
        on_path.insert(start);
        extend(g, k, start, &mut path, &mut on_path, &mut out);
        on_path.set(start, false);
        path.pop();
    }
    Ok(out)
}

fn extend(
    g: &Graph,
    k: usize,
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().expect("path is never empty");
    if path.len() == k {
        if g.has_edge(last, start) && path[1] < path[k - 1] {
            out.push(path.clone());
        }
        return;
    }
    for &w in g.neighbors(last) {
        if w <= start || on_path.contains(w) {
            continue;
        }
        path.push(w);
        on_path.insert(w);
        extend(g, k, start, path, on_path, out);
        on_path.set(w, false);
        path.pop();
    }
}

/// Length of a shortest odd cycle, or `None` when the graph is bipartite.
///
/// From every root, an edge joining two vertices at equal BFS depth `d` closes
/// an odd walk of length `2d + 1`; the minimum over all roots is attained at a
/// root lying on a shortest odd cycle.
pub fn shortest_odd_cycle(g: &Graph) -> Option<usize> {
    let mut best: Option<usize> = None;
    for root in g.vertices() {
        let dist = g.bfs(root);
        for &(u, v) in g.edges() {
            if let (Some(du), Some(dv)) = (dist[u], dist[v]) {
                if du == dv {
                    let len = 2 * du + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// A proper 2-coloring, if one exists.
pub fn two_coloring(g: &Graph) -> Option<Vec<u8>> {
    let n = g.vertex_count();
    let mut side = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[u];
                    queue.push_back(w);
                } else if side[w] == side[u] {
                    return None;
                }
            }
        }
    }
    Some(side)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn c4_cycles() {
        let c4 = cycle(4);
        assert_eq!(enumerate_cycles(&c4, 4).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert!(enumerate_cycles(&c4, 3).unwrap().is_empty());
        assert_eq!(enumerate_cycles(&c4, 2), Err(GraphError::CycleLength(2)));
    }

    #[test]
    fn k4_cycles() {
        let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(enumerate_cycles(&k4, 3).unwrap().len(), 4);
        assert_eq!(enumerate_cycles(&k4, 4).unwrap().len(), 3);
    }

    #[test]
    fn odd_girth() {
        assert_eq!(shortest_odd_cycle(&cycle(3)), Some(3));
        assert_eq!(shortest_odd_cycle(&cycle(6)), None);
        assert_eq!(shortest_odd_cycle(&cycle(9)), Some(9));
        assert!(two_coloring(&cycle(6)).is_some());
        assert!(two_coloring(&cycle(7)).is_none());
    }
}
