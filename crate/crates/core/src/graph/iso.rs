use super::{Graph, GraphError, VertexMap};

/// Default vertex-count guard for [`are_isomorphic`].
pub const DEFAULT_ISO_LIMIT: usize = 40;

/// Isomorphism test with witness, guarded at [`DEFAULT_ISO_LIMIT`] vertices.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<Option<VertexMap>, GraphError> {
    are_isomorphic_with_limit(g1, g2, DEFAULT_ISO_LIMIT)
}

/// Backtracking isomorphism search. Candidates must agree on degree and on
/// the sorted multiset of neighbor degrees, and adjacency to every already
/// mapped vertex must match in both directions.
pub fn are_isomorphic_with_limit(
    g1: &Graph,
    g2: &Graph,
    limit: usize,
) -> Result<Option<VertexMap>, GraphError> {
    let n = g1.vertex_count();
    if n > limit || g2.vertex_count() > limit {
        return Err(GraphError::TooLarge {
            n: n.max(g2.vertex_count()),
            limit,
        });
    }
    if n != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
        || g1.degree_sequence() != g2.degree_sequence()
    {
        return Ok(None);
    }
    let sig1 = signatures(g1);
    let sig2 = signatures(g2);
    let order = bfs_order(g1);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(g1, g2, &sig1, &sig2, &order, 0, &mut map, &mut used) {
        Ok(Some(VertexMap::new(map, n).expect("bijection onto g2")))
    } else {
        Ok(None)
    }
}

fn signatures(g: &Graph) -> Vec<(usize, Vec<usize>)> {
    g.vertices()
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&w| g.degree(w)).collect();
            nd.sort_unstable();
            (g.degree(v), nd)
        })
        .collect()
}

fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut seen = vec![false; g.vertex_count()];
    let mut by_degree: Vec<usize> = g.vertices().collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for root in by_degree {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let start = order.len();
        order.push(root);
        let mut i = start;
        while i < order.len() {
            let u = order[i];
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g1: &Graph,
    g2: &Graph,
    sig1: &[(usize, Vec<usize>)],
    sig2: &[(usize, Vec<usize>)],
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    for w in g2.vertices() {
        if used[w] || sig1[v] != sig2[w] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| g1.has_edge(u, v) == g2.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend(g1, g2, sig1, sig2, order, depth + 1, map, used) {
            return true;
        }
        used[w] = false;
        map[v] = usize::MAX;
    }
    false
}
