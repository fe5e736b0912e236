//! Frames, skeletons `(F, D)`, the quotient `(G \ F) / D`, and the
//! association of `D`-vertices with quotient vertices and edges.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexMap};
use crate::solver::{find_endo_counterexample, Limit, Outcome, SearchConfig, SolverError};

/// Default vertex-count guard for exact frame checks.
pub const FRAME_GUARD: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("vertex {0} is in both F and D")]
    Overlap(usize),
    #[error("D-vertex {vertex} has degree {degree} outside F (at most 2 allowed)")]
    Degree { vertex: usize, degree: usize },
    #[error("D-vertex {0} has more than one possible association")]
    Ambiguous(usize),
    #[error("frame check on {n} vertices exceeds the guard of {guard}; raise or disable the guard")]
    Guard { n: usize, guard: usize },
}

/// Extra structure recorded by the grid and wall skeleton generators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SkeletonMeta {
    #[default]
    None,
    Grid {
        s: usize,
        t: usize,
        k1: usize,
        k2: usize,
        f1: Vec<usize>,
    },
    Wall {
        s: usize,
        t: usize,
        f1: Vec<usize>,
        f2: Vec<usize>,
    },
}

impl SkeletonMeta {
    /// The `F1` set, if the generator recorded one.
    pub fn f1(&self) -> Option<&[usize]> {
        match self {
            SkeletonMeta::None => None,
            SkeletonMeta::Grid { f1, .. } | SkeletonMeta::Wall { f1, .. } => Some(f1),
        }
    }
}

/// A candidate skeleton. Serialized as `{"F": [...], "D": [...], "meta": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonSpec {
    #[serde(rename = "F")]
    pub frame: Vec<usize>,
    #[serde(rename = "D")]
    pub connectors: Vec<usize>,
    #[serde(default)]
    pub meta: SkeletonMeta,
}

impl SkeletonSpec {
    /// Sorts and deduplicates both sets; no validity checks.
    pub fn new(mut frame: Vec<usize>, mut connectors: Vec<usize>) -> Self {
        frame.sort_unstable();
        frame.dedup();
        connectors.sort_unstable();
        connectors.dedup();
        SkeletonSpec {
            frame,
            connectors,
            meta: SkeletonMeta::None,
        }
    }

    pub fn with_meta(mut self, meta: SkeletonMeta) -> Self {
        self.meta = meta;
        self
    }

    /// `V(G) \ (F ∪ D)`, ascending.
    pub fn free_vertices(&self, n: usize) -> Vec<usize> {
        let taken = self.taken(n);
        (0..n).filter(|&v| !taken.contains(v)).collect()
    }

    fn taken(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &v in self.frame.iter().chain(&self.connectors) {
            if v < n {
                b.insert(v);
            }
        }
        b
    }
}

/// Where a `D`-vertex attaches in the quotient. Ids are vertices of the host
/// graph (all of them quotient vertices); edges are stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Association {
    Vertex { v: usize },
    Edge { v: usize, w: usize },
    None,
}

/// Associates every `D`-vertex of `host`. The components of `host[D]` are
/// paths and cycles; a path's association is decided by its non-`D`
/// neighbors: none gives `None`, one gives `Vertex`, two distinct ones give
/// `Edge`, and a path returning to the same vertex gives `None`.
pub fn associate(host: &Graph, d: &[usize]) -> Result<BTreeMap<usize, Association>, SkeletonError> {
    let n = host.vertex_count();
    let mut in_d = FixedBitSet::with_capacity(n);
    for &v in d {
        host.check_vertex(v)?;
        in_d.insert(v);
    }
    for v in in_d.ones() {
        if host.degree(v) > 2 {
            return Err(SkeletonError::Degree {
                vertex: v,
                degree: host.degree(v),
            });
        }
    }
    let mut out = BTreeMap::new();
    let mut seen = FixedBitSet::with_capacity(n);
    for start in in_d.ones() {
        if seen.contains(start) {
            continue;
        }
        seen.insert(start);
        let mut comp = vec![start];
        let mut attach = Vec::new();
        let mut i = 0;
        while i < comp.len() {
            for &w in host.neighbors(comp[i]) {
                if !in_d.contains(w) {
                    attach.push(w);
                } else if !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                }
            }
            i += 1;
        }
        let assoc = match attach[..] {
            [] => Association::None,
            [v] => Association::Vertex { v },
            [a, b] if a == b => Association::None,
            [a, b] => Association::Edge {
                v: a.min(b),
                w: a.max(b),
            },
            _ => return Err(SkeletonError::Ambiguous(start)),
        };
        for v in comp {
            out.insert(v, assoc);
        }
    }
    Ok(out)
}

/// The quotient `(G \ F) / D` with bookkeeping back to `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientResult {
    pub quotient: Graph,
    /// `vertex_of[q]` is the `G`-vertex behind quotient vertex `q`.
    pub vertex_of: Vec<usize>,
    /// Association of each `D`-vertex, in `G` ids.
    pub association: BTreeMap<usize, Association>,
    pub removed_frame: Vec<usize>,
    quotient_id: Vec<Option<usize>>,
}

impl QuotientResult {
    /// Quotient id of a `G`-vertex, if it survives into the quotient.
    pub fn quotient_id(&self, g_vertex: usize) -> Option<usize> {
        self.quotient_id.get(g_vertex).copied().flatten()
    }

    /// The quotient-vertex-to-`G` table as a map into `V(G)`.
    pub fn embedding_into(&self, g_size: usize) -> VertexMap {
        VertexMap::new(self.vertex_of.clone(), g_size).expect("quotient vertices are G vertices")
    }
}

fn check_sets(g: &Graph, frame: &[usize], d: &[usize]) -> Result<(), SkeletonError> {
    let mut in_f = FixedBitSet::with_capacity(g.vertex_count());
    for &v in frame {
        g.check_vertex(v)?;
        in_f.insert(v);
    }
    for &v in d {
        g.check_vertex(v)?;
        if in_f.contains(v) {
            return Err(SkeletonError::Overlap(v));
        }
    }
    Ok(())
}

pub fn quotient(g: &Graph, frame: &[usize], d: &[usize]) -> Result<QuotientResult, SkeletonError> {
    check_sets(g, frame, d)?;
    let (host, kept) = g.without_vertices(frame)?;
    let mut host_id = vec![None; g.vertex_count()];
    for (i, &v) in kept.iter().enumerate() {
        host_id[v] = Some(i);
    }
    let d_host: Vec<usize> = d.iter().map(|&v| host_id[v].expect("D is disjoint from F")).collect();
    let assoc_host = associate(&host, &d_host)?;

    let mut in_d = FixedBitSet::with_capacity(host.vertex_count());
    for &v in &d_host {
        in_d.insert(v);
    }
    let q_host: Vec<usize> = host.vertices().filter(|&v| !in_d.contains(v)).collect();
    let mut qid = vec![usize::MAX; host.vertex_count()];
    for (i, &v) in q_host.iter().enumerate() {
        qid[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = host
        .edges()
        .iter()
        .filter(|&&(a, b)| !in_d.contains(a) && !in_d.contains(b))
        .map(|&(a, b)| (qid[a], qid[b]))
        .collect();
    for a in assoc_host.values() {
        if let Association::Edge { v, w } = *a {
            edges.push((qid[v], qid[w]));
        }
    }
    let vertex_of: Vec<usize> = q_host.iter().map(|&v| kept[v]).collect();
    let labels: Vec<(usize, String)> = vertex_of
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| g.label(v).map(|l| (i, l.to_owned())))
        .collect();
    let quotient = Graph::new(vertex_of.len(), edges)?.with_labels(labels)?;

    let to_g = |a: Association| match a {
        Association::Vertex { v } => Association::Vertex { v: kept[v] },
        Association::Edge { v, w } => Association::Edge { v: kept[v], w: kept[w] },
        Association::None => Association::None,
    };
    let association = assoc_host.into_iter().map(|(k, a)| (kept[k], to_g(a))).collect();
    let mut quotient_id = vec![None; g.vertex_count()];
    for (i, &v) in vertex_of.iter().enumerate() {
        quotient_id[v] = Some(i);
    }
    let mut removed_frame = frame.to_vec();
    removed_frame.sort_unstable();
    removed_frame.dedup();
    Ok(QuotientResult {
        quotient,
        vertex_of,
        association,
        removed_frame,
        quotient_id,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameConfig {
    pub search: SearchConfig,
    /// Refuse exact checks above this many vertices; `None` disables the guard.
    pub guard: Option<usize>,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            search: SearchConfig::default(),
            guard: Some(FRAME_GUARD),
        }
    }
}

impl FrameConfig {
    pub fn unguarded(search: SearchConfig) -> Self {
        FrameConfig { search, guard: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameVerdict {
    Frame,
    /// A non-surjective endomorphism whose image contains `F`.
    NotFrame(VertexMap),
    Indeterminate(Limit),
}

impl FrameVerdict {
    pub fn decided(&self) -> Option<bool> {
        match self {
            FrameVerdict::Frame => Some(true),
            FrameVerdict::NotFrame(_) => Some(false),
            FrameVerdict::Indeterminate(_) => None,
        }
    }
}

pub fn is_frame(g: &Graph, frame: &[usize], cfg: &FrameConfig) -> Result<FrameVerdict, SkeletonError> {
    if let Some(guard) = cfg.guard {
        if g.vertex_count() > guard {
            return Err(SkeletonError::Guard {
                n: g.vertex_count(),
                guard,
            });
        }
    }
    let search = find_endo_counterexample(g, frame, &cfg.search)?;
    Ok(match search.outcome {
        Outcome::Found(h) => FrameVerdict::NotFrame(h),
        Outcome::NoSolution => FrameVerdict::Frame,
        Outcome::LimitExceeded(l) => FrameVerdict::Indeterminate(l),
    })
}

/// Per-condition result of [`is_skeleton`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonReport {
    pub s1: FrameVerdict,
    /// Vertices in both `F` and `D`.
    pub s2_overlap: Vec<usize>,
    /// `D`-vertices with more than two neighbors outside `F`, with that count.
    pub s3_violations: Vec<(usize, usize)>,
}

impl SkeletonReport {
    pub fn s2(&self) -> bool {
        self.s2_overlap.is_empty()
    }

    pub fn s3(&self) -> bool {
        self.s3_violations.is_empty()
    }

    /// `None` when S2 and S3 hold but the frame check was indeterminate.
    pub fn is_skeleton(&self) -> Option<bool> {
        if !self.s2() || !self.s3() {
            return Some(false);
        }
        self.s1.decided()
    }
}

/// Conditions S2 and S3 only.
pub fn structural_report(g: &Graph, frame: &[usize], d: &[usize]) -> Result<(Vec<usize>, Vec<(usize, usize)>), SkeletonError> {
    let n = g.vertex_count();
    let mut in_f = FixedBitSet::with_capacity(n);
    for &v in frame {
        g.check_vertex(v)?;
        in_f.insert(v);
    }
    let mut overlap = Vec::new();
    let mut s3 = Vec::new();
    let mut ds: Vec<usize> = d.to_vec();
    ds.sort_unstable();
    ds.dedup();
    for &v in &ds {
        g.check_vertex(v)?;
        if in_f.contains(v) {
            overlap.push(v);
        }
        let outside = g.neighbors(v).iter().filter(|&&w| !in_f.contains(w)).count();
        if outside > 2 {
            s3.push((v, outside));
        }
    }
    Ok((overlap, s3))
}

pub fn is_skeleton(g: &Graph, frame: &[usize], d: &[usize], cfg: &FrameConfig) -> Result<SkeletonReport, SkeletonError> {
    let (s2_overlap, s3_violations) = structural_report(g, frame, d)?;
    let s1 = is_frame(g, frame, cfg)?;
    Ok(SkeletonReport {
        s1,
        s2_overlap,
        s3_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::are_isomorphic;
    use crate::patterns::{grid_skeleton, make_grid, make_wall, wall_skeleton, GridCoord};

    #[test]
    fn association_cases() {
        // a=0, d1=1, d2=2, b=3
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let a = associate(&g, &[1, 2]).unwrap();
        assert_eq!(a[&1], Association::Edge { v: 0, w: 3 });
        assert_eq!(a[&2], Association::Edge { v: 0, w: 3 });
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let a = associate(&g, &[1, 2]).unwrap();
        assert_eq!(a[&1], Association::Vertex { v: 0 });
        assert_eq!(a[&2], Association::Vertex { v: 0 });
        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let a = associate(&c4, &[0, 1, 2, 3]).unwrap();
        assert!(a.values().all(|&x| x == Association::None));
    }

    #[test]
    fn association_loop_and_isolated() {
        // Triangle 0-1-2 with D = {1, 2}: the D-path leaves and returns to 0.
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let a = associate(&g, &[1, 2, 3]).unwrap();
        assert_eq!(a[&1], Association::None);
        assert_eq!(a[&3], Association::None);
    }

    #[test]
    fn association_degree_error() {
        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(associate(&star, &[0]), Err(SkeletonError::Degree { vertex: 0, degree: 3 })));
    }

    #[test]
    fn grid_78_quotient_is_square() {
        let g = make_grid(7, 8).unwrap();
        let s = grid_skeleton(7, 8).unwrap();
        let q = quotient(&g, &s.frame, &s.connectors).unwrap();
        let mut verts: Vec<GridCoord> = q.vertex_of.iter().map(|&v| GridCoord::from_id(v, 8)).collect();
        verts.sort();
        let expect = [(3, 3), (3, 5), (5, 3), (5, 5)].map(|(i, j)| GridCoord { i, j });
        assert_eq!(verts, expect);
        assert_eq!(q.quotient.edge_count(), 4);
        assert!(are_isomorphic(&q.quotient, &make_grid(2, 2).unwrap()).unwrap().is_some());
        // (3,2), (3,6), (5,2), (5,6) hang off one quotient vertex; the other
        // four connectors subdivide quotient edges.
        let (mut vertex, mut edge) = (0, 0);
        for (&u, a) in &q.association {
            match *a {
                Association::Edge { v, w } => {
                    edge += 1;
                    assert!(q.quotient.has_edge(q.quotient_id(v).unwrap(), q.quotient_id(w).unwrap()), "{u}")
                }
                Association::Vertex { v } => {
                    vertex += 1;
                    assert!(q.quotient_id(v).is_some());
                }
                Association::None => panic!("unassociated connector {u}"),
            }
        }
        assert_eq!((vertex, edge), (4, 4));
    }

    #[test]
    fn empty_d_quotient_is_induced() {
        let g = make_wall(6, 7).unwrap();
        let s = wall_skeleton(6, 7).unwrap();
        let q = quotient(&g, &s.frame, &[]).unwrap();
        let (induced, kept) = g.without_vertices(&s.frame).unwrap();
        assert_eq!(q.quotient, induced);
        assert_eq!(q.vertex_of, kept);
        assert!(q.association.is_empty());
    }

    #[test]
    fn frames() {
        let cfg = FrameConfig::default();
        let g33 = make_grid(3, 3).unwrap();
        assert_eq!(is_frame(&g33, &[0, 2, 6, 8], &cfg).unwrap(), FrameVerdict::Frame);
        let g22 = make_grid(2, 2).unwrap();
        assert!(matches!(is_frame(&g22, &[], &cfg).unwrap(), FrameVerdict::NotFrame(_)));
        let all: Vec<usize> = g33.vertices().collect();
        assert_eq!(is_frame(&g33, &all, &cfg).unwrap(), FrameVerdict::Frame);
        let big = make_grid(7, 7).unwrap();
        assert!(matches!(is_frame(&big, &[], &cfg), Err(SkeletonError::Guard { n: 49, guard: 40 })));
    }

    #[test]
    fn skeleton_reports() {
        let cfg = FrameConfig::default();
        let g = make_grid(5, 6).unwrap();
        let s = grid_skeleton(5, 6).unwrap();
        let r = is_skeleton(&g, &s.frame, &s.connectors, &cfg).unwrap();
        assert_eq!(r.is_skeleton(), Some(true));

        let g33 = make_grid(3, 3).unwrap();
        let r = is_skeleton(&g33, &[0, 2, 6, 8], &[0], &cfg).unwrap();
        assert!(!r.s2() && r.is_skeleton() == Some(false));

        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = is_skeleton(&star, &[], &[0], &cfg).unwrap();
        assert_eq!(r.s3_violations, vec![(0, 3)]);
        assert_eq!(r.is_skeleton(), Some(false));
    }

    #[test]
    fn spec_json_shape() {
        let s = SkeletonSpec::new(vec![3, 1, 1], vec![2]);
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["F"], serde_json::json!([1, 3]));
        assert_eq!(json["D"], serde_json::json!([2]));
        let back: SkeletonSpec = serde_json::from_str(r#"{"F":[1,3],"D":[2]}"#).unwrap();
        assert_eq!(back, s);
    }
}
