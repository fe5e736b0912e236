//! The product graph `P(G, S, H, χ)`, its coordinate projections, and the
//! lift / project maps between colored embeddings of the quotient into `H`
//! and embeddings of `G` into `P`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Coloring, Graph, GraphError, VertexMap};
use crate::skeleton::{quotient, structural_report, Association, QuotientResult, SkeletonError, SkeletonSpec};
use crate::solver::{verify_map, MapMode, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("coloring has {got} entries, H has {expected} vertices")]
    ColoringSize { got: usize, expected: usize },
    #[error("coloring targets a graph with {got} vertices, G has {expected}")]
    ColoringPattern { got: usize, expected: usize },
    #[error("H-vertex {vertex} is colored {color}, which lies in F ∪ D")]
    ColorInSkeleton { vertex: usize, color: usize },
    #[error("vertex {0} is in both F and D")]
    Overlap(usize),
    #[error("D-vertex {vertex} has {degree} neighbors outside F")]
    Degree { vertex: usize, degree: usize },
    #[error("quotient map is not a colored embedding: {0}")]
    BadQuotientMap(Violation),
    #[error("map into P is not a homomorphism: {0}")]
    NotHomomorphism(Violation),
    #[error("frame vertex {0} has no preimage of the form (u, u)")]
    FrameNotCovered(usize),
    #[error("first projection of the map is not an automorphism of G")]
    NotAutomorphism,
    #[error("lifted map failed verification: {0}")]
    LiftFailed(Violation),
    #[error("projected map failed verification: {0}")]
    ProjectFailed(Violation),
}

/// A vertex of `P`. The derived order (class first, then payload) fixes the
/// vertex ids of a built product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum ProductVertex {
    /// `(u, a)` with `χ(a) = u`.
    V1 { u: usize, a: usize },
    /// `(u, u)` for `u ∈ F` or an unassociated `u ∈ D`.
    V2 { u: usize },
    /// `(u, v_{u,a})` for `u ∈ D` associated with the vertex `χ(a)`.
    V3 { u: usize, a: usize },
    /// `(u, v_{u,e})` for `u ∈ D` associated with the edge `χ(e)`; `e` is an
    /// `H`-edge `(min, max)`.
    V4 { u: usize, e: (usize, usize) },
}

/// Second coordinate of a product vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SecondCoord {
    H { a: usize },
    G { u: usize },
    FreshVertex { u: usize, a: usize },
    FreshEdge { u: usize, e: (usize, usize) },
}

impl ProductVertex {
    pub fn class(&self) -> usize {
        match self {
            ProductVertex::V1 { .. } => 1,
            ProductVertex::V2 { .. } => 2,
            ProductVertex::V3 { .. } => 3,
            ProductVertex::V4 { .. } => 4,
        }
    }

    pub fn first(&self) -> usize {
        match *self {
            ProductVertex::V1 { u, .. }
            | ProductVertex::V2 { u }
            | ProductVertex::V3 { u, .. }
            | ProductVertex::V4 { u, .. } => u,
        }
    }

    pub fn second(&self) -> SecondCoord {
        match *self {
            ProductVertex::V1 { a, .. } => SecondCoord::H { a },
            ProductVertex::V2 { u } => SecondCoord::G { u },
            ProductVertex::V3 { u, a } => SecondCoord::FreshVertex { u, a },
            ProductVertex::V4 { u, e } => SecondCoord::FreshEdge { u, e },
        }
    }

    /// Whether two vertices over adjacent `G`-vertices are adjacent in `P`.
    fn compatible(&self, other: &ProductVertex, h: &Graph) -> bool {
        use ProductVertex::*;
        match (*self, *other) {
            (V2 { .. }, _) | (_, V2 { .. }) => true,
            (V1 { a, .. }, V1 { a: b, .. }) => h.has_edge(a, b),
            (V1 { a, .. }, V3 { a: b, .. }) | (V3 { a: b, .. }, V1 { a, .. }) => a == b,
            (V1 { a, .. }, V4 { e, .. }) | (V4 { e, .. }, V1 { a, .. }) => e.0 == a || e.1 == a,
            (V3 { a, .. }, V3 { a: b, .. }) => a == b,
            (V4 { e, .. }, V4 { e: f, .. }) => e == f,
            (V3 { .. }, V4 { .. }) | (V4 { .. }, V3 { .. }) => false,
        }
    }
}

impl std::fmt::Display for ProductVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProductVertex::V1 { u, a } => write!(f, "({u},h{a})"),
            ProductVertex::V2 { u } => write!(f, "({u},{u})"),
            ProductVertex::V3 { u, a } => write!(f, "({u},v[{u},h{a}])"),
            ProductVertex::V4 { u, e } => write!(f, "({u},v[{u},h{}h{}])", e.0, e.1),
        }
    }
}

/// A materialized product together with everything needed to lift and
/// project maps.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    pub graph: Graph,
    pub vertices: Vec<ProductVertex>,
    /// Ids of `V1..V4`, at index 0..3.
    pub class_index: [Vec<usize>; 4],
    pub quotient: QuotientResult,
    base: Graph,
    skeleton: SkeletonSpec,
    h: Graph,
    chi: Coloring,
    index: HashMap<ProductVertex, usize>,
}

fn check_coloring(g: &Graph, s: &SkeletonSpec, h: &Graph, chi: &Coloring) -> Result<(), ProductError> {
    if chi.target_size() != h.vertex_count() {
        return Err(ProductError::ColoringSize {
            got: chi.target_size(),
            expected: h.vertex_count(),
        });
    }
    if chi.pattern_size() != g.vertex_count() {
        return Err(ProductError::ColoringPattern {
            got: chi.pattern_size(),
            expected: g.vertex_count(),
        });
    }
    let free = s.free_vertices(g.vertex_count());
    for (vertex, &color) in chi.colors().iter().enumerate() {
        if free.binary_search(&color).is_err() {
            return Err(ProductError::ColorInSkeleton { vertex, color });
        }
    }
    Ok(())
}

/// Builds `P(G, S, H, χ)` with `χ` given in `G` ids.
///
/// Checks the skeleton conditions S2 and S3 and the coloring. The frame
/// condition S1 is not checked here; see [`crate::skeleton::is_skeleton`].
pub fn build_product(g: &Graph, s: &SkeletonSpec, h: &Graph, chi: &Coloring) -> Result<ProductGraph, ProductError> {
    let (overlap, s3) = structural_report(g, &s.frame, &s.connectors)?;
    if let Some(&v) = overlap.first() {
        return Err(ProductError::Overlap(v));
    }
    if let Some(&(vertex, degree)) = s3.first() {
        return Err(ProductError::Degree { vertex, degree });
    }
    check_coloring(g, s, h, chi)?;
    let q = quotient(g, &s.frame, &s.connectors)?;

    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for a in h.vertices() {
        by_color[chi.color(a)].push(a);
    }
    let mut vertices = Vec::new();
    for &u in &q.vertex_of {
        vertices.extend(by_color[u].iter().map(|&a| ProductVertex::V1 { u, a }));
    }
    vertices.extend(s.frame.iter().map(|&u| ProductVertex::V2 { u }));
    for (&u, assoc) in &q.association {
        match *assoc {
            Association::None => vertices.push(ProductVertex::V2 { u }),
            Association::Vertex { v } => vertices.extend(by_color[v].iter().map(|&a| ProductVertex::V3 { u, a })),
            Association::Edge { v, w } => {
                for &(a, b) in h.edges() {
                    let (ca, cb) = (chi.color(a), chi.color(b));
                    if (ca, cb) == (v, w) || (ca, cb) == (w, v) {
                        vertices.push(ProductVertex::V4 { u, e: (a, b) });
                    }
                }
            }
        }
    }
    vertices.sort_unstable();
    vertices.dedup();

    let index: HashMap<ProductVertex, usize> = vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut fiber: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    let mut class_index: [Vec<usize>; 4] = Default::default();
    for (i, x) in vertices.iter().enumerate() {
        fiber[x.first()].push(i);
        class_index[x.class() - 1].push(i);
    }
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        for &x in &fiber[u] {
            for &y in &fiber[v] {
                if vertices[x].compatible(&vertices[y], h) {
                    edges.push((x, y));
                }
            }
        }
    }
    let labels = vertices.iter().enumerate().map(|(i, x)| (i, x.to_string()));
    let graph = Graph::new(vertices.len(), edges)?.with_labels(labels)?;
    Ok(ProductGraph {
        graph,
        vertices,
        class_index,
        quotient: q,
        base: g.clone(),
        skeleton: s.clone(),
        h: h.clone(),
        chi: chi.clone(),
        index,
    })
}

impl ProductGraph {
    pub fn id_of(&self, x: &ProductVertex) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn skeleton(&self) -> &SkeletonSpec {
        &self.skeleton
    }

    pub fn h(&self) -> &Graph {
        &self.h
    }

    pub fn chi(&self) -> &Coloring {
        &self.chi
    }

    /// Ids of the frame copy `{(u, u) | u ∈ F}`, in the order of `F`.
    pub fn frame_copy(&self) -> Vec<usize> {
        self.skeleton
            .frame
            .iter()
            .map(|&u| self.index[&ProductVertex::V2 { u }])
            .collect()
    }

    /// `χ` re-expressed in quotient ids, for colored embeddings of the
    /// quotient into `H`.
    pub fn quotient_coloring(&self) -> Coloring {
        let colors = self
            .chi
            .colors()
            .iter()
            .map(|&c| self.quotient.quotient_id(c).expect("colors are free vertices"))
            .collect();
        Coloring::new(colors, self.quotient.quotient.vertex_count()).expect("quotient ids are in range")
    }

    /// `π1` as a map `V(P) → V(G)`.
    pub fn pi1(&self) -> VertexMap {
        VertexMap::new(self.vertices.iter().map(|x| x.first()).collect(), self.base.vertex_count())
            .expect("first coordinates are G vertices")
    }

    /// Vertices per class `V1..V4`.
    pub fn class_sizes(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|i| self.class_index[i].len())
    }

    /// Provenance record: one entry per product vertex.
    pub fn provenance(&self) -> Vec<ProductVertex> {
        self.vertices.clone()
    }

    /// Counts of edges per class pair `(i, j)`, `i ≤ j`.
    pub fn edge_families(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for &(x, y) in self.graph.edges() {
            let (a, b) = (self.vertices[x].class(), self.vertices[y].class());
            *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
        out
    }
}

/// `π1 ∘ f` for a map `f` into `P`.
pub fn project_first(p: &ProductGraph, f: &VertexMap) -> Result<VertexMap, GraphError> {
    f.then(&p.pi1())
}

/// `π2 ∘ f` for a map `f` into `P`.
pub fn project_second(p: &ProductGraph, f: &VertexMap) -> Vec<SecondCoord> {
    f.image().iter().map(|&x| p.vertices[x].second()).collect()
}

/// Lifts a colored embedding `h̄` of the quotient into `H` (in quotient ids)
/// to an embedding of `G` into `P`.
pub fn lift_embedding(p: &ProductGraph, h_bar: &VertexMap) -> Result<VertexMap, ProductError> {
    let q = &p.quotient;
    let chi_q = p.quotient_coloring();
    verify_map(&q.quotient, &p.h, h_bar, MapMode::ColEmb(&chi_q)).map_err(ProductError::BadQuotientMap)?;
    let hb = |g_vertex: usize| h_bar.get(q.quotient_id(g_vertex).expect("quotient vertex"));
    let mut image = Vec::with_capacity(p.base.vertex_count());
    for u in p.base.vertices() {
        let x = if let Some(a) = q.quotient_id(u).map(|qi| h_bar.get(qi)) {
            ProductVertex::V1 { u, a }
        } else {
            match q.association.get(&u) {
                None | Some(Association::None) => ProductVertex::V2 { u },
                Some(&Association::Vertex { v }) => ProductVertex::V3 { u, a: hb(v) },
                Some(&Association::Edge { v, w }) => {
                    let (a, b) = (hb(v), hb(w));
                    ProductVertex::V4 { u, e: (a.min(b), a.max(b)) }
                }
            }
        };
        image.push(p.id_of(&x).expect("lifted vertex exists in P"));
    }
    let f = VertexMap::new(image, p.graph.vertex_count())?;
    verify_map(&p.base, &p.graph, &f, MapMode::Emb).map_err(ProductError::LiftFailed)?;
    Ok(f)
}

/// Projects a homomorphism `h: G → P` whose image contains the frame copy to
/// a colored embedding of the quotient into `H` (in quotient ids).
pub fn project_embedding(p: &ProductGraph, h: &VertexMap) -> Result<VertexMap, ProductError> {
    verify_map(&p.base, &p.graph, h, MapMode::Hom).map_err(ProductError::NotHomomorphism)?;
    let image = h.image_set();
    for (&u, &x) in p.skeleton.frame.iter().zip(&p.frame_copy()) {
        if !image.contains(x) {
            return Err(ProductError::FrameNotCovered(u));
        }
    }
    let rho = project_first(p, h)?;
    let rho_inv = rho.inverse().ok_or(ProductError::NotAutomorphism)?;
    verify_map(&p.base, &p.base, &rho, MapMode::Emb).map_err(|_| ProductError::NotAutomorphism)?;
    let straight = rho_inv.then(h)?;
    let q = &p.quotient;
    let mut h_bar = Vec::with_capacity(q.vertex_of.len());
    for &u in &q.vertex_of {
        match p.vertices[straight.get(u)] {
            ProductVertex::V1 { a, .. } => h_bar.push(a),
            _ => unreachable!("straightened map sends free vertices into V1"),
        }
    }
    let h_bar = VertexMap::new(h_bar, p.h.vertex_count())?;
    let chi_q = p.quotient_coloring();
    verify_map(&q.quotient, &p.h, &h_bar, MapMode::ColEmb(&chi_q)).map_err(ProductError::ProjectFailed)?;
    Ok(h_bar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{grid_skeleton, make_grid, GridCoord};

    /// H = two disjoint 4-cycles a_i b_i d_i c_i colored by the quotient
    /// square a=(3,3), b=(3,5), c=(5,3), d=(5,5) of S_{7,8}.
    pub(crate) fn two_squares() -> (Graph, SkeletonSpec, Graph, Coloring) {
        let g = make_grid(7, 8).unwrap();
        let s = grid_skeleton(7, 8).unwrap();
        let id = |i, j| GridCoord { i, j }.id(8);
        let (a, b, c, d) = (id(3, 3), id(3, 5), id(5, 3), id(5, 5));
        let h = Graph::new(8, [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 7), (6, 7)]).unwrap();
        let chi = Coloring::new(vec![a, b, c, d, a, b, c, d], 56).unwrap();
        (g, s, h, chi)
    }

    #[test]
    fn two_squares_counts() {
        let (g, s, h, chi) = two_squares();
        let p = build_product(&g, &s, &h, &chi).unwrap();
        assert_eq!(p.class_sizes(), [8, s.frame.len(), 8, 8]);
        assert!(!p.edge_families().contains_key(&(3, 4)));
        for &(x, y) in p.graph.edges() {
            assert!(g.has_edge(p.vertices[x].first(), p.vertices[y].first()));
        }
    }

    #[test]
    fn lift_and_project_round_trip() {
        let (g, s, h, chi) = two_squares();
        let p = build_product(&g, &s, &h, &chi).unwrap();
        let q = &p.quotient;
        // Quotient ids follow G ids; map every quotient vertex to its copy in the first square.
        let h_bar: Vec<usize> = q.vertex_of.iter().map(|&u| chi.class(u)[0]).collect();
        let h_bar = VertexMap::new(h_bar, 8).unwrap();
        let f = lift_embedding(&p, &h_bar).unwrap();
        for &u in &s.frame {
            assert_eq!(p.vertices[f.get(u)], ProductVertex::V2 { u });
        }
        assert_eq!(project_embedding(&p, &f).unwrap(), h_bar);
    }

    #[test]
    fn empty_h_gives_copy_of_frame_part() {
        let (g, s, _, _) = two_squares();
        let p = build_product(&g, &s, &Graph::empty(0), &Coloring::new(vec![], 56).unwrap()).unwrap();
        assert_eq!(p.class_sizes(), [0, s.frame.len(), 0, 0]);
        let frame_part = g.induced_subgraph(&s.frame).unwrap();
        let firsts: Vec<usize> = p.vertices.iter().map(|x| x.first()).collect();
        assert_eq!(firsts, s.frame);
        assert_eq!(p.graph.edges(), frame_part.edges());
    }

    #[test]
    fn uncovered_frame_is_rejected() {
        let (g, s, h, chi) = two_squares();
        let p = build_product(&g, &s, &h, &chi).unwrap();
        let q = &p.quotient;
        let h_bar = VertexMap::new(q.vertex_of.iter().map(|&u| chi.class(u)[0]).collect(), 8).unwrap();
        let f = lift_embedding(&p, &h_bar).unwrap();
        // Send (1,1) to (2,1)'s image: breaks both the frame cover and injectivity.
        let mut image = f.image().to_vec();
        image[0] = image[GridCoord { i: 3, j: 1 }.id(8)];
        let bad = VertexMap::new(image, p.graph.vertex_count()).unwrap();
        assert!(project_embedding(&p, &bad).is_err());
    }

    #[test]
    fn coloring_into_frame_rejected() {
        let (g, s, h, _) = two_squares();
        let chi = Coloring::new(vec![0; 8], 56).unwrap();
        assert!(matches!(
            build_product(&g, &s, &h, &chi),
            Err(ProductError::ColorInSkeleton { vertex: 0, color: 0 })
        ));
    }
}
