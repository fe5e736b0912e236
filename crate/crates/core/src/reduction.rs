//! Reductions from homomorphism to colored embedding, and from colored
//! embedding of a grid or wall quotient to plain embedding of the full grid
//! or wall into a product graph.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{are_isomorphic, Coloring, Graph, GraphError, VertexMap};
use crate::patterns::{grid_skeleton, make_grid, make_wall, wall_skeleton, PatternError, PatternKind};
use crate::product::{build_product, lift_embedding, ProductError, ProductGraph};
use crate::skeleton::{quotient, SkeletonError, SkeletonSpec};
use crate::solver::{find_colored_embedding, verify_map, Limit, MapMode, Outcome, SearchConfig, SolverError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("coloring has {got} entries, target has {expected} vertices")]
    ColoringSize { got: usize, expected: usize },
    #[error("coloring uses a pattern of {got} vertices, pattern has {expected}")]
    ColoringPattern { got: usize, expected: usize },
    #[error("pattern with {n} vertices and {m} edges is not the quotient of any {family} skeleton")]
    NotRealizable { family: PatternKind, n: usize, m: usize },
    #[error("instance has no product provenance")]
    NoProvenance,
    #[error("lifted certificate failed verification: {0}")]
    Certificate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColEmbInstance {
    pub pattern: Graph,
    pub target: Graph,
    pub chi: Coloring,
}

impl ColEmbInstance {
    pub fn new(pattern: Graph, target: Graph, chi: Coloring) -> Result<Self, ReductionError> {
        if chi.target_size() != target.vertex_count() {
            return Err(ReductionError::ColoringSize {
                got: chi.target_size(),
                expected: target.vertex_count(),
            });
        }
        if chi.pattern_size() != pattern.vertex_count() {
            return Err(ReductionError::ColoringPattern {
                got: chi.pattern_size(),
                expected: pattern.vertex_count(),
            });
        }
        Ok(ColEmbInstance { pattern, target, chi })
    }
}

/// How an embedding instance was produced from a colored-embedding instance.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub family: PatternKind,
    pub s: usize,
    pub t: usize,
    pub skeleton: SkeletonSpec,
    pub product: ProductGraph,
    pub source: ColEmbInstance,
    /// Isomorphism from the source pattern onto the skeleton quotient.
    pub pattern_to_quotient: VertexMap,
}

#[derive(Debug, Clone)]
pub struct EmbInstance {
    pub pattern: Graph,
    pub target: Graph,
    pub provenance: Option<Box<Provenance>>,
}

/// Colored homomorphism `(G, id) → (H, χ_H)` to colored embedding.
///
/// `P` has one vertex `(χ_H(v), v)` per `H`-vertex `v`, with the same id `v`;
/// `(u1, v1)(u2, v2)` is an edge iff `u1u2 ∈ E(G)` and `v1v2 ∈ E(H)`.
pub fn hom_to_colemb(g: &Graph, h: &Graph, chi_h: &Coloring) -> Result<ColEmbInstance, ReductionError> {
    if chi_h.target_size() != h.vertex_count() {
        return Err(ReductionError::ColoringSize {
            got: chi_h.target_size(),
            expected: h.vertex_count(),
        });
    }
    if chi_h.pattern_size() != g.vertex_count() {
        return Err(ReductionError::ColoringPattern {
            got: chi_h.pattern_size(),
            expected: g.vertex_count(),
        });
    }
    let edges = h
        .edges()
        .iter()
        .filter(|&&(a, b)| g.has_edge(chi_h.color(a), chi_h.color(b)))
        .copied();
    let labels = h.vertices().map(|v| (v, format!("({},{})", chi_h.color(v), v)));
    let target = Graph::new(h.vertex_count(), edges)?.with_labels(labels)?;
    ColEmbInstance::new(g.clone(), target, chi_h.clone())
}

/// Smallest `(s, t)` whose grid skeleton has the `k × l` grid as quotient.
pub fn grid_params_for_quotient(k: usize, l: usize) -> (usize, usize) {
    (2 * k + 3, 2 * l + 4)
}

fn grid_candidates(n: usize) -> Vec<(usize, usize)> {
    (1..=n).filter(|k| n % k == 0).map(|k| (k, n / k)).filter(|&(k, l)| k <= l).collect()
}

/// Wall dimensions whose skeleton interior has `n` vertices, by increasing
/// `s + t`, then `s`.
fn wall_candidates(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 3..=n / 2 + 2 {
        for t in 4..=n + 3 {
            if (t - 3) * (2 * s - 4) == n {
                out.push((s, t));
            }
        }
    }
    out.sort_by_key(|&(s, t)| (s + t, s));
    out
}

struct Realization {
    s: usize,
    t: usize,
    g: Graph,
    skeleton: SkeletonSpec,
    iso: VertexMap,
}

fn realize(family: PatternKind, pattern: &Graph) -> Result<Realization, ReductionError> {
    let n = pattern.vertex_count();
    let candidates: Vec<(usize, usize)> = match family {
        PatternKind::Grid => grid_candidates(n)
            .into_iter()
            .map(|(k, l)| grid_params_for_quotient(k, l))
            .collect(),
        PatternKind::Wall => wall_candidates(n),
    };
    for (s, t) in candidates {
        let (g, skeleton) = match family {
            PatternKind::Grid => (make_grid(s, t)?, grid_skeleton(s, t)?),
            PatternKind::Wall => (make_wall(s, t)?, wall_skeleton(s, t)?),
        };
        let q = quotient(&g, &skeleton.frame, &skeleton.connectors)?;
        if let Some(iso) = are_isomorphic(pattern, &q.quotient)? {
            return Ok(Realization { s, t, g, skeleton, iso });
        }
    }
    Err(ReductionError::NotRealizable {
        family,
        n,
        m: pattern.edge_count(),
    })
}

/// Colored embedding into `H` to embedding of the full grid or wall into
/// `P(G, S, H, χ')`, where `χ'` transports `χ` along an isomorphism from the
/// pattern onto the skeleton quotient.
pub fn colemb_to_emb(family: PatternKind, inst: &ColEmbInstance) -> Result<EmbInstance, ReductionError> {
    let r = realize(family, &inst.pattern)?;
    let q = quotient(&r.g, &r.skeleton.frame, &r.skeleton.connectors)?;
    let colors = inst
        .chi
        .colors()
        .iter()
        .map(|&c| q.vertex_of[r.iso.get(c)])
        .collect();
    let chi_g = Coloring::new(colors, r.g.vertex_count())?;
    let product = build_product(&r.g, &r.skeleton, &inst.target, &chi_g)?;
    Ok(EmbInstance {
        pattern: r.g,
        target: product.graph.clone(),
        provenance: Some(Box::new(Provenance {
            family,
            s: r.s,
            t: r.t,
            skeleton: r.skeleton,
            product,
            source: inst.clone(),
            pattern_to_quotient: r.iso,
        })),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// Embedding `G → P` obtained by lifting a quotient-side solution, plus
    /// that solution (in source pattern ids).
    Yes { certificate: VertexMap, colored: VertexMap },
    /// The quotient-side search completed without a solution.
    No { nodes: u64 },
    Indeterminate(Limit),
}

impl Decision {
    pub fn answer(&self) -> Option<bool> {
        match self {
            Decision::Yes { .. } => Some(true),
            Decision::No { .. } => Some(false),
            Decision::Indeterminate(_) => None,
        }
    }
}

/// Decides an instance produced by [`colemb_to_emb`] on the quotient side.
/// A yes answer carries a verified embedding of the pattern into the target.
pub fn decide_via_reduction(inst: &EmbInstance, cfg: &SearchConfig) -> Result<Decision, ReductionError> {
    let prov = inst.provenance.as_ref().ok_or(ReductionError::NoProvenance)?;
    let src = &prov.source;
    let search = find_colored_embedding(&src.pattern, &src.target, &src.chi, cfg)?;
    match search.outcome {
        Outcome::Found(colored) => {
            let to_pattern = prov.pattern_to_quotient.inverse().expect("isomorphism");
            let h_bar = to_pattern.then(&colored)?;
            let certificate = lift_embedding(&prov.product, &h_bar)?;
            verify_map(&inst.pattern, &inst.target, &certificate, MapMode::Emb)
                .map_err(|v| ReductionError::Certificate(v.to_string()))?;
            Ok(Decision::Yes { certificate, colored })
        }
        Outcome::NoSolution => Ok(Decision::No { nodes: search.nodes }),
        Outcome::LimitExceeded(l) => Ok(Decision::Indeterminate(l)),
    }
}
