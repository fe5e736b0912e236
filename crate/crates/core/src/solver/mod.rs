//! Exact search for homomorphisms, embeddings, colored embeddings,
//! non-surjective endomorphisms and cores.
//!
//! All searches share one backtracking engine. A search that hits a node or
//! time limit reports [`Outcome::LimitExceeded`]; only [`Outcome::NoSolution`]
//! is a proof that no map exists.

mod engine;

use std::time::Duration;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Coloring, Graph, GraphError, VertexMap};

pub(crate) use engine::{run, Flow, Problem};

/// Vertex-count guard for [`compute_core`].
pub const CORE_LIMIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariableOrder {
    /// BFS from the highest-degree pattern vertex; fixed for the whole search.
    #[default]
    StaticBfs,
    /// Smallest live candidate set first, static order breaking ties.
    MinRemainingDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchConfig {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub variable_order: VariableOrder,
    /// Split the top-level branching across the rayon pool.
    pub parallel: bool,
}

impl SearchConfig {
    pub fn with_node_limit(mut self, n: u64) -> Self {
        self.node_limit = Some(n);
        self
    }

    pub fn with_time_limit(mut self, d: Duration) -> Self {
        self.time_limit = Some(d);
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limit {
    Nodes(u64),
    Time(Duration),
}

impl std::fmt::Display for Limit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Limit::Nodes(n) => write!(f, "node limit {n}"),
            Limit::Time(d) => write!(f, "time limit {:.3}s", d.as_secs_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Found(VertexMap),
    NoSolution,
    LimitExceeded(Limit),
}

/// Outcome of one search plus the number of search nodes expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Search {
    pub outcome: Outcome,
    pub nodes: u64,
}

impl Search {
    pub fn found(&self) -> Option<&VertexMap> {
        match &self.outcome {
            Outcome::Found(m) => Some(m),
            _ => None,
        }
    }

    pub fn into_found(self) -> Option<VertexMap> {
        match self.outcome {
            Outcome::Found(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_none(&self) -> bool {
        self.outcome == Outcome::NoSolution
    }

    /// `Some(true)` for found, `Some(false)` for a completed search without a
    /// solution, `None` when a limit was hit.
    pub fn decided(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Found(_) => Some(true),
            Outcome::NoSolution => Some(false),
            Outcome::LimitExceeded(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("coloring covers {got} target vertices, target has {expected}")]
    ColoringSize { got: usize, expected: usize },
    #[error("coloring uses {got} pattern colors, pattern has {expected} vertices")]
    ColoringPattern { got: usize, expected: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("search stopped: {0}")]
    Limit(Limit),
}

fn finish(flow: Flow, nodes: u64, codomain: usize) -> Search {
    let outcome = match flow {
        Flow::Found(image) => Outcome::Found(VertexMap::new(image, codomain).expect("engine maps into the target")),
        Flow::Exhausted => Outcome::NoSolution,
        Flow::Aborted(l) => Outcome::LimitExceeded(l),
    };
    Search { outcome, nodes }
}

pub fn find_homomorphism(g: &Graph, h: &Graph, cfg: &SearchConfig) -> Search {
    let p = Problem::new(g, h, false);
    let (flow, nodes) = run(&p, cfg);
    finish(flow, nodes, h.vertex_count())
}

pub fn find_embedding(g: &Graph, h: &Graph, cfg: &SearchConfig) -> Search {
    if g.vertex_count() > h.vertex_count() || g.edge_count() > h.edge_count() {
        return Search {
            outcome: Outcome::NoSolution,
            nodes: 0,
        };
    }
    let p = Problem::new(g, h, true);
    let (flow, nodes) = run(&p, cfg);
    finish(flow, nodes, h.vertex_count())
}

fn check_coloring(g: &Graph, h: &Graph, chi: &Coloring) -> Result<(), SolverError> {
    if chi.target_size() != h.vertex_count() {
        return Err(SolverError::ColoringSize {
            got: chi.target_size(),
            expected: h.vertex_count(),
        });
    }
    if chi.pattern_size() != g.vertex_count() {
        return Err(SolverError::ColoringPattern {
            got: chi.pattern_size(),
            expected: g.vertex_count(),
        });
    }
    Ok(())
}

/// Embedding `f` with `chi(f(v)) = v` for every pattern vertex `v`.
pub fn find_colored_embedding(
    g: &Graph,
    h: &Graph,
    chi: &Coloring,
    cfg: &SearchConfig,
) -> Result<Search, SolverError> {
    check_coloring(g, h, chi)?;
    let mut p = Problem::new(g, h, true);
    for (v, dom) in p.domains.iter_mut().enumerate() {
        dom.clear();
        for w in chi.class(v) {
            dom.insert(w);
        }
    }
    let (flow, nodes) = run(&p, cfg);
    Ok(finish(flow, nodes, h.vertex_count()))
}

/// Searches for an endomorphism `h` of `g` whose image contains `frame` but
/// which is not surjective. `NoSolution` means `frame` is a frame of `g`.
///
/// A non-surjective map misses some vertex outside `frame`, so the search
/// runs once per candidate missing vertex `x` with `x` removed from every
/// domain.
pub fn find_endo_counterexample(g: &Graph, frame: &[usize], cfg: &SearchConfig) -> Result<Search, SolverError> {
    for &f in frame {
        g.check_vertex(f)?;
    }
    let n = g.vertex_count();
    let mut in_frame = FixedBitSet::with_capacity(n);
    for &f in frame {
        in_frame.insert(f);
    }
    let mut cover: Vec<usize> = in_frame.ones().collect();
    cover.dedup();
    let mut total = 0;
    let mut limit = None;
    for x in g.vertices().filter(|&x| !in_frame.contains(x)) {
        let mut p = Problem::new(g, g, false);
        for dom in &mut p.domains {
            dom.set(x, false);
        }
        p.cover = cover.clone();
        let (flow, nodes) = run(&p, cfg);
        total += nodes;
        match flow {
            Flow::Found(image) => return Ok(finish(Flow::Found(image), total, n)),
            Flow::Aborted(l) => limit = Some(l),
            Flow::Exhausted => {}
        }
    }
    Ok(Search {
        outcome: limit.map_or(Outcome::NoSolution, Outcome::LimitExceeded),
        nodes: total,
    })
}

/// The core of `g` as an induced subgraph (labels kept), with the original
/// ids of its vertices.
pub fn compute_core(g: &Graph, cfg: &SearchConfig) -> Result<(Graph, Vec<usize>), SolverError> {
    if g.vertex_count() > CORE_LIMIT {
        return Err(GraphError::TooLarge {
            n: g.vertex_count(),
            limit: CORE_LIMIT,
        }
        .into());
    }
    let mut current = g.clone();
    let mut ids: Vec<usize> = g.vertices().collect();
    loop {
        let search = find_endo_counterexample(&current, &[], cfg)?;
        match search.outcome {
            Outcome::Found(h) => {
                let keep: Vec<usize> = h.image_set().ones().collect();
                current = current.induced_subgraph(&keep)?;
                ids = keep.iter().map(|&k| ids[k]).collect();
            }
            Outcome::NoSolution => return Ok((current, ids)),
            Outcome::LimitExceeded(l) => return Err(SolverError::Limit(l)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum MapMode<'a> {
    Hom,
    Emb,
    ColEmb(&'a Coloring),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    DomainSize { got: usize, expected: usize },
    CodomainSize { got: usize, expected: usize },
    EdgeNotPreserved { u: usize, v: usize },
    NotInjective { u: usize, v: usize },
    WrongColor { vertex: usize, image: usize, color: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DomainSize { got, expected } => write!(f, "map covers {got} vertices, pattern has {expected}"),
            Violation::CodomainSize { got, expected } => write!(f, "map codomain has {got} vertices, target has {expected}"),
            Violation::EdgeNotPreserved { u, v } => write!(f, "edge {u}-{v} is not mapped to an edge"),
            Violation::NotInjective { u, v } => write!(f, "vertices {u} and {v} share an image"),
            Violation::WrongColor { vertex, image, color } => {
                write!(f, "vertex {vertex} maps to {image}, which has color {color}")
            }
        }
    }
}

/// Checks `f` against the requirements of `mode`; returns the first violation.
pub fn verify_map(g: &Graph, h: &Graph, f: &VertexMap, mode: MapMode<'_>) -> Result<(), Violation> {
    if f.domain_size() != g.vertex_count() {
        return Err(Violation::DomainSize {
            got: f.domain_size(),
            expected: g.vertex_count(),
        });
    }
    if f.codomain_size() != h.vertex_count() {
        return Err(Violation::CodomainSize {
            got: f.codomain_size(),
            expected: h.vertex_count(),
        });
    }
    for &(u, v) in g.edges() {
        if !h.has_edge(f.get(u), f.get(v)) {
            return Err(Violation::EdgeNotPreserved { u, v });
        }
    }
    if matches!(mode, MapMode::Emb | MapMode::ColEmb(_)) {
        let mut first = vec![usize::MAX; h.vertex_count()];
        for v in g.vertices() {
            let w = f.get(v);
            if first[w] != usize::MAX {
                return Err(Violation::NotInjective { u: first[w], v });
            }
            first[w] = v;
        }
    }
    if let MapMode::ColEmb(chi) = mode {
        for v in g.vertices() {
            let image = f.get(v);
            let color = chi.colors().get(image).copied().unwrap_or(usize::MAX);
            if color != v {
                return Err(Violation::WrongColor { vertex: v, image, color });
            }
        }
    }
    Ok(())
}
