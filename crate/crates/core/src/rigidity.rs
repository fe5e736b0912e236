//! Rigidity of skeletons: an embedding `G → P(G, S, H, χ)` that misses part
//! of the frame copy `{(u, u) | u ∈ F}` is a counterexample.
//!
//! The exhaustive check relies on monotonicity in `H`: adding vertices or
//! edges to `H` only adds vertices and edges to `P` and never touches the
//! frame copy, so a counterexample on at most `2|V(G)|` touched vertices
//! survives inside the complete graph on `2|V(G)|` vertices with a suitable
//! coloring. Only the color multiplicities of that complete graph matter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Coloring, Graph, GraphError, VertexMap};
use crate::product::{build_product, ProductError, ProductGraph, ProductVertex};
use crate::skeleton::{is_skeleton, FrameConfig, SkeletonError, SkeletonSpec};
use crate::solver::{run, verify_map, Flow, Limit, MapMode, Problem, SearchConfig, VariableOrder};

/// Default vertex-count guard for exhaustive checks.
pub const EXHAUSTIVE_GUARD: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("exhaustive rigidity check on {n} vertices exceeds the guard of {guard}")]
    Guard { n: usize, guard: usize },
    #[error("not a skeleton: {0}")]
    NotSkeleton(String),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityConfig {
    /// Per-search limits for each embedding search.
    pub search: SearchConfig,
    pub guard: usize,
    /// Evaluate random samples on the rayon pool.
    pub parallel: bool,
}

impl Default for RigidityConfig {
    fn default() -> Self {
        RigidityConfig {
            search: SearchConfig {
                variable_order: VariableOrder::MinRemainingDomain,
                ..SearchConfig::default()
            },
            guard: EXHAUSTIVE_GUARD,
            parallel: false,
        }
    }
}

/// A witness that a skeleton is not rigid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub h: Graph,
    /// Colors in `G` ids.
    pub chi: Coloring,
    /// Embedding `G → P`, in product ids.
    pub embedding: VertexMap,
    /// Product vertex behind each image, for reporting.
    pub images: Vec<ProductVertex>,
    /// Frame vertices whose copy `(u, u)` is not hit.
    pub missed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RigidityStatus {
    RigidExhaustive,
    Counterexample(Box<Counterexample>),
    NoCounterexampleFound { samples: usize, seed: u64 },
    Indeterminate { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityVerdict {
    pub status: RigidityStatus,
    /// Largest `|V(H)|` examined.
    pub search_bound: usize,
}

impl RigidityVerdict {
    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.status {
            RigidityStatus::Counterexample(c) => Some(c),
            _ => None,
        }
    }
}

enum Violation {
    Found(VertexMap),
    None,
    Limit(Limit),
}

/// Searches for an embedding `G → P` that misses some `(u, u)`, `u ∈ F`.
/// Branches that would cover the whole frame copy are cut early.
fn find_violation(p: &ProductGraph, cfg: &SearchConfig) -> Violation {
    if p.frame_copy().is_empty() {
        return Violation::None;
    }
    let g = p.base();
    let mut prob = Problem::new(g, &p.graph, true);
    prob.avoid_full_cover = p.frame_copy().to_vec();
    match run(&prob, cfg).0 {
        Flow::Found(image) => Violation::Found(VertexMap::new(image, p.graph.vertex_count()).expect("engine output")),
        Flow::Aborted(l) => Violation::Limit(l),
        Flow::Exhausted => Violation::None,
    }
}

fn make_counterexample(p: &ProductGraph, embedding: VertexMap) -> Counterexample {
    let image = embedding.image_set();
    let missed = p
        .skeleton()
        .frame
        .iter()
        .zip(p.frame_copy())
        .filter(|&(_, x)| !image.contains(x))
        .map(|(&u, _)| u)
        .collect();
    Counterexample {
        h: p.h().clone(),
        chi: p.chi().clone(),
        images: embedding.image().iter().map(|&x| p.vertices[x]).collect(),
        embedding,
        missed,
    }
}

impl Counterexample {
    /// Rebuilds the product and checks the witness end to end.
    pub fn verify(&self, g: &Graph, s: &SkeletonSpec) -> Result<(), String> {
        let p = build_product(g, s, &self.h, &self.chi).map_err(|e| e.to_string())?;
        verify_map(g, &p.graph, &self.embedding, MapMode::Emb).map_err(|v| v.to_string())?;
        let image = self.embedding.image_set();
        let missed: Vec<usize> = s
            .frame
            .iter()
            .zip(p.frame_copy())
            .filter(|&(_, x)| !image.contains(x))
            .map(|(&u, _)| u)
            .collect();
        if missed.is_empty() {
            return Err("embedding covers the whole frame copy".into());
        }
        if missed != self.missed {
            return Err(format!("recorded missed set {:?} differs from {:?}", self.missed, missed));
        }
        Ok(())
    }

    /// `H`-vertices touched by the embedding, ascending.
    pub fn touched(&self) -> Vec<usize> {
        let mut x = Vec::new();
        for v in &self.images {
            match *v {
                ProductVertex::V1 { a, .. } | ProductVertex::V3 { a, .. } => x.push(a),
                ProductVertex::V4 { e, .. } => x.extend([e.0, e.1]),
                ProductVertex::V2 { .. } => {}
            }
        }
        x.sort_unstable();
        x.dedup();
        x
    }

    /// The same embedding, read into the product over `H[X]` for the touched
    /// set `X`.
    pub fn restrict(&self, g: &Graph, s: &SkeletonSpec) -> Result<Counterexample, RigidityError> {
        let keep = self.touched();
        let mut new_id = vec![usize::MAX; self.h.vertex_count()];
        for (i, &a) in keep.iter().enumerate() {
            new_id[a] = i;
        }
        let h = self.h.induced_subgraph(&keep)?;
        let chi = Coloring::new(keep.iter().map(|&a| self.chi.color(a)).collect(), g.vertex_count())?;
        let p = build_product(g, s, &h, &chi)?;
        let rename = |v: ProductVertex| match v {
            ProductVertex::V1 { u, a } => ProductVertex::V1 { u, a: new_id[a] },
            ProductVertex::V2 { u } => ProductVertex::V2 { u },
            ProductVertex::V3 { u, a } => ProductVertex::V3 { u, a: new_id[a] },
            ProductVertex::V4 { u, e } => {
                let (a, b) = (new_id[e.0], new_id[e.1]);
                ProductVertex::V4 { u, e: (a.min(b), a.max(b)) }
            }
        };
        let image: Vec<usize> = self
            .images
            .iter()
            .map(|&v| p.id_of(&rename(v)).expect("restricted product keeps touched vertices"))
            .collect();
        let embedding = VertexMap::new(image, p.graph.vertex_count())?;
        Ok(make_counterexample(&p, embedding))
    }
}

fn require_skeleton(g: &Graph, s: &SkeletonSpec, frame_cfg: &FrameConfig) -> Result<(), RigidityError> {
    let r = is_skeleton(g, &s.frame, &s.connectors, frame_cfg)?;
    match r.is_skeleton() {
        Some(true) => Ok(()),
        Some(false) => Err(RigidityError::NotSkeleton(format!(
            "S1 {:?}, F∩D {:?}, S3 {:?}",
            r.s1.decided(),
            r.s2_overlap,
            r.s3_violations
        ))),
        None => Err(RigidityError::NotSkeleton("frame check indeterminate".into())),
    }
}

/// All multiplicity vectors of length `k` summing to `n`, lexicographic.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=n {
            cur.push(x);
            rec(n - x, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

fn complete(n: usize) -> Graph {
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("complete graph")
}

/// Tries to make a counterexample smaller: restrict to the touched vertices,
/// then drop edges and vertices of `H` one at a time while a counterexample
/// remains.
pub fn shrink_counterexample(
    g: &Graph,
    s: &SkeletonSpec,
    cex: Counterexample,
    cfg: &SearchConfig,
) -> Result<Counterexample, RigidityError> {
    let mut best = cex.restrict(g, s)?;
    let attempt = |h: Graph, chi: Coloring| -> Result<Option<Counterexample>, RigidityError> {
        let p = build_product(g, s, &h, &chi)?;
        Ok(match find_violation(&p, cfg) {
            Violation::Found(f) => Some(make_counterexample(&p, f)),
            _ => None,
        })
    };
    let mut i = 0;
    while i < best.h.edge_count() {
        let edges: Vec<(usize, usize)> = best
            .h
            .edges()
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &e)| e)
            .collect();
        let h = Graph::new(best.h.vertex_count(), edges)?;
        match attempt(h, best.chi.clone())? {
            Some(c) => best = c.restrict(g, s)?,
            None => i += 1,
        }
    }
    let mut a = 0;
    while a < best.h.vertex_count() {
        let keep: Vec<usize> = best.h.vertices().filter(|&x| x != a).collect();
        let h = best.h.induced_subgraph(&keep)?;
        let chi = Coloring::new(keep.iter().map(|&x| best.chi.color(x)).collect(), g.vertex_count())?;
        match attempt(h, chi)? {
            Some(c) => best = c.restrict(g, s)?,
            None => a += 1,
        }
    }
    Ok(best)
}

/// Exact rigidity check for graphs up to `cfg.guard` vertices.
pub fn is_rigid_exhaustive(g: &Graph, s: &SkeletonSpec, cfg: &RigidityConfig) -> Result<RigidityVerdict, RigidityError> {
    let n = g.vertex_count();
    if n > cfg.guard {
        return Err(RigidityError::Guard { n, guard: cfg.guard });
    }
    require_skeleton(g, s, &FrameConfig::unguarded(cfg.search.clone()))?;
    let bound = 2 * n;
    if s.frame.is_empty() {
        return Ok(RigidityVerdict {
            status: RigidityStatus::RigidExhaustive,
            search_bound: bound,
        });
    }
    let free = s.free_vertices(n);
    // Without free vertices only the empty H admits a coloring.
    let (size, comps) = if free.is_empty() {
        (0, vec![Vec::new()])
    } else {
        (bound, compositions(bound, free.len()))
    };
    let h = complete(size);
    let mut limit = None;
    for comp in comps {
        let colors: Vec<usize> = comp
            .iter()
            .zip(&free)
            .flat_map(|(&m, &c)| std::iter::repeat_n(c, m))
            .collect();
        let chi = Coloring::new(colors, n)?;
        let p = build_product(g, s, &h, &chi)?;
        match find_violation(&p, &cfg.search) {
            Violation::Found(f) => {
                let cex = shrink_counterexample(g, s, make_counterexample(&p, f), &cfg.search)?;
                return Ok(RigidityVerdict {
                    status: RigidityStatus::Counterexample(Box::new(cex)),
                    search_bound: size,
                });
            }
            Violation::Limit(l) => limit = Some(l),
            Violation::None => {}
        }
    }
    let status = match limit {
        Some(l) => RigidityStatus::Indeterminate {
            reason: format!("an embedding search stopped at its {l}"),
        },
        None => RigidityStatus::RigidExhaustive,
    };
    Ok(RigidityVerdict {
        status,
        search_bound: size,
    })
}

/// Literal form of the check: every graph on `[m]`, `m ≤ max_h`, under every
/// coloring. Exponential; intended as a cross-check on very small inputs.
pub fn find_counterexample_literal(
    g: &Graph,
    s: &SkeletonSpec,
    max_h: usize,
    cfg: &SearchConfig,
) -> Result<Option<Counterexample>, RigidityError> {
    let n = g.vertex_count();
    let free = s.free_vertices(n);
    for m in 0..=max_h {
        if m > 0 && free.is_empty() {
            break;
        }
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let colorings = free.len().pow(m as u32);
        for mask in 0u64..(1u64 << pairs.len()) {
            let edges = pairs.iter().enumerate().filter(|&(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e);
            let h = Graph::new(m, edges)?;
            for code in 0..colorings {
                let mut c = code;
                let colors = (0..m)
                    .map(|_| {
                        let x = free[c % free.len()];
                        c /= free.len();
                        x
                    })
                    .collect();
                let chi = Coloring::new(colors, n)?;
                let p = build_product(g, s, &h, &chi)?;
                if let Violation::Found(f) = find_violation(&p, cfg) {
                    return Ok(Some(make_counterexample(&p, f)));
                }
            }
        }
    }
    Ok(None)
}

/// Draws the `index`-th random instance for a seed: `|V(H)|` uniform in
/// `[1, max_h]`, edge probability uniform in `{0.1, ..., 0.9}`, colors
/// uniform over the free vertices.
pub fn random_instance(free: &[usize], g_size: usize, max_h: usize, seed: u64, index: u64) -> (Graph, Coloring) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let m = rng.random_range(1..=max_h.max(1));
    let p = f64::from(rng.random_range(1..=9u32)) / 10.0;
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let colors = (0..m).map(|_| free[rng.random_range(0..free.len())]).collect();
    (
        Graph::new(m, edges).expect("random graph"),
        Coloring::new(colors, g_size).expect("free vertices are in range"),
    )
}

enum SampleResult {
    Counterexample(Box<Counterexample>),
    Limit,
}

/// Randomized falsification. Reproducible from `(samples, seed, max_h)`;
/// the reported counterexample is the one with the smallest sample index.
pub fn rigidity_random_search(
    g: &Graph,
    s: &SkeletonSpec,
    samples: usize,
    seed: u64,
    max_h: usize,
    cfg: &RigidityConfig,
) -> Result<RigidityVerdict, RigidityError> {
    let n = g.vertex_count();
    let free = s.free_vertices(n);
    if s.frame.is_empty() {
        return Ok(RigidityVerdict {
            status: RigidityStatus::NoCounterexampleFound { samples, seed },
            search_bound: max_h,
        });
    }
    if free.is_empty() {
        let p = build_product(g, s, &Graph::empty(0), &Coloring::new(vec![], n)?)?;
        let status = match find_violation(&p, &cfg.search) {
            Violation::Found(f) => RigidityStatus::Counterexample(Box::new(make_counterexample(&p, f))),
            Violation::Limit(l) => RigidityStatus::Indeterminate { reason: l.to_string() },
            Violation::None => RigidityStatus::NoCounterexampleFound { samples, seed },
        };
        return Ok(RigidityVerdict { status, search_bound: 0 });
    }
    let sample = |i: usize| -> Result<Option<SampleResult>, RigidityError> {
        let (h, chi) = random_instance(&free, n, max_h, seed, i as u64);
        let p = build_product(g, s, &h, &chi)?;
        Ok(match find_violation(&p, &cfg.search) {
            Violation::Found(f) => Some(SampleResult::Counterexample(Box::new(make_counterexample(&p, f)))),
            Violation::Limit(_) => Some(SampleResult::Limit),
            Violation::None => None,
        })
    };
    let first_cex = |i: usize| match sample(i) {
        Ok(Some(SampleResult::Counterexample(c))) => Some(Ok(c)),
        Ok(_) => None,
        Err(e) => Some(Err(e)),
    };
    let found = if cfg.parallel {
        (0..samples).into_par_iter().find_map_first(first_cex)
    } else {
        (0..samples).find_map(first_cex)
    };
    if let Some(c) = found {
        return Ok(RigidityVerdict {
            status: RigidityStatus::Counterexample(c?),
            search_bound: max_h,
        });
    }
    // No counterexample: count how many samples were cut short.
    let limited = if cfg.search.node_limit.is_some() || cfg.search.time_limit.is_some() {
        let hit = |i: usize| matches!(sample(i), Ok(Some(SampleResult::Limit)));
        if cfg.parallel {
            (0..samples).into_par_iter().filter(|&i| hit(i)).count()
        } else {
            (0..samples).filter(|&i| hit(i)).count()
        }
    } else {
        0
    };
    let status = if limited > 0 {
        RigidityStatus::Indeterminate {
            reason: format!("{limited} of {samples} samples hit the search limit"),
        }
    } else {
        RigidityStatus::NoCounterexampleFound { samples, seed }
    };
    Ok(RigidityVerdict {
        status,
        search_bound: max_h,
    })
}

/// All skeletons of `g` that are rigid, in lexicographic order of `(F, D)`.
pub fn list_rigid_skeletons<'a>(
    g: &'a Graph,
    cfg: &'a RigidityConfig,
) -> Result<impl Iterator<Item = Result<SkeletonSpec, RigidityError>> + 'a, RigidityError> {
    let n = g.vertex_count();
    if n > cfg.guard {
        return Err(RigidityError::Guard { n, guard: cfg.guard });
    }
    let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            let (mut f, mut d) = (Vec::new(), Vec::new());
            for v in 0..n {
                match code % 3 {
                    1 => f.push(v),
                    2 => d.push(v),
                    _ => {}
                }
                code /= 3;
            }
            (f, d)
        })
        .collect();
    pairs.sort();
    let frame_cfg = FrameConfig::unguarded(cfg.search.clone());
    Ok(pairs.into_iter().filter_map(move |(f, d)| {
        let s = SkeletonSpec::new(f, d);
        match is_skeleton(g, &s.frame, &s.connectors, &frame_cfg) {
            Err(e) => return Some(Err(e.into())),
            Ok(r) if r.is_skeleton() != Some(true) => return None,
            Ok(_) => {}
        }
        match is_rigid_exhaustive(g, &s, cfg) {
            Ok(v) if v.status == RigidityStatus::RigidExhaustive => Some(Ok(s)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn k(n: usize) -> Graph {
        complete(n)
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(4, 2).len(), 5);
        assert_eq!(compositions(8, 3).len(), 45);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(3, 0).is_empty());
    }

    #[test]
    fn p3_ends_not_rigid() {
        let g = p3();
        let s = SkeletonSpec::new(vec![0, 2], vec![]);
        let v = is_rigid_exhaustive(&g, &s, &RigidityConfig::default()).unwrap();
        let c = v.counterexample().expect("counterexample");
        assert_eq!(c.h.vertex_count(), 2);
        assert_eq!(c.h.edge_count(), 0);
        assert_eq!(c.chi.colors(), &[1, 1]);
        c.verify(&g, &s).unwrap();
        c.restrict(&g, &s).unwrap().verify(&g, &s).unwrap();
    }

    #[test]
    fn k3_empty_frame_rigid() {
        let s = SkeletonSpec::new(vec![], vec![]);
        let v = is_rigid_exhaustive(&k(3), &s, &RigidityConfig::default()).unwrap();
        assert_eq!(v.status, RigidityStatus::RigidExhaustive);
    }

    #[test]
    fn full_frame_rigid() {
        let s = SkeletonSpec::new(vec![0, 1, 2], vec![]);
        let v = is_rigid_exhaustive(&p3(), &s, &RigidityConfig::default()).unwrap();
        assert_eq!(v.status, RigidityStatus::RigidExhaustive);
    }

    #[test]
    fn guard() {
        let s = SkeletonSpec::new(vec![], vec![]);
        assert!(matches!(
            is_rigid_exhaustive(&Graph::empty(5), &s, &RigidityConfig::default()),
            Err(RigidityError::Guard { n: 5, guard: 4 })
        ));
    }

    #[test]
    fn literal_agrees_on_tiny_graphs() {
        let cfg = RigidityConfig::default();
        for g in [k(2), p3(), k(3)] {
            let list: Vec<SkeletonSpec> = list_rigid_skeletons(&g, &cfg).unwrap().map(Result::unwrap).collect();
            let n = g.vertex_count();
            for code in 0..3usize.pow(n as u32) {
                let (mut f, mut d, mut c) = (Vec::new(), Vec::new(), code);
                for v in 0..n {
                    match c % 3 {
                        1 => f.push(v),
                        2 => d.push(v),
                        _ => {}
                    }
                    c /= 3;
                }
                let s = SkeletonSpec::new(f, d);
                let r = is_skeleton(&g, &s.frame, &s.connectors, &FrameConfig::default()).unwrap();
                if r.is_skeleton() != Some(true) {
                    assert!(!list.contains(&s));
                    continue;
                }
                let literal = find_counterexample_literal(&g, &s, (2 * n).min(4), &cfg.search).unwrap();
                assert_eq!(literal.is_none(), list.contains(&s), "{s:?}");
            }
        }
    }

    #[test]
    fn lists() {
        let cfg = RigidityConfig::default();
        let k2: Vec<_> = list_rigid_skeletons(&k(2), &cfg).unwrap().map(Result::unwrap).collect();
        assert!(k2.contains(&SkeletonSpec::new(vec![0, 1], vec![])));
        let k3: Vec<_> = list_rigid_skeletons(&k(3), &cfg).unwrap().map(Result::unwrap).collect();
        assert!(k3.contains(&SkeletonSpec::new(vec![], vec![])));
        let p: Vec<_> = list_rigid_skeletons(&p3(), &cfg).unwrap().map(Result::unwrap).collect();
        assert!(!p.contains(&SkeletonSpec::new(vec![0, 2], vec![])));
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| (&a.frame, &a.connectors).cmp(&(&b.frame, &b.connectors)));
        assert_eq!(p, sorted);
    }

    #[test]
    fn random_search_finds_p3_counterexample() {
        let g = p3();
        let s = SkeletonSpec::new(vec![0, 2], vec![]);
        let v = rigidity_random_search(&g, &s, 200, 0, 6, &RigidityConfig::default()).unwrap();
        let c = v.counterexample().expect("counterexample");
        c.verify(&g, &s).unwrap();
        let again = rigidity_random_search(&g, &s, 200, 0, 6, &RigidityConfig::default()).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn random_instances_reproducible() {
        let a = random_instance(&[3, 5], 8, 6, 42, 7);
        let b = random_instance(&[3, 5], 8, 6, 42, 7);
        assert_eq!(a, b);
        assert!((1..=6).contains(&a.0.vertex_count()));
        assert!(a.1.colors().iter().all(|c| [3, 5].contains(c)));
    }
}
