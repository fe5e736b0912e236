//! Backtracking search with forward checking over bitset candidate rows.
//!
//! Pattern vertices are variables, target vertices are values. Every
//! assignment `v -> w` narrows each unassigned `x` to the target ball of radius
//! `dist(v, x)` around `w` (the open neighborhood when the distance is 1):
//! homomorphisms never increase distances, so this is sound for every mode.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::{Limit, SearchConfig, VariableOrder};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph};

type Block = usize;
const BITS: usize = Block::BITS as usize;

const UNASSIGNED: usize = usize::MAX;

/// Leaf predicate; a full assignment is reported only if it returns true.
pub(crate) type Accept<'a> = &'a (dyn Fn(&[usize]) -> bool + Sync);

pub(crate) struct Problem<'a> {
    pub pattern: &'a Graph,
    pub target: &'a Graph,
    pub injective: bool,
    /// Initial candidate sets, one per pattern vertex.
    pub domains: Vec<FixedBitSet>,
    /// Target vertices that must appear in the image.
    pub cover: Vec<usize>,
    /// Prune any branch whose image already contains all of these.
    pub avoid_full_cover: Vec<usize>,
    pub accept: Option<Accept<'a>>,
}

impl<'a> Problem<'a> {
    pub fn new(pattern: &'a Graph, target: &'a Graph, injective: bool) -> Self {
        let mut all = FixedBitSet::with_capacity(target.vertex_count());
        all.insert_range(..);
        let domains = pattern
            .vertices()
            .map(|v| {
                let mut dom = all.clone();
                if injective {
                    // An injective edge-preserving map cannot lower degrees.
                    for w in target.vertices().filter(|&w| target.degree(w) < pattern.degree(v)) {
                        dom.set(w, false);
                    }
                }
                dom
            })
            .collect();
        Problem {
            pattern,
            target,
            injective,
            domains,
            cover: Vec::new(),
            avoid_full_cover: Vec::new(),
            accept: None,
        }
    }
}

pub(crate) enum Flow {
    Found(Vec<usize>),
    Exhausted,
    Aborted(Limit),
}

/// Target balls: `ball(w, d)` for every `d` up to the eccentricity of `w`.
struct Balls {
    words: usize,
    per_vertex: Vec<Vec<Block>>,
    radius: Vec<usize>,
}

impl Balls {
    fn new(g: &Graph, words: usize) -> Self {
        let mut per_vertex = Vec::with_capacity(g.vertex_count());
        let mut radius = Vec::with_capacity(g.vertex_count());
        for w in g.vertices() {
            let dist = g.bfs(w);
            let ecc = dist.iter().flatten().copied().max().unwrap_or(0);
            let mut rows = vec![0 as Block; words * (ecc + 1)];
            for (x, d) in dist.iter().enumerate() {
                if let Some(d) = *d {
                    for r in d..=ecc {
                        rows[r * words + x / BITS] |= 1 << (x % BITS);
                    }
                }
            }
            per_vertex.push(rows);
            radius.push(ecc);
        }
        Balls {
            words,
            per_vertex,
            radius,
        }
    }

    fn ball(&self, w: usize, d: usize) -> &[Block] {
        let r = d.min(self.radius[w]);
        &self.per_vertex[w][r * self.words..(r + 1) * self.words]
    }
}

struct Prepared<'a> {
    problem: &'a Problem<'a>,
    words: usize,
    pattern_dist: DistanceMatrix,
    balls: Balls,
    neighbors: Vec<Vec<Block>>,
    order: Vec<usize>,
    order_pos: Vec<usize>,
    variable_order: VariableOrder,
    // Limits.
    node_limit: Option<u64>,
    deadline: Option<(Instant, std::time::Duration)>,
    nodes: AtomicU64,
    stop: AtomicBool,
}

#[derive(Clone)]
struct State {
    assign: Vec<usize>,
    hits: Vec<u32>,
    cand: Vec<Block>,
    assigned: usize,
}

fn row(cand: &[Block], words: usize, v: usize) -> &[Block] {
    &cand[v * words..(v + 1) * words]
}

fn count(bits: &[Block]) -> usize {
    bits.iter().map(|b| b.count_ones() as usize).sum()
}

fn contains(bits: &[Block], x: usize) -> bool {
    bits[x / BITS] & (1 << (x % BITS)) != 0
}

fn ones(bits: &[Block]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(wi, &b)| {
        let mut b = b;
        std::iter::from_fn(move || {
            if b == 0 {
                return None;
            }
            let tz = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(wi * BITS + tz)
        })
    })
}

/// Default static order: BFS from the highest-degree vertex (lowest id on
/// ties), neighbors in ascending id, restarting per component.
pub(crate) fn static_bfs_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut seen = vec![false; g.vertex_count()];
    let mut roots: Vec<usize> = g.vertices().collect();
    roots.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for root in roots {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut i = order.len();
        order.push(root);
        while i < order.len() {
            for &w in g.neighbors(order[i]) {
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

enum Branch {
    /// Assign `var` each of `values` in turn.
    Values { var: usize, values: Vec<usize> },
    /// Map each of `vars` onto `value` in turn.
    Preimages { value: usize, vars: Vec<usize> },
}

impl<'a> Prepared<'a> {
    fn new(problem: &'a Problem<'a>, cfg: &SearchConfig) -> Self {
        let t = problem.target;
        let words = t.vertex_count().div_ceil(BITS).max(1);
        let neighbors = t
            .vertices()
            .map(|w| {
                let mut r = vec![0 as Block; words];
                for &x in t.neighbors(w) {
                    r[x / BITS] |= 1 << (x % BITS);
                }
                r
            })
            .collect();
        let order = static_bfs_order(problem.pattern);
        let mut order_pos = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            order_pos[v] = i;
        }
        Prepared {
            problem,
            words,
            pattern_dist: all_pairs_distances(problem.pattern),
            balls: Balls::new(t, words),
            neighbors,
            order,
            order_pos,
            variable_order: cfg.variable_order,
            node_limit: cfg.node_limit,
            deadline: cfg.time_limit.map(|d| (Instant::now(), d)),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    fn initial_state(&self) -> Option<State> {
        let n = self.problem.pattern.vertex_count();
        let mut cand = vec![0 as Block; n * self.words];
        for v in 0..n {
            let dom = self.problem.domains[v].as_slice();
            for (k, b) in cand[v * self.words..(v + 1) * self.words].iter_mut().enumerate() {
                *b = dom.get(k).copied().unwrap_or(0);
            }
            if count(row(&cand, self.words, v)) == 0 {
                return None;
            }
        }
        Some(State {
            assign: vec![UNASSIGNED; n],
            hits: vec![0; self.problem.target.vertex_count()],
            cand,
            assigned: 0,
        })
    }

    /// Applies `v -> w` and forward-checks; false on a wipe-out.
    fn assign(&self, st: &mut State, v: usize, w: usize) -> bool {
        st.assign[v] = w;
        st.hits[w] += 1;
        st.assigned += 1;
        let words = self.words;
        let n = st.assign.len();
        for x in 0..n {
            if st.assign[x] != UNASSIGNED {
                continue;
            }
            let r = &mut st.cand[x * words..(x + 1) * words];
            match self.pattern_dist.get(v, x) {
                Some(1) => {
                    for (a, b) in r.iter_mut().zip(&self.neighbors[w]) {
                        *a &= *b;
                    }
                }
                Some(d) => {
                    for (a, b) in r.iter_mut().zip(self.balls.ball(w, d)) {
                        *a &= *b;
                    }
                }
                None => {}
            }
            if self.problem.injective {
                r[w / BITS] &= !(1 << (w % BITS));
            }
            if r.iter().all(|&b| b == 0) {
                return false;
            }
        }
        true
    }

    fn tick(&self) -> Option<Limit> {
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.node_limit {
            if nodes > limit {
                return Some(Limit::Nodes(limit));
            }
        }
        if let Some((start, budget)) = self.deadline {
            if nodes % 256 == 0 && start.elapsed() > budget {
                return Some(Limit::Time(budget));
            }
        }
        None
    }

    fn choose(&self, st: &State) -> Option<Branch> {
        let p = self.problem;
        let n = st.assign.len();
        let unassigned = n - st.assigned;
        if !p.avoid_full_cover.is_empty() && p.avoid_full_cover.iter().all(|&f| st.hits[f] > 0) {
            return None;
        }
        let uncovered: Vec<usize> = p.cover.iter().copied().filter(|&f| st.hits[f] == 0).collect();
        if uncovered.len() > unassigned {
            return None;
        }
        if !uncovered.is_empty() {
            let mut best: Option<(usize, Vec<usize>)> = None;
            for &f in &uncovered {
                let vars: Vec<usize> = (0..n)
                    .filter(|&x| st.assign[x] == UNASSIGNED && contains(row(&st.cand, self.words, x), f))
                    .collect();
                if vars.is_empty() {
                    return None;
                }
                if best.as_ref().is_none_or(|(_, b)| vars.len() < b.len()) {
                    best = Some((f, vars));
                }
            }
            let (value, vars) = best.expect("uncovered is non-empty");
            return Some(Branch::Preimages { value, vars });
        }
        let var = match self.variable_order {
            VariableOrder::StaticBfs => *self.order.iter().find(|&&v| st.assign[v] == UNASSIGNED)?,
            VariableOrder::MinRemainingDomain => (0..n)
                .filter(|&v| st.assign[v] == UNASSIGNED)
                .min_by_key(|&v| (count(row(&st.cand, self.words, v)), self.order_pos[v]))?,
        };
        let values = ones(row(&st.cand, self.words, var)).collect();
        Some(Branch::Values { var, values })
    }

    fn moves(branch: Branch) -> Vec<(usize, usize)> {
        match branch {
            Branch::Values { var, values } => values.into_iter().map(|w| (var, w)).collect(),
            Branch::Preimages { value, vars } => vars.into_iter().map(|v| (v, value)).collect(),
        }
    }

    fn leaf(&self, st: &State) -> Flow {
        let ok = self.problem.cover.iter().all(|&f| st.hits[f] > 0)
            && (self.problem.avoid_full_cover.is_empty()
                || self.problem.avoid_full_cover.iter().any(|&f| st.hits[f] == 0))
            && self.problem.accept.is_none_or(|acc| acc(&st.assign));
        if ok {
            Flow::Found(st.assign.clone())
        } else {
            Flow::Exhausted
        }
    }

    fn search(&self, st: &State) -> Flow {
        if self.stop.load(Ordering::Relaxed) {
            return Flow::Exhausted;
        }
        if st.assigned == st.assign.len() {
            return self.leaf(st);
        }
        let Some(branch) = self.choose(st) else {
            return Flow::Exhausted;
        };
        for (v, w) in Self::moves(branch) {
            if let Some(limit) = self.tick() {
                return Flow::Aborted(limit);
            }
            let mut child = st.clone();
            if !self.assign(&mut child, v, w) {
                continue;
            }
            match self.search(&child) {
                Flow::Exhausted => {}
                other => return other,
            }
        }
        Flow::Exhausted
    }

    fn search_parallel(&self, st: &State) -> Flow {
        if st.assigned == st.assign.len() {
            return self.leaf(st);
        }
        let Some(branch) = self.choose(st) else {
            return Flow::Exhausted;
        };
        let moves = Self::moves(branch);
        let aborted: std::sync::Mutex<Option<Limit>> = std::sync::Mutex::new(None);
        let found = moves.par_iter().find_map_first(|&(v, w)| {
            let mut child = st.clone();
            if !self.assign(&mut child, v, w) {
                return None;
            }
            match self.search(&child) {
                Flow::Found(m) => {
                    self.stop.store(true, Ordering::Relaxed);
                    Some(m)
                }
                Flow::Aborted(l) => {
                    self.stop.store(true, Ordering::Relaxed);
                    aborted.lock().expect("poisoned").get_or_insert(l);
                    None
                }
                Flow::Exhausted => None,
            }
        });
        match (found, aborted.into_inner().expect("poisoned")) {
            (Some(m), _) => Flow::Found(m),
            (None, Some(l)) => Flow::Aborted(l),
            (None, None) => Flow::Exhausted,
        }
    }
}

/// Runs the search; returns the flow and the number of nodes expanded.
pub(crate) fn run(problem: &Problem<'_>, cfg: &SearchConfig) -> (Flow, u64) {
    let prepared = Prepared::new(problem, cfg);
    let Some(root) = prepared.initial_state() else {
        return (Flow::Exhausted, 0);
    };
    let flow = if cfg.parallel {
        prepared.search_parallel(&root)
    } else {
        prepared.search(&root)
    };
    (flow, prepared.nodes.load(Ordering::Relaxed))
}
