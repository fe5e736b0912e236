//! Grid and wall generators, their treewidths, and the standard skeletons.
//!
//! Vertex ids are fixed so that skeleton sets are reproducible:
//!
//! * grid `G_{s,t}`: `(i, j)` (1-based) has id `(i - 1) * t + (j - 1)` and
//!   label `"(i,j)"`;
//! * wall `W_{s,t}`: vertices are numbered level by level, `j = 1 ..= t + 1`;
//!   within a level all existing `v_{i,j}` come first (ascending `i`), then all
//!   existing `u_{i,j}`. Labels are `"v_{i,j}"` and `"u_{i,j}"`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::skeleton::{SkeletonMeta, SkeletonSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("{kind} dimensions s={s}, t={t} invalid: {requirement}")]
    Dimensions {
        kind: PatternKind,
        s: usize,
        t: usize,
        requirement: &'static str,
    },
    #[error("unknown pattern kind {0:?} (expected grid or wall)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Grid,
    Wall,
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternKind::Grid => "grid",
            PatternKind::Wall => "wall",
        })
    }
}

impl FromStr for PatternKind {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(PatternKind::Grid),
            "wall" => Ok(PatternKind::Wall),
            other => Err(PatternError::UnknownKind(other.to_string())),
        }
    }
}

fn check(kind: PatternKind, s: usize, t: usize, ok: bool, requirement: &'static str) -> Result<(), PatternError> {
    if ok {
        Ok(())
    } else {
        Err(PatternError::Dimensions { kind, s, t, requirement })
    }
}

/// 1-based grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCoord {
    pub i: usize,
    pub j: usize,
}

impl GridCoord {
    pub fn id(self, t: usize) -> usize {
        (self.i - 1) * t + (self.j - 1)
    }

    pub fn from_id(id: usize, t: usize) -> Self {
        GridCoord {
            i: id / t + 1,
            j: id % t + 1,
        }
    }
}

pub fn make_grid(s: usize, t: usize) -> Result<Graph, PatternError> {
    check(PatternKind::Grid, s, t, s >= 1 && t >= 1, "s, t >= 1")?;
    let id = |i: usize, j: usize| GridCoord { i, j }.id(t);
    let mut edges = Vec::with_capacity(2 * s * t);
    for i in 1..=s {
        for j in 1..=t {
            if i < s {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j < t {
                edges.push((id(i, j), id(i, j + 1)));
            }
        }
    }
    let labels = (1..=s).flat_map(|i| (1..=t).map(move |j| (id(i, j), format!("({i},{j})"))));
    Ok(Graph::new(s * t, edges)
        .and_then(|g| g.with_labels(labels))
        .expect("grid construction is well-formed"))
}

/// A named wall vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallVertex {
    V { i: usize, j: usize },
    U { i: usize, j: usize },
}

impl fmt::Display for WallVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallVertex::V { i, j } => write!(f, "v_{{{i},{j}}}"),
            WallVertex::U { i, j } => write!(f, "u_{{{i},{j}}}"),
        }
    }
}

/// Vertex numbering for `W_{s,t}`.
#[derive(Debug, Clone)]
pub struct WallLayout {
    pub s: usize,
    pub t: usize,
    vertices: Vec<WallVertex>,
    ids: HashMap<WallVertex, usize>,
}

impl WallLayout {
    pub fn new(s: usize, t: usize) -> Result<Self, PatternError> {
        check(PatternKind::Wall, s, t, s >= 1 && t >= 1, "s, t >= 1")?;
        let mut vertices = Vec::new();
        for j in 1..=t + 1 {
            let has_v = j <= t || t % 2 == 1;
            let has_u = (2..=t).contains(&j) || (j == t + 1 && t % 2 == 0);
            if has_v {
                vertices.extend((1..=s + 1).map(|i| WallVertex::V { i, j }));
            }
            if has_u {
                vertices.extend((1..=s + 1).map(|i| WallVertex::U { i, j }));
            }
        }
        let ids = vertices.iter().enumerate().map(|(k, &w)| (w, k)).collect();
        Ok(WallLayout { s, t, vertices, ids })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: usize) -> WallVertex {
        self.vertices[id]
    }

    pub fn id(&self, w: WallVertex) -> Option<usize> {
        self.ids.get(&w).copied()
    }

    pub fn v(&self, i: usize, j: usize) -> usize {
        self.ids[&WallVertex::V { i, j }]
    }

    pub fn u(&self, i: usize, j: usize) -> usize {
        self.ids[&WallVertex::U { i, j }]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let (s, t) = (self.s, self.t);
        let mut e = Vec::new();
        for i in 1..=s {
            e.push((self.v(i, 1), self.v(i + 1, 1)));
            if t % 2 == 1 {
                e.push((self.v(i, t + 1), self.v(i + 1, t + 1)));
            } else {
                e.push((self.u(i, t + 1), self.u(i + 1, t + 1)));
            }
        }
        // Horizontal rows 2..=t alternate v_{1,j} u_{1,j} v_{2,j} ... v_{s+1,j} u_{s+1,j}.
        for j in 2..=t {
            for i in 1..=s + 1 {
                e.push((self.v(i, j), self.u(i, j)));
                if i <= s {
                    e.push((self.u(i, j), self.v(i + 1, j)));
                }
            }
        }
        for i in 1..=s + 1 {
            for j in 1..=t {
                if j % 2 == 1 {
                    e.push((self.v(i, j), self.v(i, j + 1)));
                } else {
                    e.push((self.u(i, j), self.u(i, j + 1)));
                }
            }
        }
        e
    }

    pub fn graph(&self) -> Graph {
        let labels = self
            .vertices
            .iter()
            .enumerate()
            .map(|(k, w)| (k, w.to_string()));
        Graph::new(self.len(), self.edges())
            .and_then(|g| g.with_labels(labels))
            .expect("wall construction is well-formed")
    }
}

pub fn make_wall(s: usize, t: usize) -> Result<Graph, PatternError> {
    Ok(WallLayout::new(s, t)?.graph())
}

/// Closed-form treewidth of `G_{s,t}` (`min{s,t}`) or `W_{s,t}` (`min{s,t} + 1`).
pub fn pattern_treewidth(kind: PatternKind, s: usize, t: usize) -> usize {
    match kind {
        PatternKind::Grid => s.min(t),
        PatternKind::Wall => s.min(t) + 1,
    }
}

fn grid_ks(s: usize, t: usize) -> (usize, usize) {
    ((s - 1) / 2, (t - 2) / 2)
}

fn check_grid_skeleton(s: usize, t: usize) -> Result<(), PatternError> {
    check(PatternKind::Grid, s, t, s >= 5 && t >= 6, "s >= 5 and t >= 6")
}

/// `F_1 = {(2i, 2j) | i ∈ [k1], j ∈ [k2 + 1]}`, as sorted grid ids.
pub fn grid_center_set(s: usize, t: usize) -> Result<Vec<usize>, PatternError> {
    check_grid_skeleton(s, t)?;
    let (k1, k2) = grid_ks(s, t);
    let mut out: Vec<usize> = (1..=k1)
        .flat_map(|i| (1..=k2 + 1).map(move |j| GridCoord { i: 2 * i, j: 2 * j }.id(t)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// The grid skeleton `S_{s,t}` for `s >= 5`, `t >= 6`.
pub fn grid_skeleton(s: usize, t: usize) -> Result<SkeletonSpec, PatternError> {
    check_grid_skeleton(s, t)?;
    let (k1, k2) = grid_ks(s, t);
    let mut frame = Vec::new();
    for i in 1..=s {
        for j in 1..=t {
            let band = i <= 2 || (2 * k1 <= i) || j == 1 || 2 * k2 < j;
            let post = i % 2 == 0 && j % 2 == 0 && i <= 2 * k1 && j <= 2 * k2;
            if band || post {
                frame.push(GridCoord { i, j }.id(t));
            }
        }
    }
    let mut connectors = Vec::new();
    for i in 1..k1 {
        for j in 1..=k2 {
            connectors.push(GridCoord { i: 2 * i + 1, j: 2 * j }.id(t));
        }
    }
    for i in 2..k1 {
        for j in 1..k2 {
            connectors.push(GridCoord { i: 2 * i, j: 2 * j + 1 }.id(t));
        }
    }
    let meta = SkeletonMeta::Grid {
        s,
        t,
        k1,
        k2,
        f1: grid_center_set(s, t)?,
    };
    Ok(SkeletonSpec::new(frame, connectors).with_meta(meta))
}

/// The wall skeleton `(F1 ∪ F2, ∅)` for `s > 2`, `t > 3`.
pub fn wall_skeleton(s: usize, t: usize) -> Result<SkeletonSpec, PatternError> {
    check(PatternKind::Wall, s, t, s > 2 && t > 3, "s > 2 and t > 3")?;
    let w = WallLayout::new(s, t)?;
    let mut f1 = Vec::new();
    for i in 1..=s + 1 {
        f1.extend([w.v(i, 1), w.v(i, 2), w.u(i, 2), w.v(i, t), w.u(i, t)]);
        if t % 2 == 1 {
            f1.push(w.v(i, t + 1));
        } else {
            f1.push(w.u(i, t + 1));
        }
    }
    let mut f2 = Vec::new();
    for j in 3..t {
        f2.extend([w.v(1, j), w.u(1, j), w.v(2, j)]);
        f2.extend([w.u(s, j), w.v(s + 1, j), w.u(s + 1, j)]);
    }
    f1.sort_unstable();
    f1.dedup();
    f2.sort_unstable();
    f2.dedup();
    f2.retain(|x| f1.binary_search(x).is_err());
    let frame: Vec<usize> = f1.iter().chain(&f2).copied().collect();
    let meta = SkeletonMeta::Wall { s, t, f1, f2 };
    Ok(SkeletonSpec::new(frame, Vec::new()).with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_cycles, shortest_odd_cycle};

    fn gid(t: usize, i: usize, j: usize) -> usize {
        GridCoord { i, j }.id(t)
    }

    #[test]
    fn grid_counts() {
        let g = make_grid(7, 8).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (56, 97));
        let one = make_grid(1, 1).unwrap();
        assert_eq!((one.vertex_count(), one.edge_count()), (1, 0));
        assert_eq!(g.label(gid(8, 7, 4)), Some("(7,4)"));
        assert!(make_grid(0, 3).is_err());
    }

    #[test]
    fn grid_7_by_4_shape() {
        let g = make_grid(7, 4).unwrap();
        assert_eq!(g.vertex_count(), 28);
        assert_eq!(g.edge_count(), 7 * 3 + 4 * 6);
        for corner in ["(1,1)", "(7,1)", "(1,4)", "(7,4)"] {
            assert_eq!(g.degree(g.find_label(corner).unwrap()), 2);
        }
    }

    #[test]
    fn wall_6_by_4_shape() {
        let g = make_wall(6, 4).unwrap();
        // 7 v-vertices on each of 4 levels, 7 u-vertices on levels 2..=5.
        assert_eq!(g.vertex_count(), 56);
        for name in ["v_{1,1}", "v_{7,1}", "v_{1,2}", "u_{1,2}", "u_{7,2}", "v_{1,4}", "u_{7,4}", "u_{1,5}", "u_{7,5}"] {
            assert!(g.find_label(name).is_some(), "{name}");
        }
        assert!(g.find_label("v_{1,5}").is_none());
        assert!(g.is_connected());
        assert!(g.vertices().all(|v| (2..=3).contains(&g.degree(v))));
    }

    #[test]
    fn wall_6_by_7_counts() {
        let g = make_wall(6, 7).unwrap();
        assert_eq!(g.vertex_count(), 98);
        assert!(g.find_label("v_{1,8}").is_some());
        assert!(g.find_label("u_{1,8}").is_none());
    }

    #[test]
    fn treewidth_formulas() {
        assert_eq!(pattern_treewidth(PatternKind::Grid, 7, 8), 7);
        assert_eq!(pattern_treewidth(PatternKind::Wall, 6, 7), 7);
        assert_eq!(pattern_treewidth(PatternKind::Grid, 1, 100), 1);
    }

    #[test]
    fn grid_skeleton_7_8() {
        let t = 8;
        let sk = grid_skeleton(7, 8).unwrap();
        let mut frame = Vec::new();
        for i in 1..=7 {
            for j in 1..=8 {
                if [1, 2, 6, 7].contains(&i) || [1, 7, 8].contains(&j) {
                    frame.push(gid(t, i, j));
                }
            }
        }
        frame.extend([gid(t, 4, 2), gid(t, 4, 4), gid(t, 4, 6)]);
        frame.sort_unstable();
        assert_eq!(sk.frame, frame);
        let mut d: Vec<usize> = [(3, 2), (3, 4), (3, 6), (5, 2), (5, 4), (5, 6), (4, 3), (4, 5)]
            .iter()
            .map(|&(i, j)| gid(t, i, j))
            .collect();
        d.sort_unstable();
        assert_eq!(sk.connectors, d);
        match sk.meta {
            SkeletonMeta::Grid { k1, k2, ref f1, .. } => {
                assert_eq!((k1, k2, f1.len()), (3, 3, 12));
            }
            _ => panic!("grid meta expected"),
        }
    }

    #[test]
    fn grid_skeleton_5_6_conditions() {
        let g = make_grid(5, 6).unwrap();
        let sk = grid_skeleton(5, 6).unwrap();
        assert!(sk.connectors.iter().all(|d| sk.frame.binary_search(d).is_err()));
        for &d in &sk.connectors {
            let outside = g.neighbors(d).iter().filter(|w| sk.frame.binary_search(w).is_err()).count();
            assert!(outside <= 2);
        }
        assert_eq!(grid_center_set(5, 6).unwrap().len(), 6);
        assert!(grid_skeleton(4, 6).is_err());
        assert!(grid_skeleton(5, 5).is_err());
    }

    #[test]
    fn center_set_7_8() {
        let f1 = grid_center_set(7, 8).unwrap();
        let mut expected: Vec<usize> = [2, 4, 6]
            .iter()
            .flat_map(|&i| [2, 4, 6, 8].map(|j| gid(8, i, j)))
            .collect();
        expected.sort_unstable();
        assert_eq!(f1, expected);
        let sk = grid_skeleton(7, 8).unwrap();
        assert!(f1.iter().all(|v| sk.frame.binary_search(v).is_ok()));
    }

    #[test]
    fn wall_skeleton_6_7() {
        let w = WallLayout::new(6, 7).unwrap();
        let sk = wall_skeleton(6, 7).unwrap();
        assert!(sk.connectors.is_empty());
        // Vertices outside the skeleton of the 6x7 wall: interior of levels 3..=6.
        let g = w.graph();
        let free: Vec<String> = g
            .vertices()
            .filter(|v| sk.frame.binary_search(v).is_err())
            .map(|v| g.display_name(v))
            .collect();
        let mut expected = Vec::new();
        for j in 3..7 {
            for i in 3..=6 {
                expected.push(format!("v_{{{i},{j}}}"));
            }
            for i in 2..=5 {
                expected.push(format!("u_{{{i},{j}}}"));
            }
        }
        let mut free_sorted = free.clone();
        free_sorted.sort();
        expected.sort();
        assert_eq!(free_sorted, expected);
        assert!(wall_skeleton(2, 7).is_err());
        assert!(wall_skeleton(3, 3).is_err());
    }

    #[test]
    fn wall_five_cycles_inside_f1() {
        for (s, t) in [(6, 7), (3, 4), (4, 6)] {
            let g = make_wall(s, t).unwrap();
            let sk = wall_skeleton(s, t).unwrap();
            let SkeletonMeta::Wall { f1, .. } = &sk.meta else { panic!() };
            let cycles = enumerate_cycles(&g, 5).unwrap();
            assert_eq!(cycles.len(), 2 * s);
            for c in cycles {
                assert!(c.iter().all(|v| f1.binary_search(v).is_ok()));
            }
            assert_eq!(shortest_odd_cycle(&g), Some(5));
        }
    }
}
