//! Undirected simple graphs over dense vertex ids, plus the small value types
//! (vertex maps, colorings) that the rest of the crate passes around.

mod cycles;
mod distance;
mod dot;
mod io;
mod iso;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use cycles::{enumerate_cycles, shortest_odd_cycle, two_coloring};
pub use distance::{all_pairs_distances, DistanceMatrix};
pub use dot::to_dot;
pub use io::{parse_graph, serialize_graph};
pub use iso::{are_isomorphic, are_isomorphic_with_limit, DEFAULT_ISO_LIMIT};

pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    BadVertex { vertex: usize, n: usize },
    #[error("label {0:?} is used by more than one vertex")]
    DuplicateLabel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cycle length must be at least 3, got {0}")]
    CycleLength(usize),
    #[error("graph with {n} vertices exceeds the size guard of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("vertex {0} appears in more than one highlight class")]
    OverlappingClasses(usize),
    #[error("map has {got} entries, expected {expected}")]
    MapSize { got: usize, expected: usize },
    #[error("map image {image} of vertex {vertex} is outside the codomain of size {codomain}")]
    MapImage {
        vertex: usize,
        image: usize,
        codomain: usize,
    },
    #[error("color {color} of target vertex {vertex} is not a pattern vertex (pattern has {pattern_size})")]
    BadColor {
        vertex: usize,
        color: usize,
        pattern_size: usize,
    },
}

/// An undirected simple graph on vertices `0..n`.
///
/// Edges are stored normalized (`u < v`, sorted, deduplicated). Values are
/// immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    adj_bits: Vec<FixedBitSet>,
    labels: BTreeMap<usize, String>,
}

impl Graph {
    /// Builds a graph, deduplicating edges and ordering endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut norm = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::EndpointOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self::from_normalized(n, norm))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_normalized(n, Vec::new())
    }

    fn from_normalized(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut adj_bits = vec![FixedBitSet::with_capacity(n); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
            adj_bits[u].insert(v);
            adj_bits[v].insert(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adj,
            adj_bits,
            labels: BTreeMap::new(),
        }
    }

    /// Attaches labels. Labels must be unique and refer to existing vertices.
    pub fn with_labels(
        mut self,
        labels: impl IntoIterator<Item = (usize, String)>,
    ) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for (v, l) in labels {
            self.check_vertex(v)?;
            map.insert(v, l);
        }
        let mut seen = std::collections::HashSet::new();
        for l in map.values() {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        self.labels = map;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    /// Sorted neighbor list. Panics on an invalid id; see [`Graph::adjacency`].
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbor_set(&self, v: usize) -> &FixedBitSet {
        &self.adj_bits[v]
    }

    /// Checked neighbor query.
    pub fn adjacency(&self, v: usize) -> Result<&[usize], GraphError> {
        self.check_vertex(v)?;
        Ok(&self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj_bits[u].contains(v)
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    /// Label if present, otherwise the decimal id.
    pub fn display_name(&self, v: usize) -> String {
        self.label(v).map_or_else(|| v.to_string(), str::to_owned)
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().find(|(_, l)| l.as_str() == label).map(|(&v, _)| v)
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::BadVertex { vertex: v, n: self.n })
        }
    }

    /// Induced subgraph on `keep` (in the given order); vertex `i` of the
    /// result is `keep[i]`. Labels are carried over.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph, GraphError> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        let g = Graph::new(keep.len(), edges)?;
        let labels = keep
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| self.label(v).map(|l| (i, l.to_owned())));
        g.with_labels(labels)
    }

    /// Subgraph with the given vertices removed, plus the kept-vertex table.
    pub fn without_vertices(&self, removed: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        let mut drop = FixedBitSet::with_capacity(self.n);
        for &v in removed {
            self.check_vertex(v)?;
            drop.insert(v);
        }
        let keep: Vec<usize> = self.vertices().filter(|&v| !drop.contains(v)).collect();
        Ok((self.induced_subgraph(&keep)?, keep))
    }

    /// Breadth-first distances from `src`; `None` marks unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Option<usize>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs(u)[v])
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.vertices().map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }
}

/// Serialized as `{"n": .., "edges": [[u, v], ..]}`; labels are omitted.
impl serde::Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Graph", 2)?;
        st.serialize_field("n", &self.vertex_count())?;
        st.serialize_field("edges", self.edges())?;
        st.end()
    }
}

/// A total map from the vertices of a domain graph to a codomain of known size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct VertexMap {
    image: Vec<usize>,
    codomain_size: usize,
}

impl VertexMap {
    pub fn new(image: Vec<usize>, codomain_size: usize) -> Result<Self, GraphError> {
        if let Some((vertex, &image)) = image.iter().enumerate().find(|(_, &w)| w >= codomain_size) {
            return Err(GraphError::MapImage {
                vertex,
                image,
                codomain: codomain_size,
            });
        }
        Ok(VertexMap { image, codomain_size })
    }

    pub fn identity(n: usize) -> Self {
        VertexMap {
            image: (0..n).collect(),
            codomain_size: n,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.image.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn get(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn image_set(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.codomain_size);
        for &w in &self.image {
            set.insert(w);
        }
        set
    }

    pub fn is_injective(&self) -> bool {
        self.image_set().count_ones(..) == self.image.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_set().count_ones(..) == self.codomain_size
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &VertexMap) -> Result<VertexMap, GraphError> {
        if other.domain_size() != self.codomain_size {
            return Err(GraphError::MapSize {
                got: other.domain_size(),
                expected: self.codomain_size,
            });
        }
        Ok(VertexMap {
            image: self.image.iter().map(|&w| other.image[w]).collect(),
            codomain_size: other.codomain_size,
        })
    }

    /// Inverse permutation, if the map is a bijection.
    pub fn inverse(&self) -> Option<VertexMap> {
        if self.codomain_size != self.image.len() || !self.is_injective() {
            return None;
        }
        let mut inv = vec![0; self.image.len()];
        for (v, &w) in self.image.iter().enumerate() {
            inv[w] = v;
        }
        Some(VertexMap {
            image: inv,
            codomain_size: self.image.len(),
        })
    }
}

/// Assigns every target vertex a pattern vertex ("color").
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Coloring {
    color_of: Vec<usize>,
    pattern_size: usize,
}

impl Coloring {
    pub fn new(color_of: Vec<usize>, pattern_size: usize) -> Result<Self, GraphError> {
        if let Some((vertex, &color)) = color_of.iter().enumerate().find(|(_, &c)| c >= pattern_size) {
            return Err(GraphError::BadColor {
                vertex,
                color,
                pattern_size,
            });
        }
        Ok(Coloring { color_of, pattern_size })
    }

    pub fn target_size(&self) -> usize {
        self.color_of.len()
    }

    pub fn pattern_size(&self) -> usize {
        self.pattern_size
    }

    pub fn color(&self, target_vertex: usize) -> usize {
        self.color_of[target_vertex]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    /// Target vertices carrying color `c`, ascending.
    pub fn class(&self, c: usize) -> Vec<usize> {
        self.color_of
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x == c)
            .map(|(v, _)| v)
            .collect()
    }
}
