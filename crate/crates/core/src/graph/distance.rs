use super::Graph;

const UNREACHABLE: u32 = u32::MAX;

/// Dense all-pairs shortest-path table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        match self.data[u * self.n + v] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = Option<usize>> + '_ {
        (0..self.n).map(move |v| self.get(u, v))
    }

    /// Largest finite distance (the diameter of the largest-diameter component).
    pub fn max_finite(&self) -> usize {
        self.data
            .iter()
            .filter(|&&d| d != UNREACHABLE)
            .max()
            .copied()
            .unwrap_or(0) as usize
    }

    /// Unordered pairs `u < v` whose distance equals the maximum finite distance.
    pub fn extremal_pairs(&self) -> Vec<(usize, usize)> {
        let best = self.max_finite();
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.get(u, v) == Some(best) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Nested vector form, with `None` for unreachable pairs.
    pub fn to_rows(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n).map(|u| self.row(u).collect()).collect()
    }
}

pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.vertex_count();
    let mut data = vec![UNREACHABLE; n * n];
    for u in 0..n {
        for (v, d) in g.bfs(u).into_iter().enumerate() {
            if let Some(d) = d {
                data[u * n + v] = d as u32;
            }
        }
    }
    DistanceMatrix { n, data }
}
