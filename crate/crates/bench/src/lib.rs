//! Shared fixtures for the benchmarks.

use gridwall::patterns::{grid_skeleton, make_grid};
use gridwall::product::{build_product, ProductGraph};
use gridwall::{Coloring, Graph};

/// Two disjoint 4-cycles colored onto the 2x2 quotient of the 7x8 grid skeleton.
pub fn two_squares_product() -> ProductGraph {
    let g = make_grid(7, 8).expect("grid");
    let s = grid_skeleton(7, 8).expect("skeleton");
    let id = |i: usize, j: usize| (i - 1) * 8 + (j - 1);
    let (a, b, c, d) = (id(3, 3), id(3, 5), id(5, 3), id(5, 5));
    let h = Graph::new(8, [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 7), (6, 7)]).expect("graph");
    let chi = Coloring::new(vec![a, b, c, d, a, b, c, d], 56).expect("coloring");
    build_product(&g, &s, &h, &chi).expect("product")
}
