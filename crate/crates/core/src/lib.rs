//! Frames, skeletons, quotients and product graphs over grids and walls, with
//! exact solvers for the embedding problems that connect them.
//!
//! Vertex ids are dense `usize` values throughout. Grid and wall coordinates
//! live in vertex labels (see [`patterns`]).

pub mod graph;
pub mod patterns;
pub mod product;
pub mod reduction;
pub mod rigidity;
pub mod skeleton;
pub mod solver;
pub mod suite;

pub use graph::{Coloring, DistanceMatrix, Graph, GraphError, VertexId, VertexMap};
pub use patterns::{GridCoord, PatternError, PatternKind, WallLayout, WallVertex};
pub use product::{ProductError, ProductGraph, ProductVertex, SecondCoord};
pub use reduction::{ColEmbInstance, EmbInstance, ReductionError};
pub use rigidity::{Counterexample, RigidityConfig, RigidityStatus, RigidityVerdict};
pub use skeleton::{
    Association, FrameConfig, FrameVerdict, QuotientResult, SkeletonError, SkeletonMeta, SkeletonReport,
    SkeletonSpec,
};
pub use solver::{Limit, MapMode, Outcome, Search, SearchConfig, SolverError, VariableOrder, Violation};
