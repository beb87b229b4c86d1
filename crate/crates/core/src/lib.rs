//! Solver library for three-dimensional multiple-bin-size bin packing
//! with air-cargo constraints: non-cuboid ULDs, load stability,
//! stackability, weight distribution, blocked edges, padding, and
//! substructures. The core is an extreme-point insertion heuristic
//! driven by a randomized greedy search, with a spatial grid accelerating
//! the feasibility checks and a hole-closing refinement pass.

pub mod extreme_points;
pub mod feasibility;
pub mod fleet;
pub mod geometry;
pub mod grid;
pub mod holes;
pub mod insertion;
pub mod io;
pub mod model;
pub mod ordering;
pub mod rgs;
pub mod synth;
pub mod validate;

pub use model::{
    AlgoParams, CornerSupportMode, EpSortOrder, Instance, Item, Orientation, PackingParams,
    Placed, Placement, Solution, Tilt, Uld, UldLoad, UldType, VariantFlags,
};
pub use ordering::SortCriterion;
pub use rgs::{FitContext, RgsInput, Score};
pub use validate::{validate, ValidationReport, Violation};
