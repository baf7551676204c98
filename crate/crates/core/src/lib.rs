//! Permutation pattern matching through bounded-width merge decompositions.
//!
//! A permutation is a labelled point set in general position. A *merge sequence* repeatedly
//! replaces two rectangles by their bounding box; it is *d-wide* when every rectangle created
//! along the way intersects fewer than `d` others in each projection. The crate provides:
//!
//! * [`decompose`]: a linear-time builder that either finds an `r × r` grid in a permutation
//!   or returns a merge sequence of bounded width,
//! * [`griddetect`]: grid extraction from dense point sets,
//! * [`matcher`]: a dynamic program deciding pattern containment along a merge sequence,
//! * [`monotone`]: the t-monotone fast path and a polynomial-space matcher,
//! * [`oracle`]: brute-force references for all of the above.

pub mod decompose;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod griddetect;
pub mod matcher;
pub mod merge;
pub mod monotone;
pub mod oracle;
pub mod par;
pub mod perm;

pub use decompose::{
    build_decomposition, build_decomposition_budget, canonical_grid_decomposition, first_violation,
    verify_wide, width_of_decomposition, BudgetOutcome, DecompositionResult,
};
pub use embedding::{verify_embedding, Embedding};
pub use error::{Error, Result};
pub use geometry::{merge_family, Axis, Interval, Point, Rectangle, RectangleFamily};
pub use grid::{verify_grid, verify_grid_points, GridWitness};
pub use griddetect::{f_bound, find_grid, PointSet};
pub use matcher::{find_pattern, match_auto, MatchStats};
pub use merge::{leaf_sets, MergeSequence, MergeStep};
pub use monotone::{
    greedy_monotone_partition, monotone_decomposition, poly_space_match, sigma_pi_embedding,
    t_monotone_match, MonotonePartition, PatternAssignment,
};
pub use par::Execution;
pub use perm::{
    canonical_grid, canonical_grid_label, parse_permutation, random_permutation, random_separable,
    reduce, restrict, substitute, Label, Permutation,
};
