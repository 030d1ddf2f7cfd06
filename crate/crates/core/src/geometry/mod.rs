//! 2-D convex polytopes in halfspace form, rigid placement, and
//! minimum-distance computation with dual certificates.
//!
//! A polytope is `{y : A y <= b}` with unit outward row normals. The minimum
//! distance between two polytopes is computed by an active-set QP on the pair
//! of closest points; the multipliers of the active constraints are rescaled
//! into the dual certificate `(lambda_obs, lambda_rob)` whose objective
//! `-lambda_obs . b_obs - lambda_rob . b_rob` equals the distance, and whose
//! vector `lambda_obs A_obs` is the normal of a separating hyperplane.

mod distance;
mod polytope;

pub use distance::{brute_force_distance, dual_cost, min_distance, DistanceResult};
pub use polytope::{convex_hull, Polytope, Pose, RobotBody};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    /// Hull of the input points is lower-dimensional (collinear or < 3 distinct points).
    #[error("degenerate input: hull is lower-dimensional")]
    DegenerateInput,
    /// A halfspace row has (near-)zero normal.
    #[error("halfspace row {0} has zero normal")]
    ZeroNormal(usize),
    /// The recession cone is non-trivial: the set is unbounded.
    #[error("polytope is unbounded")]
    Unbounded,
    /// No point satisfies all halfspaces.
    #[error("polytope is empty")]
    Empty,
    /// Robot piece index out of range.
    #[error("piece index {index} out of range ({count} pieces)")]
    InvalidPieceIndex { index: usize, count: usize },
    /// A robot body must have at least one piece.
    #[error("robot body has no pieces")]
    EmptyBody,
    /// The internal distance QP failed to converge or certify; indicates a bug
    /// or invalid (unvalidated) polytope data.
    #[error("distance solver failure: {0}")]
    SolverFailure(String),
}
