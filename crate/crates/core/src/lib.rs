//! Collision-free trajectory optimization between polytopes.
//!
//! The crate implements a full navigation stack for a planar robot with
//! polytopic geometry: grid A* global planning with line-of-sight reduction,
//! a nonlinear MPC whose obstacle-avoidance constraints are built from the
//! dual of the polytope minimum-distance problem, an in-house SQP solver,
//! and a closed-loop simulator with an independent safety audit.
//!
//! All core math is generic over the scalar type through [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix `f64` for the common types.

pub mod geometry;
pub mod scalar;

#[cfg(test)]
pub(crate) mod test_util;

/// `f64` polytope.
pub type Polytope = geometry::Polytope<f64>;
/// `f64` robot body (union of convex pieces).
pub type RobotBody = geometry::RobotBody<f64>;
/// `f64` rigid pose.
pub type Pose = geometry::Pose<f64>;
/// `f64` distance query result.
pub type DistanceResult = geometry::DistanceResult<f64>;
