//! Projections onto the three constraint families: per-time affine boxes,
//! staggered/centered consistency and the continuity equation.

mod affine;
mod consistency;
mod continuity;

pub use affine::{AffineBoxConstraint, ConstraintReport};
pub use consistency::{project_consistency, ConsistencyProjector};
pub use continuity::{project_continuity, ContinuityProjector, LinearSolver};
