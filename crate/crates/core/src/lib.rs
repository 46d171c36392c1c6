//! Constrained unbalanced optimal transport on space-time grids.
//!
//! The crate computes discrete Wasserstein–Fisher–Rao geodesics between
//! nonnegative densities sampled on a uniform grid over `[0, 1] × Ω`, where Ω is
//! a box with Neumann or periodic spatial boundaries. Affine integral
//! constraints on the density, momentum and source paths are imposed per time
//! slice as box constraints `ℓ ≤ ⟨H, V(t)⟩ ≤ u`.
//!
//! Layout:
//!
//! - [`grid`]: centered and staggered grids, fields, and the linear operators
//!   (interpolation, divergence, source extraction, boundary slots).
//! - [`energy`]: the infinitesimal cost `f_δ`, the discrete energy and its
//!   pointwise proximal operator.
//! - [`constraint`]: projections onto the continuity-equation set, the
//!   staggered/centered consistency set and the affine box constraints.
//! - [`solver`]: the parallel proximal (PPXA) iteration, path initialization,
//!   convergence diagnostics and a heuristic feasibility probe.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and threading live
//! in the companion `cuot` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constraint;
pub mod energy;
mod error;
pub mod grid;
pub mod linalg;
pub mod solver;

pub use constraint::{AffineBoxConstraint, ConstraintReport, ContinuityProjector};
pub use energy::DeltaParam;
pub use error::{Error, Result};
pub use grid::{Array, Boundary, BoundaryValues, CenteredField, GridSpec, StaggeredField};
pub use solver::{
    feasibility_probe, fit_convergence_rate, init_path, ppxa_solve, ppxa_solve_with, Diagnostics,
    Executor, FeasibilityReport, FeasibilityVerdict, Gamma, InitMode, LinearSolver, ProblemSpec,
    Progress, RateFit, Sequential, SolveHooks, SolveResult, SolverConfig,
};
