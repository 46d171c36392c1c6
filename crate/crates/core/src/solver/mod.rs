//! Parallel proximal iteration over the continuity, consistency and box blocks.

mod diagnostics;
mod executor;
mod feasibility;
mod init;
mod ppxa;

pub use crate::constraint::LinearSolver;
pub use diagnostics::{fit_convergence_rate, Diagnostics, RateFit};
pub use executor::{Executor, Job, Sequential};
pub use feasibility::{feasibility_probe, FeasibilityReport, FeasibilityVerdict};
pub use init::{init_path, InitMode};
pub use ppxa::{ppxa_solve, ppxa_solve_with, Progress, SolveHooks, SolveResult};

use alloc::format;
use alloc::vec::Vec;

use crate::constraint::AffineBoxConstraint;
use crate::energy::DeltaParam;
use crate::grid::{Array, GridSpec};
use crate::{Error, Result};

/// Prox step size.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Gamma {
    /// `max(max ρ0, max ρ1) / 2`.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Relaxation in `(0, 2)`.
    pub alpha: f64,
    pub gamma: Gamma,
    pub iterations: usize,
    /// Record diagnostics every this many iterations; `0` records only the
    /// start and the end.
    pub snapshot_stride: usize,
    /// Final continuity residual below which [`SolveResult::converged`] holds.
    pub ce_tolerance: f64,
    /// Stop early once the relative change of the iterate between two records
    /// drops to this value; `0` disables early stopping.
    pub residual_target: f64,
    pub linear_solver: LinearSolver,
    pub init: InitMode,
    /// Worker threads requested from the host; the core library ignores it.
    pub thread_count: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 1.8,
            gamma: Gamma::Auto,
            iterations: 1000,
            snapshot_stride: 10,
            ce_tolerance: 1e-6,
            residual_target: 0.0,
            linear_solver: LinearSolver::Spectral,
            init: InitMode::Linear,
            thread_count: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 2), got {}",
                self.alpha
            )));
        }
        if let Gamma::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma must be positive and finite, got {g}"
                )));
            }
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be at least 1".into()));
        }
        if !(self.ce_tolerance >= 0.0) || !(self.residual_target >= 0.0) {
            return Err(Error::InvalidParameter("tolerances must be nonnegative".into()));
        }
        if self.thread_count == Some(0) {
            return Err(Error::InvalidParameter("thread count must be at least 1".into()));
        }
        Ok(())
    }

    /// Resolves [`Gamma::Auto`] against the endpoints.
    pub fn resolve_gamma(&self, problem: &ProblemSpec) -> Result<f64> {
        match self.gamma {
            Gamma::Fixed(g) => Ok(g),
            Gamma::Auto => {
                let m = problem
                    .rho0
                    .max_abs()
                    .max(problem.rho1.max_abs());
                if m > 0.0 {
                    Ok(0.5 * m)
                } else {
                    Err(Error::InvalidParameter(
                        "automatic gamma needs a nonzero endpoint".into(),
                    ))
                }
            }
        }
    }
}

/// A constrained geodesic problem: grid, `δ`, endpoints and box constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub grid: GridSpec,
    pub delta: DeltaParam,
    pub rho0: Array,
    pub rho1: Array,
    pub constraints: Vec<AffineBoxConstraint>,
}

impl ProblemSpec {
    pub fn new(
        grid: GridSpec,
        delta: DeltaParam,
        rho0: Array,
        rho1: Array,
        constraints: Vec<AffineBoxConstraint>,
    ) -> Result<Self> {
        let spatial = grid.spatial_shape();
        rho0.expect_shape(&spatial, "rho0")?;
        rho1.expect_shape(&spatial, "rho1")?;
        for (name, r) in [("rho0", &rho0), ("rho1", &rho1)] {
            if r.as_slice().iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidField(format!(
                    "{name} must be finite and nonnegative"
                )));
            }
        }
        let shape = grid.centered_shape();
        for (i, c) in constraints.iter().enumerate() {
            if c.h_rho().shape() != shape.as_slice() || c.h_omega().len() != grid.dim() {
                return Err(Error::InvalidField(format!(
                    "constraint {i} was built for a different grid"
                )));
            }
        }
        Ok(Self {
            grid,
            delta,
            rho0,
            rho1,
            constraints,
        })
    }
}
