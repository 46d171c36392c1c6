use alloc::vec::Vec;

use super::executor::Executor;
use super::ppxa::{run, DensityBlock, SolveHooks};
use super::{ProblemSpec, SolverConfig};
use crate::Result;

const FEASIBLE_TOL: f64 = 1e-6;
const PLATEAU_LEVEL: f64 = 1e-3;
/// Relative decrease of the running minimum between the two halves of the
/// trace below which the violation counts as stalled.
const PLATEAU_DECREASE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    LikelyFeasible,
    LikelyInfeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub verdict: FeasibilityVerdict,
    /// Largest constraint violation of the final iterate.
    pub max_violation: f64,
    pub ce_residual: f64,
    /// Largest constraint violation at each record.
    pub violation_trace: Vec<f64>,
    pub iterations: usize,
}

/// Heuristic feasibility check: the solver iteration with the energy prox
/// replaced by projection onto `ρ ≥ 0`.
///
/// This only probes the constraint intersection numerically; it does not solve
/// the exact cone feasibility problem.
pub fn feasibility_probe(
    problem: &ProblemSpec,
    config: &SolverConfig,
    executor: &dyn Executor,
) -> Result<FeasibilityReport> {
    let out = run(
        problem,
        config,
        executor,
        SolveHooks::default(),
        DensityBlock::Nonnegative,
    )?;
    let trace = out.diagnostics.max_violation();
    let verdict = if out.report.max_violation < FEASIBLE_TOL {
        FeasibilityVerdict::LikelyFeasible
    } else if out.report.max_violation > PLATEAU_LEVEL && plateaued(&trace) {
        FeasibilityVerdict::LikelyInfeasible
    } else {
        FeasibilityVerdict::Inconclusive
    };
    Ok(FeasibilityReport {
        verdict,
        max_violation: out.report.max_violation,
        ce_residual: out.ce_residual,
        violation_trace: trace,
        iterations: out.iterations,
    })
}

fn plateaued(trace: &[f64]) -> bool {
    if trace.len() < 5 {
        return false;
    }
    let body = &trace[1..];
    let (early, late) = body.split_at(body.len() / 2);
    let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let (a, b) = (min(early), min(late));
    a - b <= PLATEAU_DECREASE * a
}
