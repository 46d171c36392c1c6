//! Solving and probing scenarios with a thread pool.

use std::time::Instant;

use cuot_core::{feasibility_probe, ppxa_solve_with, Executor, FeasibilityReport, Progress, SolveHooks, SolveResult};

use crate::error::{Error, Result};
use crate::executor::RayonExecutor;
use crate::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct Run {
    pub result: SolveResult,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

fn executor(scn: &Scenario) -> Result<RayonExecutor> {
    RayonExecutor::new(scn.solver.thread_count).map_err(|e| Error::config("solver.threads", e.to_string()))
}

/// Solves `scn` on `solver.threads` workers (rayon's default when unset).
pub fn solve(scn: &Scenario, progress: Option<&mut dyn FnMut(&Progress)>) -> Result<Run> {
    let exec = executor(scn)?;
    let hooks = SolveHooks {
        progress,
        ..SolveHooks::default()
    };
    let start = Instant::now();
    let result = ppxa_solve_with(&scn.problem, &scn.solver, &exec, hooks)?;
    Ok(Run {
        result,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        threads: exec.parallelism(),
    })
}

pub fn probe(scn: &Scenario) -> Result<FeasibilityReport> {
    let exec = executor(scn)?;
    Ok(feasibility_probe(&scn.problem, &scn.solver, &exec)?)
}
