use alloc::boxed::Box;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use super::diagnostics::{fit_convergence_rate, Diagnostics};
use super::executor::{Executor, Job};
use super::init::init_path;
use super::{ProblemSpec, SolverConfig};
use crate::constraint::{AffineBoxConstraint, ConsistencyProjector, ConstraintReport, ContinuityProjector};
use crate::energy::{total_cost_unchecked, DeltaParam, ProxChunk};
use crate::grid::{
    continuity_residual_into, interpolate_into, Array, BoundaryValues, CenteredField, GridSpec,
    StaggeredField,
};
use crate::{Error, Result};

const NAN_CHECK_EVERY: usize = 100;

/// Snapshot passed to the progress callback at every diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub iteration: usize,
    pub energy: f64,
    pub max_violation: f64,
    pub ce_residual: f64,
}

/// Optional observers of a running solve.
#[derive(Default)]
pub struct SolveHooks<'a> {
    pub progress: Option<&'a mut dyn FnMut(&Progress)>,
    /// Checked before every iteration; when set the solve stops with
    /// [`Error::Cancelled`].
    pub cancel: Option<&'a AtomicBool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Staggered part of the final consensus iterate.
    pub u: StaggeredField,
    /// Centered part of the final consensus iterate; `v.rho` is the geodesic.
    pub v: CenteredField,
    pub gamma: f64,
    /// Iterations actually run.
    pub iterations: usize,
    pub energy: f64,
    pub ce_residual: f64,
    pub consistency_residual: f64,
    pub report: ConstraintReport,
    pub diagnostics: Diagnostics,
    /// Final continuity residual within the configured tolerance.
    pub converged: bool,
}

/// `x = (U, V)` or one of its copies.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Pair {
    pub u: StaggeredField,
    pub v: CenteredField,
}

impl Pair {
    fn slices(&self) -> Vec<&[f64]> {
        self.u
            .components()
            .chain(self.v.components())
            .map(Array::as_slice)
            .collect()
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.u
            .components_mut()
            .chain(self.v.components_mut())
            .map(Array::as_mut_slice)
            .collect()
    }

    fn flatten_into(&self, out: &mut Vec<f64>) {
        out.clear();
        for s in self.slices() {
            out.extend_from_slice(s);
        }
    }

    fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

fn copy_into<'a>(dst: impl Iterator<Item = &'a mut Array>, src: impl Iterator<Item = &'a Array>) {
    for (d, s) in dst.zip(src) {
        d.as_mut_slice().copy_from_slice(s.as_slice());
    }
}

/// What block 1 does to the centered part.
#[derive(Debug, Clone, Copy)]
pub(crate) enum DensityBlock {
    /// Prox of `γ·f_δ`.
    Energy { gamma: f64, delta: DeltaParam },
    /// Projection onto `ρ ≥ 0`, other components untouched.
    Nonnegative,
}

pub(crate) struct RunOutput {
    pub x: Pair,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
    pub report: ConstraintReport,
    pub energy: f64,
    pub ce_residual: f64,
    pub consistency_residual: f64,
}

/// Solves the constrained geodesic problem with the default sequential executor.
pub fn ppxa_solve(problem: &ProblemSpec, config: &SolverConfig) -> Result<SolveResult> {
    ppxa_solve_with(problem, config, &super::Sequential, SolveHooks::default())
}

/// Solves the constrained geodesic problem.
///
/// Block 1 pairs the continuity projection of `U` with the pointwise prox of
/// `γ J` on `V`; block 2 projects onto `V = I(U)`; each box constraint adds one
/// block acting on `V`. Block outputs are averaged with equal weights.
pub fn ppxa_solve_with(
    problem: &ProblemSpec,
    config: &SolverConfig,
    executor: &dyn Executor,
    hooks: SolveHooks<'_>,
) -> Result<SolveResult> {
    config.validate()?;
    let gamma = config.resolve_gamma(problem)?;
    let out = run(
        problem,
        config,
        executor,
        hooks,
        DensityBlock::Energy {
            gamma,
            delta: problem.delta,
        },
    )?;
    Ok(SolveResult {
        converged: out.ce_residual <= config.ce_tolerance,
        u: out.x.u,
        v: out.x.v,
        gamma,
        iterations: out.iterations,
        energy: out.energy,
        ce_residual: out.ce_residual,
        consistency_residual: out.consistency_residual,
        report: out.report,
        diagnostics: out.diagnostics,
    })
}

struct Recorder<'p> {
    grid: &'p GridSpec,
    delta: DeltaParam,
    constraints: &'p [AffineBoxConstraint],
    diag: Diagnostics,
    snapshots: Vec<Vec<f64>>,
    keep_snapshots: bool,
    residual: Array,
    interp: CenteredField,
}

impl<'p> Recorder<'p> {
    fn residuals(&mut self, x: &Pair) -> (f64, f64) {
        continuity_residual_into(self.grid, &x.u, &mut self.residual);
        let ce = self.residual.max_abs();
        interpolate_into(self.grid, &x.u, &mut self.interp);
        let mut cons: f64 = 0.0;
        for (a, b) in self.interp.components().zip(x.v.components()) {
            for (p, q) in a.as_slice().iter().zip(b.as_slice()) {
                cons = cons.max((p - q).abs());
            }
        }
        (ce, cons)
    }

    /// `energy_point` is the centered output of block 1, which lies in the domain
    /// of `J` even when the consensus iterate has slightly negative densities.
    fn record(&mut self, iteration: usize, x: &Pair, energy_point: &CenteredField) -> Progress {
        let energy = total_cost_unchecked(self.grid, self.delta, energy_point);
        let (ce, cons) = self.residuals(x);
        let mut max_violation: f64 = 0.0;
        for (i, c) in self.constraints.iter().enumerate() {
            let worst = (0..self.grid.time_cells())
                .map(|j0| c.violation_at(j0, c.value_unchecked(self.grid, &x.v, j0)))
                .fold(0.0_f64, f64::max);
            max_violation = max_violation.max(worst);
            self.diag.violation[i].push(worst);
        }
        self.diag.iterations.push(iteration);
        self.diag.energy.push(energy);
        self.diag.ce_residual.push(ce);
        self.diag.consistency_residual.push(cons);
        if self.keep_snapshots {
            let mut snap = Vec::new();
            x.flatten_into(&mut snap);
            self.snapshots.push(snap);
        }
        Progress {
            iteration,
            energy,
            max_violation,
            ce_residual: ce,
        }
    }
}

pub(crate) fn run(
    problem: &ProblemSpec,
    config: &SolverConfig,
    executor: &dyn Executor,
    mut hooks: SolveHooks<'_>,
    block: DensityBlock,
) -> Result<RunOutput> {
    config.validate()?;
    let grid = &problem.grid;
    let b0 = BoundaryValues::from_endpoints(grid, &problem.rho0, &problem.rho1)?;
    let ce = ContinuityProjector::new(grid, b0, config.linear_solver)?;
    let consistency = ConsistencyProjector::new(grid);
    let (u0, v0) = init_path(grid, &problem.rho0, &problem.rho1, config.init)?;
    let mut x = Pair { u: u0, v: v0 };
    let m = 2 + problem.constraints.len();
    let mut y: Vec<Pair> = (0..m).map(|_| x.clone()).collect();
    let mut pi: Vec<Pair> = y.clone();
    let alpha = config.alpha;
    let parts = executor.parallelism().max(1);

    let mut rec = Recorder {
        grid,
        delta: problem.delta,
        constraints: &problem.constraints,
        diag: Diagnostics {
            violation: alloc::vec![Vec::new(); problem.constraints.len()],
            ..Diagnostics::default()
        },
        snapshots: Vec::new(),
        keep_snapshots: config.snapshot_stride > 0,
        residual: Array::zeros(&grid.centered_shape()),
        interp: CenteredField::zeros(grid),
    };
    let p = rec.record(0, &x, &x.v);
    if let Some(cb) = hooks.progress.as_mut() {
        cb(&p);
    }
    let mut last_snapshot = Vec::new();
    let mut current = Vec::new();
    if config.residual_target > 0.0 {
        x.flatten_into(&mut last_snapshot);
    }

    let mut done = config.iterations;
    for it in 1..=config.iterations {
        if let Some(flag) = hooks.cancel {
            if flag.load(Ordering::Relaxed) {
                return Err(Error::Cancelled { iteration: it - 1 });
            }
        }
        let mut ce_error: Option<Error> = None;
        {
            let mut jobs: Vec<Job<'_>> = Vec::with_capacity(m + parts + 1);
            let (pi_first, pi_rest) = pi.split_at_mut(2);
            let (pi1, pi2) = pi_first.split_at_mut(1);
            let Pair { u: pi1_u, v: pi1_v } = &mut pi1[0];
            let y1 = &y[0];
            let ce = &ce;
            let err = &mut ce_error;
            jobs.push(Box::new(move || {
                copy_into(pi1_u.components_mut(), y1.u.components());
                if let Err(e) = ce.project_in_place(pi1_u) {
                    *err = Some(e);
                }
            }));
            match block {
                DensityBlock::Energy { gamma, delta } => {
                    for chunk in ProxChunk::new(&y1.v, pi1_v).split(parts) {
                        jobs.push(Box::new(move || chunk.run(gamma, delta)));
                    }
                }
                DensityBlock::Nonnegative => {
                    jobs.push(Box::new(move || {
                        copy_into(pi1_v.components_mut(), y1.v.components());
                        pi1_v.rho.as_mut_slice().iter_mut().for_each(|r| *r = r.max(0.0));
                    }));
                }
            }
            let y2 = &y[1];
            let pi2 = &mut pi2[0];
            let consistency = &consistency;
            jobs.push(Box::new(move || {
                consistency.project_into(&y2.u, &y2.v, &mut pi2.u, &mut pi2.v)
            }));
            for ((pk, yk), c) in pi_rest.iter_mut().zip(&y[2..]).zip(&problem.constraints) {
                jobs.push(Box::new(move || {
                    copy_into(pk.u.components_mut(), yk.u.components());
                    copy_into(pk.v.components_mut(), yk.v.components());
                    c.project_in_place(grid, &mut pk.v);
                }));
            }
            executor.execute(jobs);
        }
        if let Some(e) = ce_error {
            return Err(e);
        }

        consensus_update(executor, parts, alpha, &mut x, &mut y, &pi);

        if it % NAN_CHECK_EVERY == 0 && !x.is_finite() {
            return Err(Error::NonFinite { iteration: it });
        }
        let at_stride = config.snapshot_stride > 0 && it % config.snapshot_stride == 0;
        if at_stride || it == config.iterations {
            let p = rec.record(it, &x, &pi[0].v);
            if let Some(cb) = hooks.progress.as_mut() {
                cb(&p);
            }
            if config.residual_target > 0.0 && it < config.iterations {
                x.flatten_into(&mut current);
                let diff: f64 = current
                    .iter()
                    .zip(&last_snapshot)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let norm = crate::linalg::norm2(&current);
                core::mem::swap(&mut current, &mut last_snapshot);
                if norm > 0.0 && libm::sqrt(diff) <= config.residual_target * norm {
                    done = it;
                    break;
                }
            }
        }
    }
    if !x.is_finite() {
        return Err(Error::NonFinite { iteration: done });
    }
    if rec.diag.iterations.last() != Some(&done) {
        rec.record(done, &x, &pi[0].v);
    }

    let mut fin = Vec::new();
    x.flatten_into(&mut fin);
    let norm_f = crate::linalg::norm2(&fin);
    rec.diag.relative_error = rec
        .snapshots
        .iter()
        .map(|s| {
            let d: f64 = s.iter().zip(&fin).map(|(a, b)| (a - b) * (a - b)).sum();
            if norm_f > 0.0 {
                libm::sqrt(d) / norm_f
            } else {
                libm::sqrt(d)
            }
        })
        .collect();
    if rec.keep_snapshots {
        rec.diag.rate = fit_convergence_rate(&rec.diag.iterations, &rec.diag.relative_error);
    }
    let report = ConstraintReport::evaluate(grid, &problem.constraints, &x.v)?;
    let energy = *rec.diag.energy.last().expect("at least one record");
    let ce_residual = *rec.diag.ce_residual.last().expect("at least one record");
    let consistency_residual = *rec
        .diag
        .consistency_residual
        .last()
        .expect("at least one record");
    Ok(RunOutput {
        x,
        iterations: done,
        diagnostics: rec.diag,
        report,
        energy,
        ce_residual,
        consistency_residual,
    })
}

/// `π̄ = (1/m)Σπ_k`, `y_k ← y_k + α(2π̄ − x − π_k)`, `x ← x + α(π̄ − x)`,
/// elementwise with the block sum taken in block order.
fn consensus_update(
    executor: &dyn Executor,
    parts: usize,
    alpha: f64,
    x: &mut Pair,
    y: &mut [Pair],
    pi: &[Pair],
) {
    let m = pi.len();
    let inv_m = 1.0 / m as f64;
    let mut y_iters: Vec<_> = y.iter_mut().map(|p| p.slices_mut().into_iter()).collect();
    let mut pi_iters: Vec<_> = pi.iter().map(|p| p.slices().into_iter()).collect();
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for xc in x.slices_mut() {
        let mut ys: Vec<&mut [f64]> = y_iters.iter_mut().map(|it| it.next().expect("same layout")).collect();
        let mut ps: Vec<&[f64]> = pi_iters.iter_mut().map(|it| it.next().expect("same layout")).collect();
        let n = xc.len();
        let size = n.div_ceil(parts).max(1);
        let mut xrest = xc;
        while !xrest.is_empty() {
            let take = size.min(xrest.len());
            let (xh, xt) = xrest.split_at_mut(take);
            xrest = xt;
            let mut yh = Vec::with_capacity(m);
            for slot in ys.iter_mut() {
                let (a, b) = core::mem::take(slot).split_at_mut(take);
                yh.push(a);
                *slot = b;
            }
            let mut ph = Vec::with_capacity(m);
            for slot in ps.iter_mut() {
                let (a, b) = slot.split_at(take);
                ph.push(a);
                *slot = b;
            }
            jobs.push(Box::new(move || update_chunk(alpha, inv_m, xh, yh, &ph)));
        }
    }
    executor.execute(jobs);
}

fn update_chunk(alpha: f64, inv_m: f64, x: &mut [f64], mut ys: Vec<&mut [f64]>, ps: &[&[f64]]) {
    for i in 0..x.len() {
        let mut s = 0.0;
        for p in ps {
            s += p[i];
        }
        let pbar = s * inv_m;
        let xi = x[i];
        for (y, p) in ys.iter_mut().zip(ps) {
            y[i] += alpha * (2.0 * pbar - xi - p[i]);
        }
        x[i] = xi + alpha * (pbar - xi);
    }
}
