//! Run directories.
//!
//! ```text
//! <out>/
//!   config.toml           the document that was solved (overrides applied)
//!   summary.json          resolved problem, final scalars, per-slice masses
//!   diagnostics.json      traces recorded during the solve and the rate fit
//!   rho/slice_0000.bin    centered density, one file per time cell
//!   rho_bar/face_0000.bin staggered density, one file per time face
//!   fields/*.bin          full arrays: rho, omega_<k>, zeta, rho_bar, omega_bar_<k>, zeta_bar
//!   endpoints/rho0.bin, endpoints/rho1.bin
//!   constraints/<i>_<name>/h_rho.bin, h_omega_<k>.bin, h_zeta.bin
//! ```
//!
//! Arrays use the binary format of [`crate::raster`]. JSON numbers that are
//! infinite or NaN are written as `null`.

use std::fs;
use std::path::{Path, PathBuf};

use cuot_core::{fit_convergence_rate, Array, Boundary, RateFit, SolveResult};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::slice_masses;
use crate::raster::{read_array, write_array};
use crate::scenario::Scenario;

pub const SUMMARY: &str = "summary.json";
pub const DIAGNOSTICS: &str = "diagnostics.json";
pub const CONFIG: &str = "config.toml";

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn finite_all(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().copied().map(finite).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub time_cells: usize,
    pub cells: Vec<usize>,
    pub lengths: Vec<f64>,
    pub boundary: Vec<String>,
    pub time_step: f64,
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSummary {
    pub name: String,
    /// `null` for an infinite bound.
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    /// Constraint value at each centered time of the returned path.
    pub values: Vec<f64>,
    pub violations: Vec<f64>,
    pub directory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub alpha: f64,
    pub gamma: f64,
    pub iterations_requested: usize,
    pub iterations_run: usize,
    pub snapshot_stride: usize,
    pub ce_tolerance: f64,
    pub residual_target: f64,
    pub linear_solver: String,
    pub init: String,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: Option<String>,
    pub grid: GridSummary,
    pub delta: f64,
    pub solver: SolverSummary,
    pub energy: Option<f64>,
    pub ce_residual: f64,
    pub consistency_residual: f64,
    pub max_violation: f64,
    pub converged: bool,
    /// Total mass of each centered time slice of `rho`.
    pub mass: Vec<f64>,
    /// Total mass of each time face of `rho_bar`.
    pub face_mass: Vec<f64>,
    pub centered_times: Vec<f64>,
    pub constraints: Vec<ConstraintSummary>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub q: f64,
    pub r_squared: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl From<RateFit> for RateSummary {
    fn from(f: RateFit) -> Self {
        Self {
            q: f.q,
            r_squared: f.r_squared,
            slope: f.slope,
            intercept: f.intercept,
            points: f.points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationTrace {
    pub name: String,
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsDoc {
    pub iterations: Vec<usize>,
    pub energy: Vec<Option<f64>>,
    pub ce_residual: Vec<f64>,
    pub consistency_residual: Vec<f64>,
    pub violation: Vec<ViolationTrace>,
    pub max_violation: Vec<f64>,
    /// `‖x_k − x_final‖₂ / ‖x_final‖₂` over the full iterate.
    pub relative_error: Vec<f64>,
    pub rate: Option<RateSummary>,
    pub wall_clock_seconds: f64,
}

impl DiagnosticsDoc {
    /// Refits the rate from the stored relative-error trace.
    pub fn refit(&self) -> Option<RateSummary> {
        fit_convergence_rate(&self.iterations, &self.relative_error).map(Into::into)
    }
}

fn boundary_name(b: Boundary) -> String {
    match b {
        Boundary::Neumann => "neumann".into(),
        Boundary::Periodic => "periodic".into(),
    }
}

fn safe_name(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

fn slices(a: &Array) -> Vec<Array> {
    let inner = &a.shape()[1..];
    (0..a.shape()[0])
        .map(|j| Array::from_vec(inner, a.slab(j).to_vec()).expect("slab matches inner shape"))
        .collect()
}

pub fn summarize(scn: &Scenario, result: &SolveResult, threads: usize, wall_clock: f64) -> Summary {
    let g = &scn.problem.grid;
    let cfg = &scn.solver;
    let constraints = scn
        .problem
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| ConstraintSummary {
            name: scn.constraint_names[i].clone(),
            lower: finite_all(c.lower()),
            upper: finite_all(c.upper()),
            values: result.report.values[i].clone(),
            violations: result.report.violations[i].clone(),
            directory: format!("constraints/{i}_{}", safe_name(&scn.constraint_names[i])),
        })
        .collect();
    Summary {
        name: scn.doc.name.clone(),
        grid: GridSummary {
            time_cells: g.time_cells(),
            cells: g.spatial_cells().to_vec(),
            lengths: g.lengths().to_vec(),
            boundary: g.boundaries().iter().map(|&b| boundary_name(b)).collect(),
            time_step: g.time_step(),
            steps: (0..g.dim()).map(|k| g.step(k)).collect(),
        },
        delta: scn.problem.delta.value(),
        solver: SolverSummary {
            alpha: cfg.alpha,
            gamma: result.gamma,
            iterations_requested: cfg.iterations,
            iterations_run: result.iterations,
            snapshot_stride: cfg.snapshot_stride,
            ce_tolerance: cfg.ce_tolerance,
            residual_target: cfg.residual_target,
            linear_solver: format!("{:?}", cfg.linear_solver).to_lowercase(),
            init: format!("{:?}", cfg.init).to_lowercase(),
            threads,
        },
        energy: finite(result.energy),
        ce_residual: result.ce_residual,
        consistency_residual: result.consistency_residual,
        max_violation: result.report.max_violation,
        converged: result.converged,
        mass: slice_masses(g, &result.v.rho),
        face_mass: slice_masses(g, &result.u.rho_bar),
        centered_times: (0..g.time_cells()).map(|j| g.centered_time(j)).collect(),
        constraints,
        wall_clock_seconds: wall_clock,
    }
}

pub fn diagnostics_doc(scn: &Scenario, result: &SolveResult, wall_clock: f64) -> DiagnosticsDoc {
    let d = &result.diagnostics;
    DiagnosticsDoc {
        iterations: d.iterations.clone(),
        energy: finite_all(&d.energy),
        ce_residual: d.ce_residual.clone(),
        consistency_residual: d.consistency_residual.clone(),
        violation: d
            .violation
            .iter()
            .zip(&scn.constraint_names)
            .map(|(t, n)| ViolationTrace {
                name: n.clone(),
                trace: t.clone(),
            })
            .collect(),
        max_violation: d.max_violation(),
        relative_error: d.relative_error.clone(),
        rate: d.rate.map(Into::into),
        wall_clock_seconds: wall_clock,
    }
}

/// Writes the full run directory.
pub fn export_run(out: &Path, scn: &Scenario, result: &SolveResult, threads: usize, wall_clock: f64) -> Result<()> {
    mkdir(out)?;
    let config = scn.doc.to_toml()?;
    fs::write(out.join(CONFIG), config).map_err(|e| Error::io(out.join(CONFIG), e))?;
    write_json(&out.join(SUMMARY), &summarize(scn, result, threads, wall_clock))?;
    write_json(&out.join(DIAGNOSTICS), &diagnostics_doc(scn, result, wall_clock))?;

    for (dir, stem, a) in [("rho", "slice", &result.v.rho), ("rho_bar", "face", &result.u.rho_bar)] {
        let d = out.join(dir);
        mkdir(&d)?;
        for (j, s) in slices(a).iter().enumerate() {
            write_array(&d.join(format!("{stem}_{j:04}.bin")), s)?;
        }
    }

    let fields = out.join("fields");
    mkdir(&fields)?;
    write_array(&fields.join("rho.bin"), &result.v.rho)?;
    write_array(&fields.join("zeta.bin"), &result.v.zeta)?;
    write_array(&fields.join("rho_bar.bin"), &result.u.rho_bar)?;
    write_array(&fields.join("zeta_bar.bin"), &result.u.zeta_bar)?;
    for (k, (w, wb)) in result.v.omega.iter().zip(&result.u.omega_bar).enumerate() {
        write_array(&fields.join(format!("omega_{k}.bin")), w)?;
        write_array(&fields.join(format!("omega_bar_{k}.bin")), wb)?;
    }

    let ends = out.join("endpoints");
    mkdir(&ends)?;
    write_array(&ends.join("rho0.bin"), &scn.problem.rho0)?;
    write_array(&ends.join("rho1.bin"), &scn.problem.rho1)?;

    for (i, c) in scn.problem.constraints.iter().enumerate() {
        let d = out.join(format!("constraints/{i}_{}", safe_name(&scn.constraint_names[i])));
        mkdir(&d)?;
        write_array(&d.join("h_rho.bin"), c.h_rho())?;
        write_array(&d.join("h_zeta.bin"), c.h_zeta())?;
        for (k, h) in c.h_omega().iter().enumerate() {
            write_array(&d.join(format!("h_omega_{k}.bin")), h)?;
        }
    }
    Ok(())
}

/// An exported run directory.
#[derive(Debug, Clone)]
pub struct RunDir {
    pub path: PathBuf,
    pub summary: Summary,
    pub diagnostics: DiagnosticsDoc,
}

impl RunDir {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(Self {
            path: path.to_path_buf(),
            summary: read_json(&path.join(SUMMARY))?,
            diagnostics: read_json(&path.join(DIAGNOSTICS))?,
        })
    }

    pub fn array(&self, relative: &str) -> Result<Array> {
        read_array(&self.path.join(relative))
    }

    pub fn rho_slice(&self, j: usize) -> Result<Array> {
        self.array(&format!("rho/slice_{j:04}.bin"))
    }

    pub fn rho_bar_face(&self, f: usize) -> Result<Array> {
        self.array(&format!("rho_bar/face_{f:04}.bin"))
    }
}
