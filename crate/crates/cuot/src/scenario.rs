//! Expansion of a [`ConfigDoc`] into a solvable problem.

use std::path::{Path, PathBuf};

use cuot_core::{
    AffineBoxConstraint, Array, Boundary, DeltaParam, Gamma, GridSpec, InitMode, LinearSolver,
    ProblemSpec, SolverConfig,
};

use crate::assets;
use crate::config::{
    BoundDoc, BoundaryDoc, BumpDoc, ConfigDoc, ConstraintDoc, DensityDoc, GammaDoc, InitDoc,
    LinearSolverDoc, Scalar, ShapeDoc, SolverDoc, VectorWeightDoc, WeightDoc,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::raster;
use crate::schedule::Schedule;

/// Resolves file references in a document.
///
/// Relative paths are taken against `base`; paths starting with `builtin:`
/// name data files compiled into the crate.
#[derive(Debug, Clone, Default)]
pub struct Files {
    base: Option<PathBuf>,
}

impl Files {
    pub fn relative_to(dir: impl Into<PathBuf>) -> Self {
        Self { base: Some(dir.into()) }
    }

    /// The directory containing `config`.
    pub fn beside(config: &Path) -> Self {
        Self {
            base: config.parent().map(Path::to_path_buf),
        }
    }

    pub fn load(&self, reference: &str) -> Result<Vec<u8>> {
        if let Some(name) = reference.strip_prefix(assets::PREFIX) {
            return assets::get(name)
                .map(<[u8]>::to_vec)
                .ok_or_else(|| Error::format(reference, "no such built-in data file"));
        }
        let path = match &self.base {
            Some(b) => b.join(reference),
            None => PathBuf::from(reference),
        };
        std::fs::read(&path).map_err(|e| Error::io(path, e))
    }
}

/// A document together with the problem and solver settings it expands to.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub doc: ConfigDoc,
    pub problem: ProblemSpec,
    pub solver: SolverConfig,
    /// Display name of each constraint, in block order.
    pub constraint_names: Vec<String>,
}

impl Scenario {
    /// Reads and expands a configuration file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        build(ConfigDoc::parse(&text)?, &Files::beside(path))
    }
}

pub fn build(doc: ConfigDoc, files: &Files) -> Result<Scenario> {
    let grid = build_grid(&doc)?;
    let delta = DeltaParam::new(constant(&doc.delta, "delta")?)
        .map_err(|e| Error::config("delta", e.to_string()))?;
    let rho0 = density(&grid, &doc.rho0, files, "rho0")?;
    let rho1 = density(&grid, &doc.rho1, files, "rho1")?;
    let mut constraints = Vec::with_capacity(doc.constraints.len());
    let mut names = Vec::with_capacity(doc.constraints.len());
    for (i, c) in doc.constraints.iter().enumerate() {
        let at = format!("constraints[{i}]");
        constraints.push(constraint(&grid, c, files, &at)?);
        names.push(c.name.clone().unwrap_or_else(|| format!("constraint_{i}")));
    }
    let solver = solver_config(&doc.solver)?;
    let problem = ProblemSpec::new(grid, delta, rho0, rho1, constraints)
        .map_err(|e| Error::config("<problem>", e.to_string()))?;
    Ok(Scenario {
        doc,
        problem,
        solver,
        constraint_names: names,
    })
}

fn constant(s: &Scalar, at: &str) -> Result<f64> {
    match s {
        Scalar::Number(x) => Ok(*x),
        Scalar::Expr(text) => {
            let e = Expr::parse(text, 0).map_err(|m| Error::config(at, m))?;
            e.eval(0.0, &[]).map_err(|m| Error::config(at, m))
        }
    }
}

fn build_grid(doc: &ConfigDoc) -> Result<GridSpec> {
    let g = &doc.grid;
    let lengths = g
        .lengths
        .iter()
        .enumerate()
        .map(|(k, s)| constant(s, &format!("grid.lengths[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let bcs: Vec<Boundary> = g
        .boundary
        .iter()
        .map(|b| match b {
            BoundaryDoc::Neumann => Boundary::Neumann,
            BoundaryDoc::Periodic => Boundary::Periodic,
        })
        .collect();
    GridSpec::new(g.time_cells, &g.cells, &lengths, &bcs).map_err(|e| Error::config("grid", e.to_string()))
}

/// Signed offset from `c` to `x` along axis `k`, wrapped on periodic axes.
fn offset(grid: &GridSpec, k: usize, x: f64, c: f64) -> f64 {
    let d = x - c;
    match grid.boundary(k) {
        Boundary::Neumann => d,
        Boundary::Periodic => {
            let l = grid.length(k);
            d - l * (d / l).round()
        }
    }
}

fn spatial_point(grid: &GridSpec, idx: &[usize], out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = grid.cell_center(k, idx[k]);
    }
}

struct Bump {
    center: Vec<f64>,
    std: f64,
    mass: f64,
    cutoff: Option<f64>,
}

fn bump(b: &BumpDoc, dim: usize, at: &str) -> Result<Bump> {
    if b.center.len() != dim {
        return Err(Error::config(
            format!("{at}.center"),
            format!("has {} entries, grid has {dim} axes", b.center.len()),
        ));
    }
    let center = b
        .center
        .iter()
        .enumerate()
        .map(|(k, s)| constant(s, &format!("{at}.center[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let std = constant(&b.std, &format!("{at}.std"))?;
    if !(std > 0.0) {
        return Err(Error::config(format!("{at}.std"), "must be positive"));
    }
    let mass = constant(&b.mass, &format!("{at}.mass"))?;
    Ok(Bump {
        center,
        std,
        mass,
        cutoff: b.cutoff,
    })
}

/// Samples `Σ_b mass_b·N(x; c_b, σ_b² I)` at the cell centers.
pub fn sample_gaussians(grid: &GridSpec, bumps: &[(Vec<f64>, f64, f64, Option<f64>)]) -> Array {
    let n = grid.dim();
    let mut x = vec![0.0; n];
    Array::from_fn(&grid.spatial_shape(), |idx| {
        spatial_point(grid, idx, &mut x);
        let mut total = 0.0;
        for (c, s, m, cut) in bumps {
            let r2: f64 = (0..n).map(|k| (offset(grid, k, x[k], c[k]) / s).powi(2)).sum();
            if cut.is_some_and(|r| r2 > r * r) {
                continue;
            }
            let norm = (s * (2.0 * std::f64::consts::PI).sqrt()).powi(n as i32);
            total += m * (-0.5 * r2).exp() / norm;
        }
        total
    })
}

fn normalize(grid: &GridSpec, a: &mut Array, target: &Option<Scalar>, at: &str) -> Result<()> {
    if let Some(t) = target {
        let t = constant(t, &format!("{at}.normalize"))?;
        let m = a.sum() * grid.spatial_cell_volume();
        if !(m > 0.0) {
            return Err(Error::config(format!("{at}.normalize"), "density has zero mass"));
        }
        a.scale(t / m);
    }
    Ok(())
}

fn density(grid: &GridSpec, d: &DensityDoc, files: &Files, at: &str) -> Result<Array> {
    let shape = grid.spatial_shape();
    let mut a = match d {
        DensityDoc::Gaussian { bumps, floor, normalize: target } => {
            let bs = bumps
                .iter()
                .enumerate()
                .map(|(i, b)| bump(b, grid.dim(), &format!("{at}.bumps[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let spec: Vec<_> = bs.into_iter().map(|b| (b.center, b.std, b.mass, b.cutoff)).collect();
            let mut a = sample_gaussians(grid, &spec);
            let f = floor.unwrap_or(0.0);
            for v in a.as_mut_slice() {
                *v = (*v + f).max(0.0);
            }
            normalize(grid, &mut a, target, at)?;
            a
        }
        DensityDoc::Expr { expr, normalize: target } => {
            let e = Expr::parse(expr, grid.dim()).map_err(|m| Error::config(format!("{at}.expr"), m))?;
            let mut x = vec![0.0; grid.dim()];
            let mut err = None;
            let mut a = Array::from_fn(&shape, |idx| {
                spatial_point(grid, idx, &mut x);
                match e.eval(0.0, &x) {
                    Ok(v) => v.max(0.0),
                    Err(m) => {
                        err.get_or_insert(m);
                        0.0
                    }
                }
            });
            if let Some(m) = err {
                return Err(Error::config(format!("{at}.expr"), m));
            }
            normalize(grid, &mut a, target, at)?;
            a
        }
        DensityDoc::Inline { values } => {
            if values.len() != grid.spatial_len() {
                return Err(Error::config(
                    format!("{at}.values"),
                    format!("has {} entries, grid has {} cells", values.len(), grid.spatial_len()),
                ));
            }
            Array::from_vec(&shape, values.clone()).map_err(|e| Error::config(at, e.to_string()))?
        }
        DensityDoc::File { path, scale, normalize: target } => {
            let bytes = files.load(path)?;
            let mut a = raster::ingest_bytes(&bytes, &shape).map_err(|m| Error::config(format!("{at}.path"), format!("{path}: {m}")))?;
            if let Some(s) = scale {
                a.scale(*s);
            }
            normalize(grid, &mut a, target, at)?;
            a
        }
    };
    if let Some(i) = a.as_slice().iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::config(
            at,
            format!("entry {i} is {} (densities must be finite and nonnegative)", a.as_slice()[i]),
        ));
    }
    // Keep -0.0 out of exported files.
    for v in a.as_mut_slice() {
        *v += 0.0;
    }
    Ok(a)
}

/// Evaluates `f(t_j0, x)` over the centered grid.
fn centered_field(grid: &GridSpec, mut f: impl FnMut(f64, &[f64], &[usize]) -> Result<f64>) -> Result<Array> {
    let mut x = vec![0.0; grid.dim()];
    let mut err = None;
    let a = Array::from_fn(&grid.centered_shape(), |idx| {
        spatial_point(grid, &idx[1..], &mut x);
        match f(grid.centered_time(idx[0]), &x, &idx[1..]) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(a),
    }
}

fn active(times: &Option<[f64; 2]>, t: f64) -> bool {
    times.is_none_or(|[a, b]| a <= t && t < b)
}

/// Spatial membership tests for one shape.
enum Region {
    Box { min: Vec<f64>, max: Vec<f64> },
    Disk { center: Vec<f64>, radius: f64 },
    Mask { mask: Array, invert: bool },
}

fn region(grid: &GridSpec, s: &ShapeDoc, files: &Files, at: &str) -> Result<(Region, Option<[f64; 2]>)> {
    let n = grid.dim();
    let check = |v: &[f64], name: &str| {
        if v.len() == n {
            Ok(())
        } else {
            Err(Error::config(format!("{at}.{name}"), format!("has {} entries, grid has {n} axes", v.len())))
        }
    };
    Ok(match s {
        ShapeDoc::Box { min, max, times } => {
            check(min, "min")?;
            check(max, "max")?;
            (Region::Box { min: min.clone(), max: max.clone() }, *times)
        }
        ShapeDoc::Disk { center, radius, times } => {
            check(center, "center")?;
            (Region::Disk { center: center.clone(), radius: *radius }, *times)
        }
        ShapeDoc::Mask { path, times, invert } => {
            let bytes = files.load(path)?;
            let a = raster::decode(&bytes)
                .and_then(|a| raster::conform(a, &grid.spatial_shape()))
                .map_err(|m| Error::config(format!("{at}.path"), format!("{path}: {m}")))?;
            (Region::Mask { mask: a, invert: *invert }, *times)
        }
    })
}

impl Region {
    fn contains(&self, grid: &GridSpec, x: &[f64], idx: &[usize]) -> bool {
        match self {
            Region::Box { min, max } => (0..x.len()).all(|k| min[k] <= x[k] && x[k] <= max[k]),
            Region::Disk { center, radius } => {
                let r2: f64 = (0..x.len()).map(|k| offset(grid, k, x[k], center[k]).powi(2)).sum();
                r2 <= radius * radius
            }
            Region::Mask { mask, invert } => (mask.get(idx) != 0.0) != *invert,
        }
    }
}

fn indicator(grid: &GridSpec, shapes: &[ShapeDoc], value: f64, files: &Files, at: &str) -> Result<Array> {
    let regions = shapes
        .iter()
        .enumerate()
        .map(|(i, s)| region(grid, s, files, &format!("{at}.shapes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    centered_field(grid, |t, x, idx| {
        let inside = regions
            .iter()
            .any(|(r, times)| active(times, t) && r.contains(grid, x, idx));
        Ok(if inside { value } else { 0.0 })
    })
}

fn weight(grid: &GridSpec, w: &WeightDoc, files: &Files, at: &str) -> Result<Array> {
    match w {
        WeightDoc::Unit => Ok(Array::filled(&grid.centered_shape(), 1.0)),
        WeightDoc::RegionIndicator { shapes, value } => indicator(grid, shapes, value.unwrap_or(1.0), files, at),
        WeightDoc::Coordinate { axis } => {
            if *axis >= grid.dim() {
                return Err(Error::config(format!("{at}.axis"), format!("grid has {} axes", grid.dim())));
            }
            centered_field(grid, |_, x, _| Ok(x[*axis]))
        }
        WeightDoc::Expr { expr } => {
            let e = Expr::parse(expr, grid.dim()).map_err(|m| Error::config(format!("{at}.expr"), m))?;
            centered_field(grid, |t, x, _| e.eval(t, x).map_err(|m| Error::config(format!("{at}.expr"), m)))
        }
        WeightDoc::File { path } => {
            let bytes = files.load(path)?;
            let a = raster::decode(&bytes).map_err(|m| Error::config(format!("{at}.path"), format!("{path}: {m}")))?;
            broadcast(grid, a).map_err(|m| Error::config(format!("{at}.path"), format!("{path}: {m}")))
        }
    }
}

/// Spreads a spatial array over time, or accepts a full centered array.
fn broadcast(grid: &GridSpec, a: Array) -> Result<Array, String> {
    let centered = grid.centered_shape();
    if a.shape() == centered {
        return Ok(a);
    }
    let a = raster::conform(a, &grid.spatial_shape())?;
    Ok(Array::from_fn(&centered, |idx| a.get(&idx[1..])))
}

fn vector_weight(grid: &GridSpec, w: &VectorWeightDoc, files: &Files, at: &str) -> Result<Vec<Array>> {
    let n = grid.dim();
    match w {
        VectorWeightDoc::Components { axes } => {
            if axes.len() != n {
                return Err(Error::config(format!("{at}.axes"), format!("has {} entries, grid has {n} axes", axes.len())));
            }
            axes.iter()
                .enumerate()
                .map(|(k, a)| weight(grid, a, files, &format!("{at}.axes[{k}]")))
                .collect()
        }
        VectorWeightDoc::VectorField { vector, region: shapes, path } => match (vector, path) {
            (Some(v), None) => {
                if v.len() != n {
                    return Err(Error::config(format!("{at}.vector"), format!("has {} entries, grid has {n} axes", v.len())));
                }
                let mask = match shapes {
                    Some(s) => indicator(grid, s, 1.0, files, &format!("{at}.region"))?,
                    None => Array::filled(&grid.centered_shape(), 1.0),
                };
                Ok(v.iter()
                    .map(|&c| {
                        let mut m = mask.clone();
                        m.scale(c);
                        m
                    })
                    .collect())
            }
            (None, Some(p)) => {
                if shapes.is_some() {
                    return Err(Error::config(format!("{at}.region"), "only applies to a constant `vector`"));
                }
                let bytes = files.load(p)?;
                let a = raster::decode(&bytes).map_err(|m| Error::config(format!("{at}.path"), format!("{p}: {m}")))?;
                split_last_axis(grid, a).map_err(|m| Error::config(format!("{at}.path"), format!("{p}: {m}")))
            }
            _ => Err(Error::config(at, "give exactly one of `vector` and `path`")),
        },
    }
}

fn split_last_axis(grid: &GridSpec, a: Array) -> Result<Vec<Array>, String> {
    let n = grid.dim();
    let shape = a.shape().to_vec();
    if shape.last() != Some(&n) {
        return Err(format!("last axis of shape {shape:?} must have length {n}"));
    }
    (0..n)
        .map(|k| {
            let data: Vec<f64> = a.as_slice().iter().skip(k).step_by(n).copied().collect();
            let c = Array::from_vec(&shape[..shape.len() - 1], data).map_err(|e| e.to_string())?;
            broadcast(grid, c)
        })
        .collect()
}

fn bounds(grid: &GridSpec, b: &BoundDoc, files: &Files, at: &str) -> Result<Vec<f64>> {
    let n0 = grid.time_cells();
    let v = match b {
        BoundDoc::Number(x) => vec![*x; n0],
        BoundDoc::List(v) => {
            if v.len() != n0 {
                return Err(Error::config(at, format!("has {} entries, expected one per time cell ({n0})", v.len())));
            }
            v.clone()
        }
        BoundDoc::Expr(text) => {
            let e = Expr::parse(text, 0).map_err(|m| Error::config(at, m))?;
            (0..n0)
                .map(|j| e.eval(grid.centered_time(j), &[]).map_err(|m| Error::config(at, m)))
                .collect::<Result<Vec<_>>>()?
        }
        BoundDoc::Schedule { schedule, scale } => {
            let bytes = files.load(schedule)?;
            let s = Schedule::parse(&bytes).map_err(|m| Error::config(at, format!("{schedule}: {m}")))?;
            let k = scale.unwrap_or(1.0);
            s.resample(n0).into_iter().map(|x| k * x).collect()
        }
    };
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::config(at, "bounds must not be NaN"));
    }
    Ok(v)
}

fn constraint(grid: &GridSpec, c: &ConstraintDoc, files: &Files, at: &str) -> Result<AffineBoxConstraint> {
    let zeros = || Array::zeros(&grid.centered_shape());
    let h_rho = match &c.rho {
        Some(w) => weight(grid, w, files, &format!("{at}.rho"))?,
        None => zeros(),
    };
    let h_omega = match &c.omega {
        Some(w) => vector_weight(grid, w, files, &format!("{at}.omega"))?,
        None => (0..grid.dim()).map(|_| zeros()).collect(),
    };
    let h_zeta = match &c.zeta {
        Some(w) => weight(grid, w, files, &format!("{at}.zeta"))?,
        None => zeros(),
    };
    if c.rho.is_none() && c.omega.is_none() && c.zeta.is_none() {
        return Err(Error::config(at, "constraint has no weights (set `rho`, `omega` or `zeta`)"));
    }
    let n0 = grid.time_cells();
    let (lower, upper) = match (&c.equal, &c.lower, &c.upper) {
        (Some(e), None, None) => {
            let v = bounds(grid, e, files, &format!("{at}.equal"))?;
            (v.clone(), v)
        }
        (Some(_), _, _) => return Err(Error::config(at, "`equal` excludes `lower` and `upper`")),
        (None, None, None) => return Err(Error::config(at, "constraint has no bounds")),
        (None, lo, hi) => (
            match lo {
                Some(b) => bounds(grid, b, files, &format!("{at}.lower"))?,
                None => vec![f64::NEG_INFINITY; n0],
            },
            match hi {
                Some(b) => bounds(grid, b, files, &format!("{at}.upper"))?,
                None => vec![f64::INFINITY; n0],
            },
        ),
    };
    AffineBoxConstraint::new(grid, h_rho, h_omega, h_zeta, lower, upper).map_err(|e| match e {
        cuot_core::Error::InfeasibleConstraint(m) => Error::Core(cuot_core::Error::InfeasibleConstraint(format!("{at}: {m}"))),
        e => Error::config(at, e.to_string()),
    })
}

fn solver_config(s: &SolverDoc) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    let gamma = match &s.gamma {
        None => d.gamma,
        Some(GammaDoc::Fixed(g)) => Gamma::Fixed(*g),
        Some(GammaDoc::Named(n)) if n == "auto" => Gamma::Auto,
        Some(GammaDoc::Named(n)) => {
            return Err(Error::config("solver.gamma", format!("expected a number or \"auto\", got \"{n}\"")))
        }
    };
    let cfg = SolverConfig {
        alpha: s.alpha.unwrap_or(d.alpha),
        gamma,
        iterations: s.iterations.unwrap_or(d.iterations),
        snapshot_stride: s.snapshot_stride.unwrap_or(d.snapshot_stride),
        ce_tolerance: s.ce_tolerance.unwrap_or(d.ce_tolerance),
        residual_target: s.residual_target.unwrap_or(d.residual_target),
        linear_solver: match s.linear_solver {
            None => d.linear_solver,
            Some(LinearSolverDoc::Spectral) => LinearSolver::Spectral,
            Some(LinearSolverDoc::ConjugateGradient) => LinearSolver::ConjugateGradient,
        },
        init: match s.init {
            None => d.init,
            Some(InitDoc::Linear) => InitMode::Linear,
            Some(InitDoc::Hellinger) => InitMode::Hellinger,
        },
        thread_count: s.threads.or(d.thread_count),
    };
    cfg.validate().map_err(|e| Error::config("solver", e.to_string()))?;
    Ok(cfg)
}
