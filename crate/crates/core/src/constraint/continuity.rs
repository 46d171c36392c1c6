use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{
    apply_boundary_in_place, continuity_residual_into, Array, AxisLines, Boundary, BoundaryValues,
    GridSpec, StaggeredField,
};
use crate::linalg::{axpy, dot, CyclicTridiagonal, SpectralBasis, Tridiagonal};
use crate::{Error, Result};

/// Strategy for the normal equations `Â Âᵀ p = r` of the continuity projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Direct solve: eigenbasis on every axis but the last, banded solve per
    /// mode along the last axis.
    #[default]
    Spectral,
    /// Matrix-free conjugate gradients, relative tolerance `1e-10`,
    /// at most ten sweeps per free coefficient.
    ConjugateGradient,
}

const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
enum LineSolver {
    Open(Tridiagonal),
    Cyclic(CyclicTridiagonal),
}

/// Euclidean projection onto `{U : (div − s_z)(U) = 0, b(U) = b0}`.
///
/// The boundary slots are set to `b0`; the free coefficients move along
/// `−Âᵀp` where `Â` is `div − s_z` restricted to them. With `h_a` the axis steps,
/// `Â Âᵀ = 1 + Σ_a L_a/h_a²` is a Kronecker sum of 1-D second-difference
/// matrices (Neumann on time and on no-flux axes, circulant on periodic axes).
#[derive(Debug, Clone)]
pub struct ContinuityProjector {
    grid: GridSpec,
    b0: BoundaryValues,
    solver: LinearSolver,
    /// Eigenbases of all axes but the last (time first).
    bases: Vec<SpectralBasis>,
    /// One factored system along the last axis per mode of the other axes.
    lines: Vec<LineSolver>,
    free_dofs: usize,
}

impl ContinuityProjector {
    pub fn new(grid: &GridSpec, b0: BoundaryValues, solver: LinearSolver) -> Result<Self> {
        b0.check(grid)?;
        let last = grid.dim() - 1;
        let mut bases = Vec::with_capacity(grid.dim());
        let mut scales = Vec::with_capacity(grid.dim());
        bases.push(SpectralBasis::neumann(grid.time_cells()));
        scales.push(1.0 / (grid.time_step() * grid.time_step()));
        for k in 0..last {
            bases.push(match grid.boundary(k) {
                Boundary::Neumann => SpectralBasis::neumann(grid.cells(k)),
                Boundary::Periodic => SpectralBasis::periodic(grid.cells(k)),
            });
            scales.push(1.0 / (grid.step(k) * grid.step(k)));
        }
        let mode_shape: Vec<usize> = bases.iter().map(SpectralBasis::len).collect();
        let modes = Array::from_fn(&mode_shape, |idx| {
            idx.iter()
                .zip(&bases)
                .zip(&scales)
                .map(|((&i, b), s)| s * b.eigenvalues()[i])
                .sum::<f64>()
        });
        let n = grid.cells(last);
        let s = 1.0 / (grid.step(last) * grid.step(last));
        let lines = modes
            .as_slice()
            .iter()
            .map(|&mu| match grid.boundary(last) {
                Boundary::Neumann => {
                    let mut diag = vec![1.0 + mu + 2.0 * s; n];
                    diag[0] = 1.0 + mu + s;
                    diag[n - 1] = 1.0 + mu + s;
                    let off = vec![-s; n - 1];
                    LineSolver::Open(Tridiagonal::new(&off, &diag, &off))
                }
                Boundary::Periodic => LineSolver::Cyclic(CyclicTridiagonal::new(n, 1.0 + mu + 2.0 * s, -s)),
            })
            .collect();
        let total: usize = StaggeredField::zeros(grid).len();
        let free_dofs = total - b0.to_flat().len();
        Ok(Self {
            grid: grid.clone(),
            b0,
            solver,
            bases,
            lines,
            free_dofs,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn boundary(&self) -> &BoundaryValues {
        &self.b0
    }

    pub fn solver(&self) -> LinearSolver {
        self.solver
    }

    pub fn project(&self, u: &StaggeredField) -> Result<StaggeredField> {
        u.check(&self.grid)?;
        let mut out = u.clone();
        self.project_in_place(&mut out)?;
        Ok(out)
    }

    /// In-place [`project`](Self::project); shapes must already be validated.
    pub fn project_in_place(&self, u: &mut StaggeredField) -> Result<()> {
        apply_boundary_in_place(&self.grid, u, &self.b0);
        let mut r = Array::zeros(&self.grid.centered_shape());
        continuity_residual_into(&self.grid, u, &mut r);
        let p = match self.solver {
            LinearSolver::Spectral => self.solve_spectral(r),
            LinearSolver::ConjugateGradient => self.solve_cg(&r)?,
        };
        self.subtract_free_adjoint(&p, u);
        Ok(())
    }

    fn solve_spectral(&self, r: Array) -> Array {
        let shape = self.grid.centered_shape();
        let mut a = r.into_vec();
        let mut b = vec![0.0; a.len()];
        for (axis, basis) in self.bases.iter().enumerate() {
            basis.forward(&shape, axis, &a, &mut b);
            core::mem::swap(&mut a, &mut b);
        }
        let n = *shape.last().expect("at least one spatial axis");
        let single = AxisLines {
            outer: 1,
            len: n,
            inner: 1,
        };
        for (line, solver) in a.chunks_exact_mut(n).zip(&self.lines) {
            match solver {
                LineSolver::Open(t) => t.solve(line),
                LineSolver::Cyclic(c) => c.solve_lines(line, &single),
            }
        }
        for (axis, basis) in self.bases.iter().enumerate() {
            basis.inverse(&shape, axis, &a, &mut b);
            core::mem::swap(&mut a, &mut b);
        }
        Array::from_vec(&shape, a).expect("shape preserved")
    }

    /// `Â Âᵀ p`, applied through the grid operators.
    fn apply_normal(&self, p: &Array, work: &mut StaggeredField, out: &mut Array) {
        work.components_mut().for_each(|c| c.fill(0.0));
        self.subtract_free_adjoint(p, work);
        continuity_residual_into(&self.grid, work, out);
        out.scale(-1.0);
    }

    fn solve_cg(&self, r: &Array) -> Result<Array> {
        let shape = self.grid.centered_shape();
        let mut x = Array::zeros(&shape);
        let mut res = r.clone();
        let mut dir = r.clone();
        let mut ad = Array::zeros(&shape);
        let mut work = StaggeredField::zeros(&self.grid);
        let target = CG_TOL * crate::linalg::norm2(r.as_slice());
        let mut rr = dot(res.as_slice(), res.as_slice());
        let cap = 10 * self.free_dofs.max(1);
        let mut it = 0;
        while libm::sqrt(rr) > target {
            if it == cap {
                return Err(Error::LinearSolve {
                    iterations: it,
                    residual: libm::sqrt(rr),
                });
            }
            self.apply_normal(&dir, &mut work, &mut ad);
            let alpha = rr / dot(dir.as_slice(), ad.as_slice());
            axpy(alpha, dir.as_slice(), x.as_mut_slice());
            axpy(-alpha, ad.as_slice(), res.as_mut_slice());
            let rr_new = dot(res.as_slice(), res.as_slice());
            let beta = rr_new / rr;
            for (d, q) in dir.as_mut_slice().iter_mut().zip(res.as_slice()) {
                *d = q + beta * *d;
            }
            rr = rr_new;
            it += 1;
        }
        Ok(x)
    }

    /// `U ← U − Âᵀp`; boundary slots are left untouched.
    fn subtract_free_adjoint(&self, p: &Array, u: &mut StaggeredField) {
        let g = &self.grid;
        let n0 = g.time_cells();
        let inv_h0 = 1.0 / g.time_step();
        for f in 1..n0 {
            let lo = p.slab(f - 1);
            let hi = p.slab(f);
            for ((x, a), b) in u.rho_bar.slab_mut(f).iter_mut().zip(lo).zip(hi) {
                *x -= (a - b) * inv_h0;
            }
        }
        let ps = p.as_slice();
        for k in 0..g.dim() {
            let inv_h = 1.0 / g.step(k);
            let cells = AxisLines::new(p.shape(), k + 1);
            let faces = AxisLines::new(u.omega_bar[k].shape(), k + 1);
            let n = cells.len;
            let w = u.omega_bar[k].as_mut_slice();
            let periodic = g.boundary(k) == Boundary::Periodic;
            let first = if periodic { 0 } else { 1 };
            for o in 0..cells.outer {
                for j in first..n {
                    let jm = if j == 0 { n - 1 } else { j - 1 };
                    for i in 0..cells.inner {
                        w[faces.index(o, j, i)] -=
                            (ps[cells.index(o, jm, i)] - ps[cells.index(o, j, i)]) * inv_h;
                    }
                }
            }
        }
        for (z, q) in u.zeta_bar.as_mut_slice().iter_mut().zip(ps) {
            *z += q;
        }
    }
}

/// One-shot projection onto the continuity set with boundary data `b0`.
pub fn project_continuity(grid: &GridSpec, u: &StaggeredField, b0: &BoundaryValues) -> Result<StaggeredField> {
    ContinuityProjector::new(grid, b0.clone(), LinearSolver::Spectral)?.project(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{boundary_extract, continuity_residual};

    fn sample(g: &GridSpec, seed: f64) -> StaggeredField {
        let mut u = StaggeredField::zeros(g);
        let mut s = seed;
        for c in u.components_mut() {
            for x in c.as_mut_slice() {
                s = (s * 7.13 + 0.377) % 1.0;
                *x = 2.0 * s - 1.0;
            }
        }
        u
    }

    fn grids() -> Vec<GridSpec> {
        vec![
            GridSpec::new(3, &[4], &[1.0], &[Boundary::Neumann]).unwrap(),
            GridSpec::new(4, &[5], &[2.0], &[Boundary::Periodic]).unwrap(),
            GridSpec::new(3, &[4, 2], &[1.0, 0.5], &[Boundary::Neumann, Boundary::Periodic]).unwrap(),
        ]
    }

    #[test]
    fn output_is_feasible_and_boundary_exact() {
        for g in grids() {
            let rho0 = Array::filled(&g.spatial_shape(), 1.0);
            let rho1 = Array::filled(&g.spatial_shape(), 2.0);
            let b0 = BoundaryValues::from_endpoints(&g, &rho0, &rho1).unwrap();
            for solver in [LinearSolver::Spectral, LinearSolver::ConjugateGradient] {
                let proj = ContinuityProjector::new(&g, b0.clone(), solver).unwrap();
                let u = sample(&g, 0.31);
                let p = proj.project(&u).unwrap();
                assert!(continuity_residual(&g, &p).unwrap().max_abs() < 1e-9);
                assert_eq!(boundary_extract(&g, &p).unwrap(), b0);
                let pp = proj.project(&p).unwrap();
                for (a, b) in p.components().zip(pp.components()) {
                    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                        assert!((x - y).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn solvers_agree() {
        for g in grids() {
            let rho0 = Array::filled(&g.spatial_shape(), 0.5);
            let b0 = BoundaryValues::from_endpoints(&g, &rho0, &rho0).unwrap();
            let u = sample(&g, 0.77);
            let a = ContinuityProjector::new(&g, b0.clone(), LinearSolver::Spectral)
                .unwrap()
                .project(&u)
                .unwrap();
            let b = ContinuityProjector::new(&g, b0, LinearSolver::ConjugateGradient)
                .unwrap()
                .project(&u)
                .unwrap();
            for (x, y) in a.components().zip(b.components()) {
                for (p, q) in x.as_slice().iter().zip(y.as_slice()) {
                    assert!((p - q).abs() < 1e-9);
                }
            }
        }
    }
}
