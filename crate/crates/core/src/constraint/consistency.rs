use alloc::vec::Vec;

use crate::grid::{interpolate_into, AxisLines, Boundary, CenteredField, GridSpec, StaggeredField};
use crate::linalg::{CyclicTridiagonal, Tridiagonal};
use crate::Result;

enum AxisSolver {
    Open(Tridiagonal),
    Cyclic(CyclicTridiagonal),
}

impl AxisSolver {
    /// Factors `Id + IᵀI` for an averaging operator over `faces` faces.
    fn new(faces: usize, boundary: Boundary) -> Self {
        match boundary {
            Boundary::Neumann => {
                let mut diag = alloc::vec![1.5; faces];
                diag[0] = 1.25;
                diag[faces - 1] = 1.25;
                let off = alloc::vec![0.25; faces - 1];
                Self::Open(Tridiagonal::new(&off, &diag, &off))
            }
            Boundary::Periodic => Self::Cyclic(CyclicTridiagonal::new(faces, 1.5, 0.25)),
        }
    }

    fn solve_lines(&self, data: &mut [f64], lines: &AxisLines) {
        match self {
            Self::Open(t) => t.solve_lines(data, lines),
            Self::Cyclic(c) => c.solve_lines(data, lines),
        }
    }
}

/// Projection onto `{(U, V) : V = I(U)}` with prefactored line solvers.
pub struct ConsistencyProjector {
    grid: GridSpec,
    time: AxisSolver,
    space: Vec<AxisSolver>,
}

impl ConsistencyProjector {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            time: AxisSolver::new(grid.time_cells() + 1, Boundary::Neumann),
            space: (0..grid.dim())
                .map(|k| AxisSolver::new(grid.face_count(k), grid.boundary(k)))
                .collect(),
        }
    }

    pub fn project(&self, u: &StaggeredField, v: &CenteredField) -> Result<(StaggeredField, CenteredField)> {
        u.check(&self.grid)?;
        v.check(&self.grid)?;
        let mut u_out = StaggeredField::zeros(&self.grid);
        let mut v_out = CenteredField::zeros(&self.grid);
        self.project_into(u, v, &mut u_out, &mut v_out);
        Ok((u_out, v_out))
    }

    /// `U′ = (Id + IᵀI)⁻¹(U + IᵀV)`, `V′ = I(U′)`. Shapes must already match.
    pub fn project_into(
        &self,
        u: &StaggeredField,
        v: &CenteredField,
        u_out: &mut StaggeredField,
        v_out: &mut CenteredField,
    ) {
        crate::grid::interpolate_adjoint_into(&self.grid, v, u_out);
        for (o, i) in u_out.components_mut().zip(u.components()) {
            for (a, b) in o.as_mut_slice().iter_mut().zip(i.as_slice()) {
                *a += b;
            }
        }
        let lines = AxisLines::new(u_out.rho_bar.shape(), 0);
        self.time.solve_lines(u_out.rho_bar.as_mut_slice(), &lines);
        for (k, solver) in self.space.iter().enumerate() {
            let w = &mut u_out.omega_bar[k];
            let lines = AxisLines::new(w.shape(), k + 1);
            solver.solve_lines(w.as_mut_slice(), &lines);
        }
        u_out.zeta_bar.scale(0.5);
        interpolate_into(&self.grid, u_out, v_out);
    }
}

/// Nearest pair `(U′, V′)` with `V′ = I(U′)`.
pub fn project_consistency(
    grid: &GridSpec,
    u: &StaggeredField,
    v: &CenteredField,
) -> Result<(StaggeredField, CenteredField)> {
    ConsistencyProjector::new(grid).project(u, v)
}
