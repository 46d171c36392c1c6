use alloc::format;
use alloc::vec::Vec;

use crate::grid::{Array, CenteredField, GridSpec};
use crate::{Error, Result};

/// Per-time affine box constraint `ℓ_j0 ≤ 𝓗(t_j0; V) ≤ u_j0` with
/// `𝓗(t_j0; V) = Σ_x (H^ρ ρ + Σ_k H^ω_k ω_k + H^ζ ζ)(t_j0, x) · ∏h_k`.
///
/// Equalities use `ℓ = u`; a row with bounds `(−∞, +∞)` is inactive.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBoxConstraint {
    h_rho: Array,
    h_omega: Vec<Array>,
    h_zeta: Array,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// `‖a_j0‖²_w = Σ_x (H^ρ² + Σ H^ω_k² + H^ζ²) ∏h_k`.
    norms: Vec<f64>,
    /// Whether the row at `j0` can ever move `V`.
    active: Vec<bool>,
}

impl AffineBoxConstraint {
    /// Validates weights and bounds against `grid`.
    ///
    /// Fails with [`Error::InfeasibleConstraint`] when a time row has zero weight
    /// but its bounds exclude `0`.
    pub fn new(
        grid: &GridSpec,
        h_rho: Array,
        h_omega: Vec<Array>,
        h_zeta: Array,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let shape = grid.centered_shape();
        h_rho.expect_shape(&shape, "H_rho")?;
        h_zeta.expect_shape(&shape, "H_zeta")?;
        if h_omega.len() != grid.dim() {
            return Err(Error::InvalidField(format!(
                "expected {} momentum weights, got {}",
                grid.dim(),
                h_omega.len()
            )));
        }
        for (k, h) in h_omega.iter().enumerate() {
            h.expect_shape(&shape, &format!("H_omega[{k}]"))?;
        }
        let n0 = grid.time_cells();
        if lower.len() != n0 || upper.len() != n0 {
            return Err(Error::InvalidParameter(format!(
                "bounds need {n0} entries, got {} lower and {} upper",
                lower.len(),
                upper.len()
            )));
        }
        let weights = core::iter::once(&h_rho)
            .chain(h_omega.iter())
            .chain(core::iter::once(&h_zeta));
        if weights
            .clone()
            .any(|h| h.as_slice().iter().any(|x| !x.is_finite()))
        {
            return Err(Error::InvalidParameter("constraint weights must be finite".into()));
        }
        let vol = grid.spatial_cell_volume();
        let mut norms = Vec::with_capacity(n0);
        let mut active = Vec::with_capacity(n0);
        for j0 in 0..n0 {
            let (l, u) = (lower[j0], upper[j0]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!(
                    "time index {j0}: invalid bounds [{l}, {u}]"
                )));
            }
            let norm: f64 = weights
                .clone()
                .map(|h| h.slab(j0).iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>()
                * vol;
            let unbounded = l == f64::NEG_INFINITY && u == f64::INFINITY;
            if norm == 0.0 && !unbounded && !(l <= 0.0 && 0.0 <= u) {
                return Err(Error::InfeasibleConstraint(format!(
                    "time index {j0}: zero weights but bounds [{l}, {u}] exclude 0"
                )));
            }
            norms.push(norm);
            active.push(norm > 0.0 && !unbounded);
        }
        Ok(Self {
            h_rho,
            h_omega,
            h_zeta,
            lower,
            upper,
            norms,
            active,
        })
    }

    /// Constraint on the density alone: `ℓ ≤ Σ H^ρ ρ ∏h_k ≤ u`.
    pub fn on_density(grid: &GridSpec, h_rho: Array, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let shape = grid.centered_shape();
        let zeros = || Array::zeros(&shape);
        Self::new(
            grid,
            h_rho,
            (0..grid.dim()).map(|_| zeros()).collect(),
            zeros(),
            lower,
            upper,
        )
    }

    pub fn h_rho(&self) -> &Array {
        &self.h_rho
    }

    pub fn h_omega(&self) -> &[Array] {
        &self.h_omega
    }

    pub fn h_zeta(&self) -> &Array {
        &self.h_zeta
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `‖a_j0‖²_w` per time index.
    pub fn weight_norms(&self) -> &[f64] {
        &self.norms
    }

    fn weights(&self) -> impl Iterator<Item = &Array> + Clone {
        core::iter::once(&self.h_rho)
            .chain(self.h_omega.iter())
            .chain(core::iter::once(&self.h_zeta))
    }

    fn check_field(&self, grid: &GridSpec, v: &CenteredField) -> Result<()> {
        v.check(grid)?;
        if self.h_rho.shape() != v.rho.shape() || self.h_omega.len() != v.omega.len() {
            return Err(Error::InvalidField("constraint built for a different grid".into()));
        }
        Ok(())
    }

    /// `𝓗(t_j0; V)`.
    pub fn value(&self, grid: &GridSpec, v: &CenteredField, j0: usize) -> Result<f64> {
        self.check_field(grid, v)?;
        if j0 >= grid.time_cells() {
            return Err(Error::InvalidParameter(format!(
                "time index {j0} out of range"
            )));
        }
        Ok(self.value_unchecked(grid, v, j0))
    }

    pub(crate) fn value_unchecked(&self, grid: &GridSpec, v: &CenteredField, j0: usize) -> f64 {
        let s: f64 = self
            .weights()
            .zip(v.components())
            .map(|(h, x)| crate::linalg::dot(h.slab(j0), x.slab(j0)))
            .sum();
        s * grid.spatial_cell_volume()
    }

    /// `𝓗(t_j0; V)` for every time index.
    pub fn values(&self, grid: &GridSpec, v: &CenteredField) -> Result<Vec<f64>> {
        self.check_field(grid, v)?;
        Ok((0..grid.time_cells())
            .map(|j0| self.value_unchecked(grid, v, j0))
            .collect())
    }

    /// Distance of `h` to `[ℓ_j0, u_j0]`.
    pub fn violation_at(&self, j0: usize, h: f64) -> f64 {
        if h > self.upper[j0] {
            h - self.upper[j0]
        } else if h < self.lower[j0] {
            self.lower[j0] - h
        } else {
            0.0
        }
    }

    /// Euclidean projection of `V` onto the constraint set.
    pub fn project(&self, grid: &GridSpec, v: &CenteredField) -> Result<CenteredField> {
        self.check_field(grid, v)?;
        let mut out = v.clone();
        self.project_in_place(grid, &mut out);
        Ok(out)
    }

    /// In-place [`project`](Self::project); shapes must already be validated.
    pub fn project_in_place(&self, grid: &GridSpec, v: &mut CenteredField) {
        for j0 in 0..grid.time_cells() {
            if !self.active[j0] {
                continue;
            }
            let h = self.value_unchecked(grid, v, j0);
            let lambda = if h > self.upper[j0] {
                h - self.upper[j0]
            } else if h < self.lower[j0] {
                h - self.lower[j0]
            } else {
                continue;
            };
            let step = lambda / self.norms[j0];
            for (w, x) in self.weights().zip(v.components_mut()) {
                crate::linalg::axpy(-step, w.slab(j0), x.slab_mut(j0));
            }
        }
    }
}

/// Constraint values and violations of a centered field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// `values[i][j0] = 𝓗_i(t_j0; V)`.
    pub values: Vec<Vec<f64>>,
    /// Distance of each value to its bounds.
    pub violations: Vec<Vec<f64>>,
    pub max_violation: f64,
}

impl ConstraintReport {
    pub fn evaluate(
        grid: &GridSpec,
        constraints: &[AffineBoxConstraint],
        v: &CenteredField,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(constraints.len());
        let mut violations = Vec::with_capacity(constraints.len());
        let mut max_violation: f64 = 0.0;
        for c in constraints {
            let vals = c.values(grid, v)?;
            let viol: Vec<f64> = vals
                .iter()
                .enumerate()
                .map(|(j0, &h)| c.violation_at(j0, h))
                .collect();
            max_violation = viol.iter().fold(max_violation, |m, &x| m.max(x));
            values.push(vals);
            violations.push(viol);
        }
        Ok(Self {
            values,
            violations,
            max_violation,
        })
    }
}
