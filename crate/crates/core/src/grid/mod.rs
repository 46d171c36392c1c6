//! Uniform space-time grids over `[0, 1] × [0, L_1] × … × [0, L_n]`.
//!
//! Time is axis 0 of every array. The centered grid samples cell centers
//! `t_j0 = (j0 + ½)/N0`, `x_jk = (jk + ½)·h_k`. The time-staggered grid samples
//! the `N0 + 1` time faces `j0/N0`; the `k`-th space-staggered grid samples the
//! faces `jk·h_k` along axis `k` (`N_k + 1` faces under Neumann, `N_k` faces with
//! cyclic wrap under periodic boundaries).

mod array;
mod field;
mod ops;

pub use array::{Array, AxisLines};
pub use field::{BoundaryValues, CenteredField, FluxFaces, StaggeredField};
pub use ops::{
    apply_boundary, apply_boundary_in_place, boundary_extract, continuity_residual,
    continuity_residual_into, divergence, divergence_into, extract_source, interpolate,
    interpolate_adjoint, interpolate_into, space_time_inner, spatial_inner, weighted_inner,
};
pub(crate) use ops::interpolate_adjoint_into;

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Boundary condition of one spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// No-flux: the momentum vanishes on the two boundary faces.
    Neumann,
    /// Cyclic wrap; no boundary faces.
    Periodic,
}

/// Space-time discretization. Steps are derived from counts and lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    time_cells: usize,
    cells: Vec<usize>,
    lengths: Vec<f64>,
    boundaries: Vec<Boundary>,
}

impl GridSpec {
    pub fn new(
        time_cells: usize,
        cells: &[usize],
        lengths: &[f64],
        boundaries: &[Boundary],
    ) -> Result<Self> {
        if time_cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 time cells, got {time_cells}"
            )));
        }
        if cells.is_empty() {
            return Err(Error::InvalidGrid("need at least one spatial axis".into()));
        }
        if cells.len() != lengths.len() || cells.len() != boundaries.len() {
            return Err(Error::InvalidGrid(format!(
                "axis count mismatch: {} cell counts, {} lengths, {} boundary conditions",
                cells.len(),
                lengths.len(),
                boundaries.len()
            )));
        }
        for (k, (&n, &l)) in cells.iter().zip(lengths).enumerate() {
            if n < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {}: need at least 2 cells, got {n}",
                    k + 1
                )));
            }
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "axis {}: length must be positive and finite, got {l}",
                    k + 1
                )));
            }
        }
        Ok(Self {
            time_cells,
            cells: cells.to_vec(),
            lengths: lengths.to_vec(),
            boundaries: boundaries.to_vec(),
        })
    }

    /// Number of spatial axes `n`.
    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn time_cells(&self) -> usize {
        self.time_cells
    }

    /// Cell count of spatial axis `k` (0-based over spatial axes).
    pub fn cells(&self, k: usize) -> usize {
        self.cells[k]
    }

    pub fn length(&self, k: usize) -> f64 {
        self.lengths[k]
    }

    pub fn boundary(&self, k: usize) -> Boundary {
        self.boundaries[k]
    }

    pub fn spatial_cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }

    /// `h0 = 1/N0`.
    pub fn time_step(&self) -> f64 {
        1.0 / self.time_cells as f64
    }

    /// `h_k = L_k/N_k`.
    pub fn step(&self, k: usize) -> f64 {
        self.lengths[k] / self.cells[k] as f64
    }

    /// `∏ h_k`, the spatial cell volume.
    pub fn spatial_cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.step(k)).product()
    }

    /// `h0 · ∏ h_k`.
    pub fn cell_volume(&self) -> f64 {
        self.time_step() * self.spatial_cell_volume()
    }

    pub fn spatial_shape(&self) -> Vec<usize> {
        self.cells.clone()
    }

    pub fn spatial_len(&self) -> usize {
        self.cells.iter().product()
    }

    /// `[N0, N1, …, Nn]`.
    pub fn centered_shape(&self) -> Vec<usize> {
        let mut shape = Vec::with_capacity(self.dim() + 1);
        shape.push(self.time_cells);
        shape.extend_from_slice(&self.cells);
        shape
    }

    pub fn centered_len(&self) -> usize {
        self.time_cells * self.spatial_len()
    }

    /// `[N0 + 1, N1, …, Nn]`.
    pub fn time_staggered_shape(&self) -> Vec<usize> {
        let mut shape = self.centered_shape();
        shape[0] += 1;
        shape
    }

    /// Shape of the momentum staggered along spatial axis `k`.
    pub fn space_staggered_shape(&self, k: usize) -> Vec<usize> {
        let mut shape = self.centered_shape();
        shape[k + 1] = self.face_count(k);
        shape
    }

    /// Number of momentum faces along spatial axis `k`.
    pub fn face_count(&self, k: usize) -> usize {
        match self.boundaries[k] {
            Boundary::Neumann => self.cells[k] + 1,
            Boundary::Periodic => self.cells[k],
        }
    }

    /// Centered time `t_j0 = (j0 + ½)/N0`.
    pub fn centered_time(&self, j0: usize) -> f64 {
        (j0 as f64 + 0.5) / self.time_cells as f64
    }

    /// Time of face `f`, `f/N0`.
    pub fn face_time(&self, f: usize) -> f64 {
        f as f64 / self.time_cells as f64
    }

    /// Cell-center coordinate `(j + ½)·h_k` on spatial axis `k`.
    pub fn cell_center(&self, k: usize, j: usize) -> f64 {
        (j as f64 + 0.5) * self.step(k)
    }

    /// Cell-center coordinates of every spatial cell, in row-major order.
    pub fn spatial_centers(&self) -> Vec<Vec<f64>> {
        let n = self.spatial_len();
        let mut out = Vec::with_capacity(n);
        let mut idx = alloc::vec![0usize; self.dim()];
        for _ in 0..n {
            out.push(
                idx.iter()
                    .enumerate()
                    .map(|(k, &j)| self.cell_center(k, j))
                    .collect(),
            );
            for k in (0..self.dim()).rev() {
                idx[k] += 1;
                if idx[k] < self.cells[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }
}
