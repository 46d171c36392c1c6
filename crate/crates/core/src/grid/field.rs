use alloc::format;
use alloc::vec::Vec;

use super::{Array, Boundary, GridSpec};
use crate::{Error, Result};

/// `V = (ρ, ω_1..ω_n, ζ)`, all sampled on the centered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredField {
    pub rho: Array,
    pub omega: Vec<Array>,
    pub zeta: Array,
}

/// `U = (ρ̄, ω̄_1..ω̄_n, ζ̄)`: ρ̄ on time faces, ω̄_k on the faces of axis `k`,
/// ζ̄ on the centered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    pub rho_bar: Array,
    pub omega_bar: Vec<Array>,
    pub zeta_bar: Array,
}

impl CenteredField {
    pub fn zeros(grid: &GridSpec) -> Self {
        let shape = grid.centered_shape();
        Self {
            rho: Array::zeros(&shape),
            omega: (0..grid.dim()).map(|_| Array::zeros(&shape)).collect(),
            zeta: Array::zeros(&shape),
        }
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        let shape = grid.centered_shape();
        self.rho.expect_shape(&shape, "rho")?;
        if self.omega.len() != grid.dim() {
            return Err(Error::InvalidField(format!(
                "expected {} momentum components, got {}",
                grid.dim(),
                self.omega.len()
            )));
        }
        for (k, w) in self.omega.iter().enumerate() {
            w.expect_shape(&shape, &format!("omega[{k}]"))?;
        }
        self.zeta.expect_shape(&shape, "zeta")
    }

    pub fn components(&self) -> impl Iterator<Item = &Array> {
        core::iter::once(&self.rho)
            .chain(self.omega.iter())
            .chain(core::iter::once(&self.zeta))
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Array> {
        core::iter::once(&mut self.rho)
            .chain(self.omega.iter_mut())
            .chain(core::iter::once(&mut self.zeta))
    }

    /// Total number of coefficients.
    pub fn len(&self) -> usize {
        self.components().map(Array::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unweighted Euclidean inner product of the raw coefficients.
    pub fn dot(&self, other: &Self) -> f64 {
        self.components()
            .zip(other.components())
            .map(|(a, b)| crate::linalg::dot(a.as_slice(), b.as_slice()))
            .sum()
    }

    pub fn scale(&mut self, a: f64) {
        self.components_mut().for_each(|c| c.scale(a));
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .all(|c| c.as_slice().iter().all(|x| x.is_finite()))
    }
}

impl StaggeredField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            rho_bar: Array::zeros(&grid.time_staggered_shape()),
            omega_bar: (0..grid.dim())
                .map(|k| Array::zeros(&grid.space_staggered_shape(k)))
                .collect(),
            zeta_bar: Array::zeros(&grid.centered_shape()),
        }
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        self.rho_bar
            .expect_shape(&grid.time_staggered_shape(), "rho_bar")?;
        if self.omega_bar.len() != grid.dim() {
            return Err(Error::InvalidField(format!(
                "expected {} staggered momentum components, got {}",
                grid.dim(),
                self.omega_bar.len()
            )));
        }
        for (k, w) in self.omega_bar.iter().enumerate() {
            w.expect_shape(&grid.space_staggered_shape(k), &format!("omega_bar[{k}]"))?;
        }
        self.zeta_bar
            .expect_shape(&grid.centered_shape(), "zeta_bar")
    }

    pub fn components(&self) -> impl Iterator<Item = &Array> {
        core::iter::once(&self.rho_bar)
            .chain(self.omega_bar.iter())
            .chain(core::iter::once(&self.zeta_bar))
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Array> {
        core::iter::once(&mut self.rho_bar)
            .chain(self.omega_bar.iter_mut())
            .chain(core::iter::once(&mut self.zeta_bar))
    }

    pub fn len(&self) -> usize {
        self.components().map(Array::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.components()
            .zip(other.components())
            .map(|(a, b)| crate::linalg::dot(a.as_slice(), b.as_slice()))
            .sum()
    }

    pub fn scale(&mut self, a: f64) {
        self.components_mut().for_each(|c| c.scale(a));
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .all(|c| c.as_slice().iter().all(|x| x.is_finite()))
    }
}

/// The two boundary faces of a momentum component on a Neumann axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxFaces {
    /// Spatial axis (0-based).
    pub axis: usize,
    /// Face `j_k = 0`, shape of the staggered momentum with axis `k` removed.
    pub low: Array,
    /// Face `j_k = N_k`.
    pub high: Array,
}

/// Values of the boundary slots of a staggered field.
///
/// Flattened order: initial density, final density, then for every Neumann
/// axis in increasing order its low and high momentum faces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues {
    pub rho_initial: Array,
    pub rho_final: Array,
    pub flux: Vec<FluxFaces>,
}

impl BoundaryValues {
    /// `b0 = (ρ0, ρ1, 0, 0)`: prescribed endpoint densities and no-flux walls.
    pub fn from_endpoints(grid: &GridSpec, rho0: &Array, rho1: &Array) -> Result<Self> {
        let spatial = grid.spatial_shape();
        rho0.expect_shape(&spatial, "rho0")?;
        rho1.expect_shape(&spatial, "rho1")?;
        let flux = (0..grid.dim())
            .filter(|&k| grid.boundary(k) == Boundary::Neumann)
            .map(|k| {
                let shape = flux_face_shape(grid, k);
                FluxFaces {
                    axis: k,
                    low: Array::zeros(&shape),
                    high: Array::zeros(&shape),
                }
            })
            .collect();
        Ok(Self {
            rho_initial: rho0.clone(),
            rho_final: rho1.clone(),
            flux,
        })
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        let spatial = grid.spatial_shape();
        self.rho_initial.expect_shape(&spatial, "rho_initial")?;
        self.rho_final.expect_shape(&spatial, "rho_final")?;
        let neumann: Vec<usize> = (0..grid.dim())
            .filter(|&k| grid.boundary(k) == Boundary::Neumann)
            .collect();
        if self.flux.len() != neumann.len() {
            return Err(Error::InvalidField(format!(
                "expected flux faces for {} Neumann axes, got {}",
                neumann.len(),
                self.flux.len()
            )));
        }
        for (faces, &k) in self.flux.iter().zip(&neumann) {
            if faces.axis != k {
                return Err(Error::InvalidField(format!(
                    "flux faces out of order: expected axis {k}, got {}",
                    faces.axis
                )));
            }
            let shape = flux_face_shape(grid, k);
            faces.low.expect_shape(&shape, "flux low face")?;
            faces.high.expect_shape(&shape, "flux high face")?;
        }
        Ok(())
    }

    /// Concatenation of all slots in the documented order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(self.rho_initial.as_slice());
        out.extend_from_slice(self.rho_final.as_slice());
        for f in &self.flux {
            out.extend_from_slice(f.low.as_slice());
            out.extend_from_slice(f.high.as_slice());
        }
        out
    }
}

/// Shape of one boundary face of `ω̄_k`: the staggered shape without axis `k + 1`.
pub(crate) fn flux_face_shape(grid: &GridSpec, k: usize) -> Vec<usize> {
    let mut shape = grid.space_staggered_shape(k);
    shape.remove(k + 1);
    shape
}
