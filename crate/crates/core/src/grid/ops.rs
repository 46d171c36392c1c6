//! Linear operators between staggered and centered fields.
//!
//! Adjoints are taken with respect to the unweighted inner product of the raw
//! coefficient arrays; cell volumes only enter [`spatial_inner`] and
//! [`space_time_inner`].

use super::field::flux_face_shape;
use super::{Array, AxisLines, Boundary, BoundaryValues, CenteredField, FluxFaces, GridSpec, StaggeredField};
use crate::linalg::dot;
use crate::Result;

#[inline]
fn next_face(j: usize, faces: usize) -> usize {
    if j + 1 == faces {
        0
    } else {
        j + 1
    }
}

/// Averages staggered values onto cell centers: `V = I(U)`.
pub fn interpolate(grid: &GridSpec, u: &StaggeredField) -> Result<CenteredField> {
    u.check(grid)?;
    let mut v = CenteredField::zeros(grid);
    interpolate_into(grid, u, &mut v);
    Ok(v)
}

/// [`interpolate`] into a preallocated field. Shapes must already match.
pub fn interpolate_into(grid: &GridSpec, u: &StaggeredField, v: &mut CenteredField) {
    for j0 in 0..grid.time_cells() {
        let lo = u.rho_bar.slab(j0);
        let hi = u.rho_bar.slab(j0 + 1);
        for ((r, a), b) in v.rho.slab_mut(j0).iter_mut().zip(lo).zip(hi) {
            *r = 0.5 * (a + b);
        }
    }
    for k in 0..grid.dim() {
        let src = AxisLines::new(u.omega_bar[k].shape(), k + 1);
        let dst = AxisLines::new(v.omega[k].shape(), k + 1);
        let faces = src.len;
        let input = u.omega_bar[k].as_slice();
        let out = v.omega[k].as_mut_slice();
        for o in 0..dst.outer {
            for j in 0..dst.len {
                let jn = next_face(j, faces);
                for i in 0..dst.inner {
                    out[dst.index(o, j, i)] =
                        0.5 * (input[src.index(o, j, i)] + input[src.index(o, jn, i)]);
                }
            }
        }
    }
    v.zeta
        .as_mut_slice()
        .copy_from_slice(u.zeta_bar.as_slice());
}

/// Transpose of [`interpolate`].
pub fn interpolate_adjoint(grid: &GridSpec, v: &CenteredField) -> Result<StaggeredField> {
    v.check(grid)?;
    let mut u = StaggeredField::zeros(grid);
    interpolate_adjoint_into(grid, v, &mut u);
    Ok(u)
}

pub(crate) fn interpolate_adjoint_into(grid: &GridSpec, v: &CenteredField, u: &mut StaggeredField) {
    u.rho_bar.fill(0.0);
    for j0 in 0..grid.time_cells() {
        let src = v.rho.slab(j0);
        for (r, s) in u.rho_bar.slab_mut(j0).iter_mut().zip(src) {
            *r += 0.5 * s;
        }
        for (r, s) in u.rho_bar.slab_mut(j0 + 1).iter_mut().zip(src) {
            *r += 0.5 * s;
        }
    }
    for k in 0..grid.dim() {
        let dst = AxisLines::new(u.omega_bar[k].shape(), k + 1);
        let src = AxisLines::new(v.omega[k].shape(), k + 1);
        let faces = dst.len;
        let input = v.omega[k].as_slice();
        let out = u.omega_bar[k].as_mut_slice();
        out.iter_mut().for_each(|x| *x = 0.0);
        for o in 0..src.outer {
            for j in 0..src.len {
                let jn = next_face(j, faces);
                for i in 0..src.inner {
                    let half = 0.5 * input[src.index(o, j, i)];
                    out[dst.index(o, j, i)] += half;
                    out[dst.index(o, jn, i)] += half;
                }
            }
        }
    }
    u.zeta_bar
        .as_mut_slice()
        .copy_from_slice(v.zeta.as_slice());
}

/// Forward face-to-cell differences of `(ρ̄, ω̄)`.
pub fn divergence(grid: &GridSpec, u: &StaggeredField) -> Result<Array> {
    u.check(grid)?;
    let mut out = Array::zeros(&grid.centered_shape());
    divergence_into(grid, u, &mut out);
    Ok(out)
}

pub fn divergence_into(grid: &GridSpec, u: &StaggeredField, out: &mut Array) {
    let inv_h0 = 1.0 / grid.time_step();
    for j0 in 0..grid.time_cells() {
        let lo = u.rho_bar.slab(j0);
        let hi = u.rho_bar.slab(j0 + 1);
        for ((d, a), b) in out.slab_mut(j0).iter_mut().zip(lo).zip(hi) {
            *d = (b - a) * inv_h0;
        }
    }
    for k in 0..grid.dim() {
        let inv_h = 1.0 / grid.step(k);
        let src = AxisLines::new(u.omega_bar[k].shape(), k + 1);
        let dst = AxisLines::new(out.shape(), k + 1);
        let faces = src.len;
        let input = u.omega_bar[k].as_slice();
        let out = out.as_mut_slice();
        for o in 0..dst.outer {
            for j in 0..dst.len {
                let jn = next_face(j, faces);
                for i in 0..dst.inner {
                    out[dst.index(o, j, i)] +=
                        (input[src.index(o, jn, i)] - input[src.index(o, j, i)]) * inv_h;
                }
            }
        }
    }
}

/// The source term `s_z(U) = ζ̄`.
pub fn extract_source(u: &StaggeredField) -> Array {
    u.zeta_bar.clone()
}

/// Discrete continuity residual `(div − s_z)(U)`.
pub fn continuity_residual(grid: &GridSpec, u: &StaggeredField) -> Result<Array> {
    u.check(grid)?;
    let mut out = Array::zeros(&grid.centered_shape());
    continuity_residual_into(grid, u, &mut out);
    Ok(out)
}

pub fn continuity_residual_into(grid: &GridSpec, u: &StaggeredField, out: &mut Array) {
    divergence_into(grid, u, out);
    for (r, z) in out.as_mut_slice().iter_mut().zip(u.zeta_bar.as_slice()) {
        *r -= z;
    }
}

/// Reads the boundary slots `b(U)`.
pub fn boundary_extract(grid: &GridSpec, u: &StaggeredField) -> Result<BoundaryValues> {
    u.check(grid)?;
    let spatial = grid.spatial_shape();
    let rho_initial = Array::from_vec(&spatial, u.rho_bar.slab(0).to_vec())?;
    let rho_final = Array::from_vec(&spatial, u.rho_bar.slab(grid.time_cells()).to_vec())?;
    let mut flux = alloc::vec::Vec::new();
    for k in 0..grid.dim() {
        if grid.boundary(k) != Boundary::Neumann {
            continue;
        }
        let lines = AxisLines::new(u.omega_bar[k].shape(), k + 1);
        let shape = flux_face_shape(grid, k);
        let mut low = Array::zeros(&shape);
        let mut high = Array::zeros(&shape);
        let src = u.omega_bar[k].as_slice();
        for o in 0..lines.outer {
            for i in 0..lines.inner {
                low.as_mut_slice()[o * lines.inner + i] = src[lines.index(o, 0, i)];
                high.as_mut_slice()[o * lines.inner + i] = src[lines.index(o, lines.len - 1, i)];
            }
        }
        flux.push(FluxFaces { axis: k, low, high });
    }
    Ok(BoundaryValues {
        rho_initial,
        rho_final,
        flux,
    })
}

/// Returns `U` with exactly the slots read by [`boundary_extract`] overwritten by `b0`.
pub fn apply_boundary(grid: &GridSpec, u: &StaggeredField, b0: &BoundaryValues) -> Result<StaggeredField> {
    u.check(grid)?;
    b0.check(grid)?;
    let mut out = u.clone();
    apply_boundary_in_place(grid, &mut out, b0);
    Ok(out)
}

/// In-place [`apply_boundary`]; shapes must already be validated.
pub fn apply_boundary_in_place(grid: &GridSpec, u: &mut StaggeredField, b0: &BoundaryValues) {
    u.rho_bar
        .slab_mut(0)
        .copy_from_slice(b0.rho_initial.as_slice());
    u.rho_bar
        .slab_mut(grid.time_cells())
        .copy_from_slice(b0.rho_final.as_slice());
    for faces in &b0.flux {
        let k = faces.axis;
        let lines = AxisLines::new(u.omega_bar[k].shape(), k + 1);
        let dst = u.omega_bar[k].as_mut_slice();
        for o in 0..lines.outer {
            for i in 0..lines.inner {
                dst[lines.index(o, 0, i)] = faces.low.as_slice()[o * lines.inner + i];
                dst[lines.index(o, lines.len - 1, i)] = faces.high.as_slice()[o * lines.inner + i];
            }
        }
    }
}

/// `weight · Σ v_i w_i`.
pub fn weighted_inner(v: &[f64], w: &[f64], weight: f64) -> f64 {
    weight * dot(v, w)
}

/// Discrete `L²(Ω)` inner product of two spatial slices.
pub fn spatial_inner(grid: &GridSpec, v: &[f64], w: &[f64]) -> f64 {
    weighted_inner(v, w, grid.spatial_cell_volume())
}

/// Discrete `L²([0,1] × Ω)` inner product of two centered fields.
pub fn space_time_inner(grid: &GridSpec, a: &CenteredField, b: &CenteredField) -> f64 {
    grid.cell_volume() * a.dot(b)
}
