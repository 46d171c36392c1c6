//! Scalar summaries of density paths.

use cuot_core::{Array, Boundary, GridSpec};

/// `Σ_x a(j, x)·∏h_k` for every leading index `j`.
pub fn slice_masses(grid: &GridSpec, a: &Array) -> Vec<f64> {
    let vol = grid.spatial_cell_volume();
    (0..a.shape()[0]).map(|j| a.slab(j).iter().sum::<f64>() * vol).collect()
}

/// Spatial `L²` norm of `a(j, ·) − b(j, ·)` for every slice.
pub fn slice_distances(grid: &GridSpec, a: &Array, b: &Array) -> Vec<f64> {
    let vol = grid.spatial_cell_volume();
    (0..a.shape()[0])
        .map(|j| {
            let s: f64 = a.slab(j).iter().zip(b.slab(j)).map(|(x, y)| (x - y) * (x - y)).sum();
            (s * vol).sqrt()
        })
        .collect()
}

/// Mean over slices of [`slice_distances`].
pub fn mean_l2_distance(grid: &GridSpec, a: &Array, b: &Array) -> f64 {
    let d = slice_distances(grid, a, b);
    d.iter().sum::<f64>() / d.len() as f64
}

/// Rescales every slice to total mass `target`; empty slices stay zero.
pub fn normalize_slices(grid: &GridSpec, a: &Array, target: f64) -> Array {
    let masses = slice_masses(grid, a);
    let mut out = a.clone();
    for (j, m) in masses.iter().enumerate() {
        if *m > 0.0 {
            for x in out.slab_mut(j) {
                *x *= target / m;
            }
        }
    }
    out
}

/// Per-slice `‖ρ − R_*ρ‖₂` for the antipodal map `R(θ) = θ + L/2` on a
/// periodic 1-D grid with an even cell count; `None` on other grids.
pub fn antipodal_asymmetry(grid: &GridSpec, rho: &Array) -> Option<Vec<f64>> {
    if grid.dim() != 1 || grid.boundary(0) != Boundary::Periodic || grid.cells(0) % 2 != 0 {
        return None;
    }
    let n = grid.cells(0);
    let h = grid.step(0);
    Some(
        (0..rho.shape()[0])
            .map(|j| {
                let s = rho.slab(j);
                let d: f64 = (0..n).map(|i| (s[i] - s[(i + n / 2) % n]).powi(2)).sum();
                (d * h).sqrt()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses_and_distances() {
        let g = GridSpec::new(2, &[4], &[2.0], &[Boundary::Neumann]).unwrap();
        let a = Array::from_vec(&[2, 4], vec![1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 2.0]).unwrap();
        assert_eq!(slice_masses(&g, &a), vec![2.0, 2.0]);
        let z = Array::zeros(&[2, 4]);
        assert_eq!(slice_distances(&g, &a, &z), vec![2f64.sqrt(), 2.0]);
        let n = normalize_slices(&g, &a, 1.0);
        assert_eq!(slice_masses(&g, &n), vec![1.0, 1.0]);
        assert!(antipodal_asymmetry(&g, &a).is_none());
    }

    #[test]
    fn antipodal_shift() {
        let g = GridSpec::new(2, &[4], &[1.0], &[Boundary::Periodic]).unwrap();
        let a = Array::from_vec(&[2, 4], vec![1.0, 2.0, 1.0, 2.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(antipodal_asymmetry(&g, &a).unwrap(), vec![0.0, (2.0f64 * 0.25).sqrt()]);
    }
}
