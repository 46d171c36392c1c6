use crate::grid::{interpolate, Array, CenteredField, GridSpec, StaggeredField};
use crate::{Error, Result};

/// Density interpolation used for the starting path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// `ρ̄(t) = (1−t)ρ0 + tρ1`.
    #[default]
    Linear,
    /// `ρ̄(t) = ((1−t)√ρ0 + t√ρ1)²`.
    Hellinger,
}

/// Starting point `(U, V = I(U))` satisfying the continuity equation and the
/// boundary data: zero momentum and `ζ̄` the forward time difference of `ρ̄`.
pub fn init_path(
    grid: &GridSpec,
    rho0: &Array,
    rho1: &Array,
    mode: InitMode,
) -> Result<(StaggeredField, CenteredField)> {
    let spatial = grid.spatial_shape();
    rho0.expect_shape(&spatial, "rho0")?;
    rho1.expect_shape(&spatial, "rho1")?;
    for (name, r) in [("rho0", rho0), ("rho1", rho1)] {
        if r.as_slice().iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidField(alloc::format!(
                "{name} must be finite and nonnegative"
            )));
        }
    }
    let n0 = grid.time_cells();
    let mut u = StaggeredField::zeros(grid);
    for f in 0..=n0 {
        let t = grid.face_time(f);
        let slab = u.rho_bar.slab_mut(f);
        for ((x, &a), &b) in slab.iter_mut().zip(rho0.as_slice()).zip(rho1.as_slice()) {
            *x = if f == 0 {
                a
            } else if f == n0 || a == b {
                b
            } else {
                match mode {
                    InitMode::Linear => (1.0 - t) * a + t * b,
                    InitMode::Hellinger => {
                        let s = (1.0 - t) * libm::sqrt(a) + t * libm::sqrt(b);
                        s * s
                    }
                }
            };
        }
    }
    let inv_h0 = 1.0 / grid.time_step();
    for j0 in 0..n0 {
        for i in 0..grid.spatial_len() {
            let d = (u.rho_bar.slab(j0 + 1)[i] - u.rho_bar.slab(j0)[i]) * inv_h0;
            u.zeta_bar.slab_mut(j0)[i] = d;
        }
    }
    let v = interpolate(grid, &u)?;
    Ok((u, v))
}
