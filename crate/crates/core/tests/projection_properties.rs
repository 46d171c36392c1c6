mod common;

use common::{
    dist, flat_centered, flat_staggered, max_diff, random_centered, random_constraint, random_positive,
    random_staggered, rng, small_grids,
};
use cuot_core::constraint::{ConsistencyProjector, ContinuityProjector};
use cuot_core::grid::{
    boundary_extract, continuity_residual, divergence, interpolate, interpolate_adjoint, AxisLines,
};
use cuot_core::{Array, Boundary, BoundaryValues, CenteredField, GridSpec, LinearSolver, StaggeredField};
use proptest::prelude::*;

fn grid(i: usize) -> GridSpec {
    small_grids().swap_remove(i % 4)
}

fn pair_flat(u: &StaggeredField, v: &CenteredField) -> Vec<f64> {
    let mut x = flat_staggered(u);
    x.extend(flat_centered(v));
    x
}

fn lin_stag(a: f64, x: &StaggeredField, b: f64, y: &StaggeredField) -> StaggeredField {
    let mut out = x.clone();
    for ((o, p), q) in out.components_mut().zip(x.components()).zip(y.components()) {
        for ((o, p), q) in o.as_mut_slice().iter_mut().zip(p.as_slice()).zip(q.as_slice()) {
            *o = a * p + b * q;
        }
    }
    out
}

/// Cyclic shift by one cell along `axis` of an array.
fn shift(a: &Array, axis: usize) -> Array {
    let lines = AxisLines::new(a.shape(), axis);
    let mut out = a.clone();
    for o in 0..lines.outer {
        for j in 0..lines.len {
            let jn = (j + 1) % lines.len;
            for i in 0..lines.inner {
                out.as_mut_slice()[lines.index(o, jn, i)] = a.as_slice()[lines.index(o, j, i)];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interpolation_adjoint_identity(seed in any::<u64>(), gi in 0usize..4) {
        let g = grid(gi);
        let mut r = rng(seed);
        let u = random_staggered(&g, &mut r);
        let v = random_centered(&g, &mut r);
        let lhs = interpolate(&g, &u).unwrap().dot(&v);
        let rhs = u.dot(&interpolate_adjoint(&g, &v).unwrap());
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn operators_are_linear(seed in any::<u64>(), gi in 0usize..4, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = grid(gi);
        let mut r = rng(seed);
        let x = random_staggered(&g, &mut r);
        let y = random_staggered(&g, &mut r);
        let z = lin_stag(a, &x, b, &y);
        let ix = flat_centered(&interpolate(&g, &x).unwrap());
        let iy = flat_centered(&interpolate(&g, &y).unwrap());
        let iz = flat_centered(&interpolate(&g, &z).unwrap());
        for ((p, q), s) in ix.iter().zip(&iy).zip(&iz) {
            prop_assert!((a * p + b * q - s).abs() <= 1e-12 * (1.0 + s.abs()) * 10.0);
        }
        let dx = divergence(&g, &x).unwrap();
        let dy = divergence(&g, &y).unwrap();
        let dz = divergence(&g, &z).unwrap();
        let scale = 1.0 + dz.max_abs();
        for ((p, q), s) in dx.as_slice().iter().zip(dy.as_slice()).zip(dz.as_slice()) {
            prop_assert!((a * p + b * q - s).abs() <= 1e-12 * scale * 10.0);
        }
    }

    #[test]
    fn consistency_projection_idempotent_nonexpansive(seed in any::<u64>(), gi in 0usize..4) {
        let g = grid(gi);
        let mut r = rng(seed);
        let p = ConsistencyProjector::new(&g);
        let (u1, v1) = (random_staggered(&g, &mut r), random_centered(&g, &mut r));
        let (u2, v2) = (random_staggered(&g, &mut r), random_centered(&g, &mut r));
        let (a, b) = p.project(&u1, &v1).unwrap();
        let (aa, bb) = p.project(&a, &b).unwrap();
        prop_assert!(max_diff(&pair_flat(&a, &b), &pair_flat(&aa, &bb)) <= 1e-9);
        let (c, d) = p.project(&u2, &v2).unwrap();
        prop_assert!(
            dist(&pair_flat(&a, &b), &pair_flat(&c, &d))
                <= dist(&pair_flat(&u1, &v1), &pair_flat(&u2, &v2)) + 1e-9
        );
        let back = interpolate(&g, &a).unwrap();
        prop_assert!(max_diff(&flat_centered(&back), &flat_centered(&b)) <= 1e-12);
    }

    #[test]
    fn continuity_projection_idempotent_nonexpansive(seed in any::<u64>(), gi in 0usize..4, cg in any::<bool>()) {
        let g = grid(gi);
        let mut r = rng(seed);
        let b0 = BoundaryValues::from_endpoints(
            &g,
            &random_positive(&g.spatial_shape(), &mut r),
            &random_positive(&g.spatial_shape(), &mut r),
        )
        .unwrap();
        let solver = if cg { LinearSolver::ConjugateGradient } else { LinearSolver::Spectral };
        let p = ContinuityProjector::new(&g, b0.clone(), solver).unwrap();
        let x = random_staggered(&g, &mut r);
        let y = random_staggered(&g, &mut r);
        let px = p.project(&x).unwrap();
        let ppx = p.project(&px).unwrap();
        prop_assert!(max_diff(&flat_staggered(&px), &flat_staggered(&ppx)) <= 1e-9);
        let py = p.project(&y).unwrap();
        prop_assert!(
            dist(&flat_staggered(&px), &flat_staggered(&py))
                <= dist(&flat_staggered(&x), &flat_staggered(&y)) + 1e-9
        );
        let xmax = flat_staggered(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(continuity_residual(&g, &px).unwrap().max_abs() <= 1e-9 * (1.0 + xmax));
        prop_assert_eq!(boundary_extract(&g, &px).unwrap(), b0);
    }

    #[test]
    fn box_projection_idempotent_nonexpansive(seed in any::<u64>(), gi in 0usize..4) {
        let g = grid(gi);
        let mut r = rng(seed);
        let c = random_constraint(&g, &mut r);
        let x = random_centered(&g, &mut r);
        let y = random_centered(&g, &mut r);
        let px = c.project(&g, &x).unwrap();
        let ppx = c.project(&g, &px).unwrap();
        prop_assert!(max_diff(&flat_centered(&px), &flat_centered(&ppx)) <= 1e-9);
        let py = c.project(&g, &y).unwrap();
        prop_assert!(
            dist(&flat_centered(&px), &flat_centered(&py))
                <= dist(&flat_centered(&x), &flat_centered(&y)) + 1e-9
        );
        for j0 in 0..g.time_cells() {
            let h = c.value(&g, &px, j0).unwrap();
            prop_assert!(h <= c.upper()[j0] + 1e-9 && h >= c.lower()[j0] - 1e-9);
        }
    }

    #[test]
    fn box_projection_only_moves_violated_slices(seed in any::<u64>(), gi in 0usize..4) {
        let g = grid(gi);
        let mut r = rng(seed);
        let c = random_constraint(&g, &mut r);
        let x = random_centered(&g, &mut r);
        let px = c.project(&g, &x).unwrap();
        for j0 in 0..g.time_cells() {
            let h = c.value(&g, &x, j0).unwrap();
            if c.violation_at(j0, h) == 0.0 {
                for (a, b) in x.components().zip(px.components()) {
                    prop_assert_eq!(a.slab(j0), b.slab(j0));
                }
            }
        }
    }
}

#[test]
fn periodic_shift_commutes_with_operators() {
    let g = GridSpec::new(3, &[5, 4], &[1.0, 2.0], &[Boundary::Periodic, Boundary::Periodic]).unwrap();
    let mut r = rng(11);
    for axis in 1..=2 {
        let u = random_staggered(&g, &mut r);
        let mut su = u.clone();
        for c in su.components_mut() {
            *c = shift(c, axis);
        }
        let d = divergence(&g, &u).unwrap();
        let ds = divergence(&g, &su).unwrap();
        assert!(max_diff(shift(&d, axis).as_slice(), ds.as_slice()) < 1e-12);
        let v = interpolate(&g, &u).unwrap();
        let vs = interpolate(&g, &su).unwrap();
        for (a, b) in v.components().zip(vs.components()) {
            assert!(max_diff(shift(a, axis).as_slice(), b.as_slice()) < 1e-12);
        }
    }
}

#[test]
fn constants_are_preserved() {
    let g = GridSpec::new(3, &[5, 4], &[1.0, 2.0], &[Boundary::Periodic, Boundary::Neumann]).unwrap();
    let mut u = StaggeredField::zeros(&g);
    u.rho_bar.fill(2.5);
    u.omega_bar[0].fill(-1.5);
    u.zeta_bar.fill(0.75);
    assert!(divergence(&g, &u).unwrap().max_abs() < 1e-12);
    let v = interpolate(&g, &u).unwrap();
    assert!(v.rho.as_slice().iter().all(|&x| x == 2.5));
    assert!(v.omega[0].as_slice().iter().all(|&x| x == -1.5));
    assert!(v.zeta.as_slice().iter().all(|&x| x == 0.75));
}

#[test]
fn projections_leave_feasible_points_unchanged() {
    let mut r = rng(12);
    for g in small_grids() {
        let rho0 = random_positive(&g.spatial_shape(), &mut r);
        let rho1 = random_positive(&g.spatial_shape(), &mut r);
        let (u, v) = cuot_core::init_path(&g, &rho0, &rho1, cuot_core::InitMode::Linear).unwrap();
        let b0 = BoundaryValues::from_endpoints(&g, &rho0, &rho1).unwrap();
        let pu = ContinuityProjector::new(&g, b0, LinearSolver::Spectral)
            .unwrap()
            .project(&u)
            .unwrap();
        assert!(max_diff(&flat_staggered(&pu), &flat_staggered(&u)) < 1e-12);
        let (cu, cv) = ConsistencyProjector::new(&g).project(&u, &v).unwrap();
        assert!(max_diff(&pair_flat(&cu, &cv), &pair_flat(&u, &v)) < 1e-12);
    }
}
