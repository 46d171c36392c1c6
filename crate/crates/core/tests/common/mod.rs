#![allow(dead_code)]

pub mod cone;
pub mod dense;

use cuot_core::{AffineBoxConstraint, Array, Boundary, CenteredField, GridSpec, StaggeredField};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small grids covering Neumann, periodic and mixed 2-D boundaries.
pub fn small_grids() -> Vec<GridSpec> {
    vec![
        GridSpec::new(3, &[4], &[1.0], &[Boundary::Neumann]).unwrap(),
        GridSpec::new(4, &[5], &[2.0], &[Boundary::Periodic]).unwrap(),
        GridSpec::new(3, &[3, 4], &[1.0, 0.5], &[Boundary::Neumann, Boundary::Periodic]).unwrap(),
        GridSpec::new(2, &[3, 3], &[1.5, 1.0], &[Boundary::Neumann, Boundary::Neumann]).unwrap(),
    ]
}

pub fn fill(a: &mut Array, rng: &mut impl Rng, scale: f64) {
    for x in a.as_mut_slice() {
        *x = scale * rng.random_range(-1.0..1.0);
    }
}

pub fn random_staggered(g: &GridSpec, rng: &mut impl Rng) -> StaggeredField {
    let mut u = StaggeredField::zeros(g);
    for c in u.components_mut() {
        fill(c, rng, 2.0);
    }
    u
}

pub fn random_centered(g: &GridSpec, rng: &mut impl Rng) -> CenteredField {
    let mut v = CenteredField::zeros(g);
    for c in v.components_mut() {
        fill(c, rng, 2.0);
    }
    v
}

pub fn random_positive(shape: &[usize], rng: &mut impl Rng) -> Array {
    Array::from_fn(shape, |_| rng.random_range(0.1..2.0))
}

/// Random weights on every component with a mix of one-sided, two-sided,
/// equality and inactive rows.
pub fn random_constraint(g: &GridSpec, rng: &mut impl Rng) -> AffineBoxConstraint {
    let shape = g.centered_shape();
    let mut w = || {
        let mut a = Array::zeros(&shape);
        fill(&mut a, rng, 1.0);
        a
    };
    let h_rho = w();
    let h_omega = (0..g.dim()).map(|_| w()).collect();
    let h_zeta = w();
    let n0 = g.time_cells();
    let mut lower = Vec::with_capacity(n0);
    let mut upper = Vec::with_capacity(n0);
    for _ in 0..n0 {
        let a = rng.random_range(-0.5..0.5);
        let (l, u) = match rng.random_range(0..4) {
            0 => (a, f64::INFINITY),
            1 => (f64::NEG_INFINITY, a),
            2 => (a, a),
            _ => (a - 0.2, a + 0.2),
        };
        lower.push(l);
        upper.push(u);
    }
    AffineBoxConstraint::new(g, h_rho, h_omega, h_zeta, lower, upper).unwrap()
}

pub fn flat_staggered(u: &StaggeredField) -> Vec<f64> {
    u.components().flat_map(|c| c.as_slice().iter().copied()).collect()
}

pub fn flat_centered(v: &CenteredField) -> Vec<f64> {
    v.components().flat_map(|c| c.as_slice().iter().copied()).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}
