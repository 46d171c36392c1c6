use cuot_core::energy::{
    infinitesimal_cost, prox_density_cubic, prox_density_newton, prox_pointwise, total_cost,
};
use cuot_core::{Boundary, CenteredField, DeltaParam, GridSpec};
use proptest::prelude::*;

fn delta(d: f64) -> DeltaParam {
    DeltaParam::new(d).unwrap()
}

fn objective(gamma: f64, d: DeltaParam, t: &[f64; 4], p: &[f64; 4]) -> f64 {
    let sq: f64 = t.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * sq + gamma * infinitesimal_cost(d, p[0], &p[1..3], p[3])
}

fn prox4(gamma: f64, d: DeltaParam, t: &[f64; 4]) -> [f64; 4] {
    let p = prox_pointwise(gamma, d, t[0], &t[1..3], t[3]).unwrap();
    [p.rho, p.omega[0], p.omega[1], p.zeta]
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn first_order_conditions(t in point(), gamma in 0.01..10.0f64, d in 0.05..10.0f64) {
        let dp = delta(d);
        let p = prox4(gamma, dp, &t);
        let w2 = t[1] * t[1] + t[2] * t[2];
        let z2 = t[3] * t[3];
        let gd = gamma * d * d;
        let scale = 1.0 + t[0].abs() + w2 / gamma + z2 / gd;
        if p[0] > 0.0 {
            let g = p[0] - t[0]
                - gamma * w2 / (2.0 * (p[0] + gamma).powi(2))
                - gd * z2 / (2.0 * (p[0] + gd).powi(2));
            prop_assert!(g.abs() <= 1e-10 * scale, "residual {g}");
            for k in 0..2 {
                let r = p[k + 1] - t[k + 1] * p[0] / (p[0] + gamma);
                prop_assert!(r.abs() <= 1e-10 * scale);
            }
            let r = p[3] - t[3] * p[0] / (p[0] + gd);
            prop_assert!(r.abs() <= 1e-10 * scale);
        } else {
            prop_assert_eq!(p, [0.0; 4]);
            prop_assert!(-t[0] - w2 / (2.0 * gamma) - z2 / (2.0 * gd) >= -1e-10 * scale);
        }
    }

    #[test]
    fn cubic_agrees_with_newton(t in point(), gamma in 0.01..10.0f64) {
        let w2 = t[1] * t[1] + t[2] * t[2];
        let z2 = t[3] * t[3];
        let a = prox_density_cubic(gamma, t[0], w2 + z2);
        let b = prox_density_newton(gamma, 1.0, t[0], w2, z2);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn firmly_nonexpansive(x in point(), y in point(), gamma in 0.01..10.0f64, d in 0.05..10.0f64) {
        let dp = delta(d);
        let px = prox4(gamma, dp, &x);
        let py = prox4(gamma, dp, &y);
        let dp2: f64 = (0..4).map(|i| (px[i] - py[i]).powi(2)).sum();
        let inner: f64 = (0..4).map(|i| (px[i] - py[i]) * (x[i] - y[i])).sum();
        prop_assert!(dp2 <= inner + 1e-10, "{dp2} > {inner}");
    }

    #[test]
    fn cost_is_midpoint_convex(
        a in (0.01..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        b in (0.01..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        d in 0.05..10.0f64,
    ) {
        let dp = delta(d);
        let fa = infinitesimal_cost(dp, a.0, &[a.1], a.2);
        let fb = infinitesimal_cost(dp, b.0, &[b.1], b.2);
        let m = infinitesimal_cost(dp, 0.5 * (a.0 + b.0), &[0.5 * (a.1 + b.1)], 0.5 * (a.2 + b.2));
        prop_assert!(m <= 0.5 * (fa + fb) + 1e-12 * (1.0 + fa + fb));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn prox_value_beats_apex_and_perturbations(
        t in point(),
        gamma in 0.01..10.0f64,
        d in 0.05..10.0f64,
        dirs in proptest::collection::vec(point(), 20),
    ) {
        let dp = delta(d);
        let p = prox4(gamma, dp, &t);
        let best = objective(gamma, dp, &t, &p);
        let tol = 1e-12 * (1.0 + best.abs());
        prop_assert!(best <= objective(gamma, dp, &t, &[0.0; 4]) + tol);
        for dir in &dirs {
            for s in [1e-1, 1e-3, 1e-5] {
                let q = [p[0] + s * dir[0], p[1] + s * dir[1], p[2] + s * dir[2], p[3] + s * dir[3]];
                prop_assert!(best <= objective(gamma, dp, &t, &q) + tol);
            }
        }
    }

    #[test]
    fn energy_is_positively_homogeneous(scale in 0.01..100.0f64, seed in 0u64..1000) {
        let g = GridSpec::new(3, &[4, 2], &[1.0, 2.0], &[Boundary::Neumann, Boundary::Periodic]).unwrap();
        let mut v = CenteredField::zeros(&g);
        let mut s = seed as f64 * 0.618;
        for c in v.components_mut() {
            for x in c.as_mut_slice() {
                s = (s * 9.17 + 0.31) % 1.0;
                *x = 2.0 * s - 1.0;
            }
        }
        v.rho.as_mut_slice().iter_mut().for_each(|r| *r = r.abs() + 0.1);
        let d = delta(1.7);
        let j = total_cost(&g, d, &v).unwrap();
        let mut w = v.clone();
        w.scale(scale);
        let js = total_cost(&g, d, &w).unwrap();
        prop_assert!((js - scale * j).abs() <= 1e-12 * scale * j.max(1.0));
    }
}

#[test]
fn cost_examples() {
    let d = delta(1.0);
    assert_eq!(infinitesimal_cost(d, 0.0, &[0.0], 0.0), 0.0);
    assert_eq!(infinitesimal_cost(d, 2.0, &[2.0], 0.0), 1.0);
    assert_eq!(infinitesimal_cost(d, 0.0, &[1.0], 0.0), f64::INFINITY);
    assert_eq!(infinitesimal_cost(d, -1.0, &[0.0], 0.0), f64::INFINITY);
}
