//! Interior-point solve of the discrete problem in epigraph form:
//! minimize `vol·Σ t_j` subject to `2ρ_j t_j ≥ ‖ω_j‖² + δ²ζ_j²` (rotated
//! second-order cones), `V = I U`, the continuity equation, boundary data and
//! affine constraints. Log-barrier path following with damped Newton steps.

#![allow(dead_code)]

use super::dense::DenseModel;
use nalgebra::{DMatrix, DVector};

pub struct ConeProblem<'a> {
    pub model: &'a DenseModel,
    pub delta: f64,
    /// A staggered point satisfying the continuity equation, the boundary data
    /// and the equalities, with `I U` strictly inside every inequality.
    pub feasible: DVector<f64>,
    /// `(a, value)`: `a·V = value` with `a` over the flattened centered field.
    pub equalities: Vec<(DVector<f64>, f64)>,
    /// `(a, lower, upper)`: `lower ≤ a·V ≤ upper`; infinite bounds are dropped.
    pub inequalities: Vec<(DVector<f64>, f64, f64)>,
}

pub struct ConeSolution {
    pub energy: f64,
    pub u: DVector<f64>,
    pub newton_steps: usize,
}

fn null_space(c: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if c.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let ctc = c.transpose() * c;
    let eig = ctc.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let cols: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() < 1e-10 * top).collect();
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &eig.eigenvectors.column(i));
    }
    out
}

struct Barrier {
    /// Rows mapping `z` to the centered field, one per cell and component.
    map: DMatrix<f64>,
    offset: DVector<f64>,
    cells: usize,
    comps: usize,
    delta2: f64,
    vol: f64,
    ineq: Vec<(DVector<f64>, f64)>,
}

impl Barrier {
    fn centered(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.map * z + &self.offset
    }

    fn slacks(&self, x: &DVector<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
        let m = self.map.ncols();
        let v = self.centered(&x.rows(0, m).into_owned());
        let mut cone = Vec::with_capacity(self.cells);
        for j in 0..self.cells {
            let rho = v[j];
            let t = x[m + j];
            let mut q = 0.0;
            for k in 1..self.comps - 1 {
                q += v[k * self.cells + j].powi(2);
            }
            q += self.delta2 * v[(self.comps - 1) * self.cells + j].powi(2);
            let s = 2.0 * rho * t - q;
            if !(rho > 0.0 && t > 0.0 && s > 0.0) {
                return None;
            }
            cone.push(s);
        }
        let mut lin = Vec::with_capacity(self.ineq.len());
        for (a, b) in &self.ineq {
            let s = a.dot(&v) - b;
            if !(s > 0.0) {
                return None;
            }
            lin.push(s);
        }
        Some((cone, lin))
    }

    fn value(&self, x: &DVector<f64>, mu: f64) -> Option<f64> {
        let m = self.map.ncols();
        let (cone, lin) = self.slacks(x)?;
        let obj = self.vol * x.rows(m, self.cells).sum();
        let bar: f64 = cone.iter().chain(&lin).map(|s| -s.ln()).sum();
        Some(obj + mu * bar)
    }

    fn grad_hess(&self, x: &DVector<f64>, mu: f64) -> (DVector<f64>, DMatrix<f64>) {
        let m = self.map.ncols();
        let n = m + self.cells;
        let v = self.centered(&x.rows(0, m).into_owned());
        let (cone, lin) = self.slacks(x).expect("interior point");
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for j in 0..self.cells {
            g[m + j] += self.vol;
        }
        for j in 0..self.cells {
            let s = cone[j];
            let t = x[m + j];
            let rho_row = self.map.row(j);
            let mut ds = DVector::zeros(n);
            for c in 0..m {
                ds[c] = 2.0 * t * rho_row[c];
            }
            ds[m + j] = 2.0 * v[j];
            let mut d2 = DMatrix::zeros(n, n);
            for k in 1..self.comps {
                let w = if k == self.comps - 1 { self.delta2 } else { 1.0 };
                let row = self.map.row(k * self.cells + j);
                let val = v[k * self.cells + j];
                for c in 0..m {
                    ds[c] -= 2.0 * w * val * row[c];
                }
                let rt = row.transpose();
                let mut block = d2.view_mut((0, 0), (m, m));
                block -= 2.0 * w * &rt * row;
            }
            for c in 0..m {
                d2[(c, m + j)] += 2.0 * rho_row[c];
                d2[(m + j, c)] += 2.0 * rho_row[c];
            }
            g -= mu * &ds / s;
            h += mu * (&ds * ds.transpose() / (s * s) - d2 / s);
        }
        for ((a, _), s) in self.ineq.iter().zip(&lin) {
            let az = self.map.transpose() * a;
            let mut full = DVector::zeros(n);
            full.rows_mut(0, m).copy_from(&az);
            g -= mu * &full / *s;
            h += mu * &full * full.transpose() / (s * s);
        }
        (g, h)
    }
}

fn cost(delta2: f64, v: &DVector<f64>, cells: usize, comps: usize) -> f64 {
    let mut sum = 0.0;
    for j in 0..cells {
        let rho = v[j];
        let mut q = 0.0;
        for k in 1..comps - 1 {
            q += v[k * cells + j].powi(2);
        }
        q += delta2 * v[(comps - 1) * cells + j].powi(2);
        sum += if rho > 0.0 {
            q / (2.0 * rho)
        } else if q == 0.0 && rho == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    sum
}

pub fn solve(p: &ConeProblem<'_>) -> ConeSolution {
    let model = p.model;
    let g = &model.grid;
    let ns = model.stag_len();
    let cells = model.cent_len;
    let comps = g.dim() + 2;
    let vol = g.cell_volume();

    let boundary: std::collections::HashSet<usize> = model.boundary.iter().copied().collect();
    let free: Vec<usize> = (0..ns).filter(|i| !boundary.contains(i)).collect();
    let mut select = DMatrix::zeros(ns, free.len());
    for (c, &i) in free.iter().enumerate() {
        select[(i, c)] = 1.0;
    }
    let interp_free = &model.interp * &select;
    let mut rows: Vec<DVector<f64>> = (0..cells)
        .map(|r| (model.ce.row(r) * &select).transpose())
        .collect();
    for (a, _) in &p.equalities {
        rows.push(interp_free.transpose() * a);
    }
    let mut c = DMatrix::zeros(rows.len(), free.len());
    for (r, row) in rows.iter().enumerate() {
        c.set_row(r, &row.transpose());
    }
    let basis = null_space(&c, free.len());
    let map = &interp_free * &basis;
    let offset = &model.interp * &p.feasible;
    let m = map.ncols();

    let ineq: Vec<(DVector<f64>, f64)> = p
        .inequalities
        .iter()
        .flat_map(|(a, lo, hi)| {
            let mut out = Vec::new();
            if lo.is_finite() {
                out.push((a.clone(), *lo));
            }
            if hi.is_finite() {
                out.push((-a.clone(), -hi));
            }
            out
        })
        .collect();
    let nu = (2 * cells + ineq.len()) as f64;
    let barrier = Barrier {
        map,
        offset,
        cells,
        comps,
        delta2: p.delta * p.delta,
        vol,
        ineq,
    };

    let v0 = barrier.centered(&DVector::zeros(m));
    let mut x = DVector::zeros(m + cells);
    for j in 0..cells {
        let rho = v0[j];
        let mut q = 0.0;
        for k in 1..comps - 1 {
            q += v0[k * cells + j].powi(2);
        }
        q += barrier.delta2 * v0[(comps - 1) * cells + j].powi(2);
        x[m + j] = q / (2.0 * rho) + 1.0;
    }

    let mut mu = 1.0;
    let mut steps = 0;
    while mu * nu > 1e-11 {
        for _ in 0..200 {
            let (grad, hess) = barrier.grad_hess(&x, mu);
            let dir = match hess.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => hess.lu().solve(&(-&grad)).expect("nonsingular Newton system"),
            };
            let dec = -grad.dot(&dir);
            steps += 1;
            if dec * 0.5 < 1e-14 {
                break;
            }
            let f0 = barrier.value(&x, mu).unwrap();
            let mut step = 1.0;
            loop {
                let cand = &x + step * &dir;
                if let Some(f) = barrier.value(&cand, mu) {
                    if f <= f0 - 0.25 * step * dec {
                        x = cand;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-20 {
                    break;
                }
            }
            if step < 1e-20 {
                break;
            }
        }
        mu *= 0.2;
    }
    let z = x.rows(0, m).into_owned();
    let v = barrier.centered(&z);
    let u = &p.feasible + &select * (&basis * &z);
    ConeSolution {
        energy: cost(barrier.delta2, &v, cells, comps) * vol,
        u,
        newton_steps: steps,
    }
}
