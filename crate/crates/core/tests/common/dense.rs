//! Dense matrix model of the discrete operators, built from index formulas
//! independently of the library's stencil code.

#![allow(dead_code)]

use cuot_core::{Boundary, CenteredField, GridSpec, StaggeredField};
use nalgebra::{DMatrix, DVector};

fn row_major(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &n)| acc * n + i)
}

fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..total {
        f(&idx);
        for a in (0..shape.len()).rev() {
            idx[a] += 1;
            if idx[a] < shape[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

pub struct DenseModel {
    pub grid: GridSpec,
    /// Offsets of ρ̄, ω̄_1..ω̄_n, ζ̄ in the flat staggered vector, plus the total.
    pub stag_offsets: Vec<usize>,
    pub cent_len: usize,
    /// `V = I U`.
    pub interp: DMatrix<f64>,
    /// `(div − s_z) U`.
    pub ce: DMatrix<f64>,
    /// Flat staggered indices of the boundary slots, in `BoundaryValues` order.
    pub boundary: Vec<usize>,
}

impl DenseModel {
    pub fn new(g: &GridSpec) -> Self {
        let n0 = g.time_cells();
        let d = g.dim();
        let cells = g.spatial_cells().to_vec();
        let mut centered = vec![n0];
        centered.extend(&cells);
        let cl: usize = centered.iter().product();

        let mut stag_shapes = Vec::new();
        let mut s = centered.clone();
        s[0] += 1;
        stag_shapes.push(s);
        for k in 0..d {
            let mut s = centered.clone();
            if g.boundary(k) == Boundary::Neumann {
                s[k + 1] += 1;
            }
            stag_shapes.push(s);
        }
        stag_shapes.push(centered.clone());
        let mut offsets = vec![0];
        for s in &stag_shapes {
            offsets.push(offsets.last().unwrap() + s.iter().product::<usize>());
        }
        let sl = *offsets.last().unwrap();

        let mut interp = DMatrix::zeros((d + 2) * cl, sl);
        let mut ce = DMatrix::zeros(cl, sl);
        let h0 = 1.0 / n0 as f64;
        for_each_index(&centered, |c| {
            let row = row_major(&centered, c);
            let mut lo = c.to_vec();
            let mut hi = c.to_vec();
            hi[0] += 1;
            let a = offsets[0] + row_major(&stag_shapes[0], &lo);
            let b = offsets[0] + row_major(&stag_shapes[0], &hi);
            interp[(row, a)] += 0.5;
            interp[(row, b)] += 0.5;
            ce[(row, a)] -= 1.0 / h0;
            ce[(row, b)] += 1.0 / h0;
            for k in 0..d {
                let shape = &stag_shapes[k + 1];
                lo = c.to_vec();
                hi = c.to_vec();
                hi[k + 1] = (c[k + 1] + 1) % shape[k + 1];
                let a = offsets[k + 1] + row_major(shape, &lo);
                let b = offsets[k + 1] + row_major(shape, &hi);
                interp[((k + 1) * cl + row, a)] += 0.5;
                interp[((k + 1) * cl + row, b)] += 0.5;
                let hk = g.length(k) / cells[k] as f64;
                ce[(row, a)] -= 1.0 / hk;
                ce[(row, b)] += 1.0 / hk;
            }
            let z = offsets[d + 1] + row;
            interp[((d + 1) * cl + row, z)] = 1.0;
            ce[(row, z)] = -1.0;
        });

        let mut boundary = Vec::new();
        for f in [0, n0] {
            for_each_index(&cells, |x| {
                let mut idx = vec![f];
                idx.extend_from_slice(x);
                boundary.push(offsets[0] + row_major(&stag_shapes[0], &idx));
            });
        }
        for k in 0..d {
            if g.boundary(k) != Boundary::Neumann {
                continue;
            }
            let shape = &stag_shapes[k + 1];
            let mut face_shape = shape.clone();
            face_shape.remove(k + 1);
            for side in [0, cells[k]] {
                for_each_index(&face_shape, |x| {
                    let mut idx = x.to_vec();
                    idx.insert(k + 1, side);
                    boundary.push(offsets[k + 1] + row_major(shape, &idx));
                });
            }
        }
        Self {
            grid: g.clone(),
            stag_offsets: offsets,
            cent_len: cl,
            interp,
            ce,
            boundary,
        }
    }

    pub fn stag_len(&self) -> usize {
        *self.stag_offsets.last().unwrap()
    }

    pub fn flatten_u(u: &StaggeredField) -> DVector<f64> {
        DVector::from_iterator(u.len(), u.components().flat_map(|c| c.as_slice().iter().copied()))
    }

    pub fn flatten_v(v: &CenteredField) -> DVector<f64> {
        DVector::from_iterator(v.len(), v.components().flat_map(|c| c.as_slice().iter().copied()))
    }

    pub fn unflatten_u(&self, x: &DVector<f64>) -> StaggeredField {
        let mut u = StaggeredField::zeros(&self.grid);
        let mut i = 0;
        for c in u.components_mut() {
            for v in c.as_mut_slice() {
                *v = x[i];
                i += 1;
            }
        }
        u
    }

    pub fn unflatten_v(&self, x: &DVector<f64>) -> CenteredField {
        let mut v = CenteredField::zeros(&self.grid);
        let mut i = 0;
        for c in v.components_mut() {
            for s in c.as_mut_slice() {
                *s = x[i];
                i += 1;
            }
        }
        v
    }
}

/// Euclidean projection of `z0` onto `{z : C z = r}` for full-row-rank `C`,
/// through the dense normal equations.
pub fn project_affine(c: &DMatrix<f64>, r: &DVector<f64>, z0: &DVector<f64>) -> DVector<f64> {
    let cct = c * c.transpose();
    let rhs = c * z0 - r;
    let lambda = cct.cholesky().expect("full row rank").solve(&rhs);
    z0 - c.transpose() * lambda
}
