//! Small dense kernels: reductions, banded solves and 1-D spectral bases.
//!
//! All reductions sum in index order so results do not depend on how callers
//! split work across threads.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::AxisLines;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y ← y + a·x`.
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Prefactored constant-coefficient tridiagonal system (Thomas algorithm).
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    sub: Vec<f64>,
    /// Modified super-diagonal `c'_i`.
    sup: Vec<f64>,
    /// `1 / (b_i − a_i c'_{i−1})`.
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// Factors the matrix with diagonal `diag`, sub-diagonal `sub` (`sub[i]` couples
    /// row `i + 1` to column `i`) and super-diagonal `sup`. No pivoting: the matrix
    /// must be diagonally dominant.
    pub fn new(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 1 && sub.len() + 1 == n && sup.len() + 1 == n);
        let mut c = vec![0.0; n.saturating_sub(1)];
        let mut inv = vec![0.0; n];
        inv[0] = 1.0 / diag[0];
        if n > 1 {
            c[0] = sup[0] * inv[0];
        }
        for i in 1..n {
            let p = diag[i] - sub[i - 1] * c[i - 1];
            inv[i] = 1.0 / p;
            if i + 1 < n {
                c[i] = sup[i] * inv[i];
            }
        }
        Self {
            sub: sub.to_vec(),
            sup: c,
            inv_pivot: inv,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solves in place along one strided line of `data`.
    pub fn solve_line(&self, data: &mut [f64], lines: &AxisLines, o: usize, i: usize) {
        let n = self.len();
        let mut prev = data[lines.index(o, 0, i)] * self.inv_pivot[0];
        data[lines.index(o, 0, i)] = prev;
        for j in 1..n {
            let idx = lines.index(o, j, i);
            prev = (data[idx] - self.sub[j - 1] * prev) * self.inv_pivot[j];
            data[idx] = prev;
        }
        for j in (0..n - 1).rev() {
            let idx = lines.index(o, j, i);
            let next = data[lines.index(o, j + 1, i)];
            data[idx] -= self.sup[j] * next;
        }
    }

    /// Solves every line of `data` along one axis, sweeping all lines of an outer
    /// block together for contiguous access.
    pub fn solve_lines(&self, data: &mut [f64], lines: &AxisLines) {
        let n = self.len();
        debug_assert_eq!(lines.len, n);
        let inner = lines.inner;
        for o in 0..lines.outer {
            let block = &mut data[o * n * inner..(o + 1) * n * inner];
            let p0 = self.inv_pivot[0];
            block[..inner].iter_mut().for_each(|x| *x *= p0);
            for j in 1..n {
                let (head, tail) = block.split_at_mut(j * inner);
                let prev = &head[(j - 1) * inner..];
                let a = self.sub[j - 1];
                let p = self.inv_pivot[j];
                for (x, y) in tail[..inner].iter_mut().zip(prev) {
                    *x = (*x - a * y) * p;
                }
            }
            for j in (0..n - 1).rev() {
                let (head, tail) = block.split_at_mut((j + 1) * inner);
                let c = self.sup[j];
                for (x, y) in head[j * inner..].iter_mut().zip(&tail[..inner]) {
                    *x -= c * y;
                }
            }
        }
    }

    pub fn solve(&self, rhs: &mut [f64]) {
        let lines = AxisLines {
            outer: 1,
            len: rhs.len(),
            inner: 1,
        };
        self.solve_line(rhs, &lines, 0, 0);
    }
}

/// Symmetric circulant tridiagonal system `diag·x_j + off·(x_{j−1} + x_{j+1}) = b_j`
/// with cyclic indices, solved through Sherman–Morrison.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    n: usize,
    diag: f64,
    off: f64,
    inner: Option<Tridiagonal>,
    /// Solution of the modified system for the rank-one correction vector.
    z: Vec<f64>,
    gamma: f64,
}

impl CyclicTridiagonal {
    pub fn new(n: usize, diag: f64, off: f64) -> Self {
        assert!(n >= 2);
        if n == 2 {
            // both neighbours coincide: [[d, 2o], [2o, d]]
            return Self {
                n,
                diag,
                off,
                inner: None,
                z: Vec::new(),
                gamma: 0.0,
            };
        }
        let gamma = -diag;
        let mut d = vec![diag; n];
        d[0] = diag - gamma;
        d[n - 1] = diag - off * off / gamma;
        let inner = Tridiagonal::new(&vec![off; n - 1], &d, &vec![off; n - 1]);
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = off;
        inner.solve(&mut z);
        Self {
            n,
            diag,
            off,
            inner: Some(inner),
            z,
            gamma,
        }
    }

    /// Solves every line of `data` along one axis.
    pub fn solve_lines(&self, data: &mut [f64], lines: &AxisLines) {
        let n = self.n;
        debug_assert_eq!(lines.len, n);
        let inner = lines.inner;
        if n == 2 {
            let a = self.diag;
            let b = 2.0 * self.off;
            let det = a * a - b * b;
            for o in 0..lines.outer {
                let block = &mut data[o * 2 * inner..(o + 1) * 2 * inner];
                let (r0, r1) = block.split_at_mut(inner);
                for (x0, x1) in r0.iter_mut().zip(r1.iter_mut()) {
                    let (b0, b1) = (*x0, *x1);
                    *x0 = (a * b0 - b * b1) / det;
                    *x1 = (a * b1 - b * b0) / det;
                }
            }
            return;
        }
        let tri = self.inner.as_ref().expect("factored for n > 2");
        tri.solve_lines(data, lines);
        let ratio = self.off / self.gamma;
        let vz = self.z[0] + ratio * self.z[n - 1];
        for o in 0..lines.outer {
            let block = &mut data[o * n * inner..(o + 1) * n * inner];
            for i in 0..inner {
                let vy = block[i] + ratio * block[(n - 1) * inner + i];
                let factor = vy / (1.0 + vz);
                for j in 0..n {
                    block[j * inner + i] -= factor * self.z[j];
                }
            }
        }
    }

    pub fn solve_line(&self, data: &mut [f64], lines: &AxisLines, o: usize, i: usize, scratch: &mut Vec<f64>) {
        let n = self.n;
        if n == 2 {
            let a = self.diag;
            let b = 2.0 * self.off;
            let det = a * a - b * b;
            let i0 = lines.index(o, 0, i);
            let i1 = lines.index(o, 1, i);
            let (r0, r1) = (data[i0], data[i1]);
            data[i0] = (a * r0 - b * r1) / det;
            data[i1] = (a * r1 - b * r0) / det;
            return;
        }
        let inner = self.inner.as_ref().expect("factored for n > 2");
        scratch.clear();
        scratch.extend((0..n).map(|j| data[lines.index(o, j, i)]));
        inner.solve(scratch);
        // v = (1, 0, …, 0, off/gamma)
        let vy = scratch[0] + self.off / self.gamma * scratch[n - 1];
        let vz = self.z[0] + self.off / self.gamma * self.z[n - 1];
        let factor = vy / (1.0 + vz);
        for j in 0..n {
            data[lines.index(o, j, i)] = scratch[j] - factor * self.z[j];
        }
    }
}

/// Orthonormal eigenbasis of a 1-D second-difference matrix.
///
/// Neumann: the `N × N` matrix with diagonal `(1, 2, …, 2, 1)` and off-diagonal
/// `−1` (DCT-II basis). Periodic: the circulant with diagonal 2 and cyclic
/// off-diagonal `−1` (real Fourier basis).
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    n: usize,
    /// Row `k` holds eigenvector `k`; row-major `n × n`.
    vectors: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl SpectralBasis {
    pub fn neumann(n: usize) -> Self {
        use core::f64::consts::PI;
        let mut vectors = vec![0.0; n * n];
        let mut eigenvalues = vec![0.0; n];
        for k in 0..n {
            let scale = if k == 0 {
                libm::sqrt(1.0 / n as f64)
            } else {
                libm::sqrt(2.0 / n as f64)
            };
            for j in 0..n {
                vectors[k * n + j] = scale * libm::cos(PI * k as f64 * (j as f64 + 0.5) / n as f64);
            }
            let s = libm::sin(PI * k as f64 / (2.0 * n as f64));
            eigenvalues[k] = 4.0 * s * s;
        }
        Self {
            n,
            vectors,
            eigenvalues,
        }
    }

    pub fn periodic(n: usize) -> Self {
        use core::f64::consts::PI;
        let mut vectors = vec![0.0; n * n];
        let mut eigenvalues = vec![0.0; n];
        let norm0 = libm::sqrt(1.0 / n as f64);
        let norm = libm::sqrt(2.0 / n as f64);
        let mut row = 0;
        let mut push = |vectors: &mut Vec<f64>, eigenvalues: &mut Vec<f64>, f: &dyn Fn(usize) -> f64, mu: f64| {
            for j in 0..n {
                vectors[row * n + j] = f(j);
            }
            eigenvalues[row] = mu;
            row += 1;
        };
        push(&mut vectors, &mut eigenvalues, &|_| norm0, 0.0);
        for k in 1..n.div_ceil(2) {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let s = libm::sin(theta / 2.0);
            let mu = 4.0 * s * s;
            push(&mut vectors, &mut eigenvalues, &|j| norm * libm::cos(theta * j as f64), mu);
            push(&mut vectors, &mut eigenvalues, &|j| norm * libm::sin(theta * j as f64), mu);
        }
        if n % 2 == 0 {
            push(
                &mut vectors,
                &mut eigenvalues,
                &|j| if j % 2 == 0 { norm0 } else { -norm0 },
                4.0,
            );
        }
        Self {
            n,
            vectors,
            eigenvalues,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Coefficients along `axis` of `input` (shape `shape`) written to `out`:
    /// `out[.., k, ..] = Σ_j Q[k][j] · input[.., j, ..]`.
    pub fn forward(&self, shape: &[usize], axis: usize, input: &[f64], out: &mut [f64]) {
        self.apply(shape, axis, input, out, false)
    }

    /// Inverse of [`forward`](Self::forward) (`Qᵀ`).
    pub fn inverse(&self, shape: &[usize], axis: usize, input: &[f64], out: &mut [f64]) {
        self.apply(shape, axis, input, out, true)
    }

    fn apply(&self, shape: &[usize], axis: usize, input: &[f64], out: &mut [f64], transpose: bool) {
        let lines = AxisLines::new(shape, axis);
        let n = self.n;
        debug_assert_eq!(lines.len, n);
        let coeff = |k: usize, j: usize| {
            if transpose {
                self.vectors[j * n + k]
            } else {
                self.vectors[k * n + j]
            }
        };
        if lines.inner == 1 {
            for o in 0..lines.outer {
                let src = &input[o * n..(o + 1) * n];
                let dst = &mut out[o * n..(o + 1) * n];
                for (k, d) in dst.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, s) in src.iter().enumerate() {
                        acc += coeff(k, j) * s;
                    }
                    *d = acc;
                }
            }
        } else {
            let inner = lines.inner;
            for o in 0..lines.outer {
                let base = o * n * inner;
                let src = &input[base..base + n * inner];
                let dst = &mut out[base..base + n * inner];
                for k in 0..n {
                    let row = &mut dst[k * inner..(k + 1) * inner];
                    row.iter_mut().for_each(|x| *x = 0.0);
                    for j in 0..n {
                        let c = coeff(k, j);
                        let col = &src[j * inner..(j + 1) * inner];
                        for (r, s) in row.iter_mut().zip(col) {
                            *r += c * s;
                        }
                    }
                }
            }
        }
    }
}
