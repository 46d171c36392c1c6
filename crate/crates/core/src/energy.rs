//! The Wasserstein–Fisher–Rao infinitesimal cost, the discrete energy and the
//! pointwise proximal operator of `γ·f_δ`.

use alloc::format;
use alloc::vec::Vec;

use crate::grid::{CenteredField, GridSpec};
use crate::{Error, Result};

const ROOT_TOL: f64 = 1e-12;
const ROOT_MAX_ITER: usize = 200;

/// Length scale `δ > 0` weighting growth against transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParam(f64);

impl DeltaParam {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive and finite, got {delta}"
            )));
        }
        Ok(Self(delta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `f_δ(ρ, ω, ζ) = (‖ω‖² + δ²ζ²)/(2ρ)` for `ρ > 0`, `0` at the origin, `+∞` otherwise.
pub fn infinitesimal_cost(delta: DeltaParam, rho: f64, omega: &[f64], zeta: f64) -> f64 {
    let w2: f64 = omega.iter().map(|w| w * w).sum();
    cost_from_norms(delta.0, rho, w2, zeta)
}

#[inline]
fn cost_from_norms(delta: f64, rho: f64, w2: f64, zeta: f64) -> f64 {
    let num = w2 + delta * delta * zeta * zeta;
    if rho > 0.0 {
        num / (2.0 * rho)
    } else if rho == 0.0 && num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `J(V) = Σ f_δ · h0 · ∏h_k`, summed time-major.
pub fn total_cost(grid: &GridSpec, delta: DeltaParam, v: &CenteredField) -> Result<f64> {
    v.check(grid)?;
    Ok(total_cost_unchecked(grid, delta, v))
}

pub(crate) fn total_cost_unchecked(grid: &GridSpec, delta: DeltaParam, v: &CenteredField) -> f64 {
    let rho = v.rho.as_slice();
    let zeta = v.zeta.as_slice();
    let mut sum = 0.0;
    for i in 0..rho.len() {
        let w2: f64 = v.omega.iter().map(|w| w.as_slice()[i] * w.as_slice()[i]).sum();
        sum += cost_from_norms(delta.0, rho[i], w2, zeta[i]);
    }
    sum * grid.cell_volume()
}

/// Result of the pointwise prox; `omega` has one entry per spatial axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxPoint {
    pub rho: f64,
    pub omega: Vec<f64>,
    pub zeta: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "prox step must be positive and finite, got {gamma}"
        )));
    }
    Ok(())
}

/// `argmin ½‖(ρ,ω,ζ) − (ρ̃,ω̃,ζ̃)‖² + γ f_δ(ρ,ω,ζ)`.
pub fn prox_pointwise(
    gamma: f64,
    delta: DeltaParam,
    rho: f64,
    omega: &[f64],
    zeta: f64,
) -> Result<ProxPoint> {
    check_gamma(gamma)?;
    let w2: f64 = omega.iter().map(|w| w * w).sum();
    let r = if delta.0 == 1.0 {
        prox_density_cubic(gamma, rho, w2 + zeta * zeta)
    } else {
        prox_density_newton(gamma, delta.0, rho, w2, zeta * zeta)
    };
    Ok(assemble(gamma, delta.0, r, omega, zeta))
}

fn assemble(gamma: f64, delta: f64, r: f64, omega: &[f64], zeta: f64) -> ProxPoint {
    if r <= 0.0 {
        return ProxPoint {
            rho: 0.0,
            omega: alloc::vec![0.0; omega.len()],
            zeta: 0.0,
        };
    }
    let sw = r / (r + gamma);
    let sz = r / (r + gamma * delta * delta);
    ProxPoint {
        rho: r,
        omega: omega.iter().map(|w| w * sw).collect(),
        zeta: zeta * sz,
    }
}

/// Density component of the prox, general δ.
///
/// `w2 = ‖ω̃‖²`, `z2 = ζ̃²`. Returns the unique positive root of
/// `g(ρ) = ρ − ρ̃ − γ w2/(2(ρ+γ)²) − γδ² z2/(2(ρ+γδ²)²)` or `0` when `g(0) ≥ 0`.
/// `g` is increasing and concave on `ρ > 0`, so Newton started right of the root
/// descends monotonically; bisection guards against roundoff.
pub fn prox_density_newton(gamma: f64, delta: f64, rho: f64, w2: f64, z2: f64) -> f64 {
    let gd = gamma * delta * delta;
    let g = |r: f64| {
        let a = r + gamma;
        let b = r + gd;
        r - rho - gamma * w2 / (2.0 * a * a) - gd * z2 / (2.0 * b * b)
    };
    let dg = |r: f64| {
        let a = r + gamma;
        let b = r + gd;
        1.0 + gamma * w2 / (a * a * a) + gd * z2 / (b * b * b)
    };
    if w2 == 0.0 && z2 == 0.0 {
        return rho.max(0.0);
    }
    let g0 = -rho - w2 / (2.0 * gamma) - z2 / (2.0 * gd);
    if g0 >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = rho.max(0.0) + w2 / (2.0 * gamma) + z2 / (2.0 * gd);
    let mut r = hi;
    for _ in 0..ROOT_MAX_ITER {
        let gr = g(r);
        if gr == 0.0 {
            return r;
        }
        if gr > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let mut next = r - gr / dg(r);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= ROOT_TOL * r.max(1.0) {
            return next;
        }
        r = next;
    }
    r
}

/// Density component of the prox for `δ = 1`: the largest real root of
/// `(ρ − ρ̃)(ρ + γ)² = γ s/2` with `s = ‖ω̃‖² + ζ̃²`, clamped at `0`.
pub fn prox_density_cubic(gamma: f64, rho: f64, s: f64) -> f64 {
    if s == 0.0 {
        return rho.max(0.0);
    }
    if -rho - s / (2.0 * gamma) >= 0.0 {
        return 0.0;
    }
    // x = ρ + γ solves x³ − a x² − c = 0.
    let a = gamma + rho;
    let c = 0.5 * gamma * s;
    let p = -a * a / 3.0;
    let q = -2.0 * a * a * a / 27.0 - c;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let y = if disc >= 0.0 {
        let sq = libm::sqrt(disc);
        libm::cbrt(-0.5 * q + sq) + libm::cbrt(-0.5 * q - sq)
    } else {
        let m = libm::sqrt(-p / 3.0);
        let arg = (1.5 * q / p * libm::sqrt(-3.0 / p)).clamp(-1.0, 1.0);
        2.0 * m * libm::cos(libm::acos(arg) / 3.0)
    };
    let mut x = y + a / 3.0;
    for _ in 0..3 {
        let h = x * x * (x - a) - c;
        let dh = x * (3.0 * x - 2.0 * a);
        if dh <= 0.0 {
            break;
        }
        let step = h / dh;
        x -= step;
        if step.abs() <= ROOT_TOL * x.abs().max(1.0) {
            break;
        }
    }
    (x - gamma).max(0.0)
}

/// Pointwise prox over every centered cell of `v`, written to `out`.
pub fn prox_cost_field(
    grid: &GridSpec,
    gamma: f64,
    delta: DeltaParam,
    v: &CenteredField,
    out: &mut CenteredField,
) -> Result<()> {
    check_gamma(gamma)?;
    v.check(grid)?;
    out.check(grid)?;
    ProxChunk::new(v, out).run(gamma, delta);
    Ok(())
}

/// Prox of `γ f_δ` restricted to one chunk of contiguous cells. Used by the
/// solver to split the field across workers.
pub(crate) struct ProxChunk<'a> {
    pub rho: &'a [f64],
    pub omega: Vec<&'a [f64]>,
    pub zeta: &'a [f64],
    pub out_rho: &'a mut [f64],
    pub out_omega: Vec<&'a mut [f64]>,
    pub out_zeta: &'a mut [f64],
}

impl<'a> ProxChunk<'a> {
    pub fn new(v: &'a CenteredField, out: &'a mut CenteredField) -> Self {
        Self {
            rho: v.rho.as_slice(),
            omega: v.omega.iter().map(|w| w.as_slice()).collect(),
            zeta: v.zeta.as_slice(),
            out_rho: out.rho.as_mut_slice(),
            out_omega: out.omega.iter_mut().map(|w| w.as_mut_slice()).collect(),
            out_zeta: out.zeta.as_mut_slice(),
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    /// Splits into at most `parts` contiguous chunks of near-equal length.
    pub fn split(self, parts: usize) -> Vec<ProxChunk<'a>> {
        let n = self.len();
        let parts = parts.clamp(1, n.max(1));
        let size = n.div_ceil(parts);
        let mut out = Vec::with_capacity(parts);
        let mut rest = self;
        while rest.len() > size {
            let (head, tail) = rest.split_at(size);
            out.push(head);
            rest = tail;
        }
        out.push(rest);
        out
    }

    fn split_at(self, mid: usize) -> (Self, Self) {
        let (r0, r1) = self.rho.split_at(mid);
        let (z0, z1) = self.zeta.split_at(mid);
        let (or0, or1) = self.out_rho.split_at_mut(mid);
        let (oz0, oz1) = self.out_zeta.split_at_mut(mid);
        let mut w0 = Vec::with_capacity(self.omega.len());
        let mut w1 = Vec::with_capacity(self.omega.len());
        for w in self.omega {
            let (a, b) = w.split_at(mid);
            w0.push(a);
            w1.push(b);
        }
        let mut ow0 = Vec::with_capacity(self.out_omega.len());
        let mut ow1 = Vec::with_capacity(self.out_omega.len());
        for w in self.out_omega {
            let (a, b) = w.split_at_mut(mid);
            ow0.push(a);
            ow1.push(b);
        }
        (
            Self {
                rho: r0,
                omega: w0,
                zeta: z0,
                out_rho: or0,
                out_omega: ow0,
                out_zeta: oz0,
            },
            Self {
                rho: r1,
                omega: w1,
                zeta: z1,
                out_rho: or1,
                out_omega: ow1,
                out_zeta: oz1,
            },
        )
    }

    pub fn run(self, gamma: f64, delta: DeltaParam) {
        let d = delta.0;
        let gd = gamma * d * d;
        let mut out_omega = self.out_omega;
        for i in 0..self.rho.len() {
            let rt = self.rho[i];
            let zt = self.zeta[i];
            let w2: f64 = self.omega.iter().map(|w| w[i] * w[i]).sum();
            let r = if d == 1.0 {
                prox_density_cubic(gamma, rt, w2 + zt * zt)
            } else {
                prox_density_newton(gamma, d, rt, w2, zt * zt)
            };
            let (sw, sz) = if r > 0.0 {
                (r / (r + gamma), r / (r + gd))
            } else {
                (0.0, 0.0)
            };
            self.out_rho[i] = r;
            for (o, w) in out_omega.iter_mut().zip(&self.omega) {
                o[i] = w[i] * sw;
            }
            self.out_zeta[i] = zt * sz;
        }
    }
}
