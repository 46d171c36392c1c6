use alloc::vec::Vec;

/// Least-squares line through `(k, log10 e_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Per-iteration contraction factor `10^slope`.
    pub q: f64,
    /// Coefficient of determination of the line.
    pub r_squared: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Number of points used.
    pub points: usize,
}

/// Fits `log10 e_k ≈ slope·k + intercept` over the entries with `e_k > 0`.
///
/// Returns `None` with fewer than two usable points or a degenerate abscissa.
pub fn fit_convergence_rate(iterations: &[usize], errors: &[f64]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> = iterations
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0 && e.is_finite())
        .map(|(&k, &e)| (k as f64, libm::log10(e)))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(RateFit {
        q: libm::pow(10.0, slope),
        r_squared,
        slope,
        intercept,
        points: n,
    })
}

/// Traces recorded every `snapshot_stride` iterations (and at the last one).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Iteration index of each record; `0` is the starting point.
    pub iterations: Vec<usize>,
    /// `J` at the centered output of the energy block (the consensus iterate
    /// itself may hold slightly negative densities, where `J` is infinite).
    pub energy: Vec<f64>,
    /// `‖(div − s_z)(U)‖∞` of the consensus iterate.
    pub ce_residual: Vec<f64>,
    /// `‖V − I(U)‖∞` of the consensus iterate.
    pub consistency_residual: Vec<f64>,
    /// `violation[i][s]`: largest violation of constraint `i` over time at record `s`.
    pub violation: Vec<Vec<f64>>,
    /// `‖x_s − x_final‖₂ / ‖x_final‖₂` over the full `(U, V)` vector.
    pub relative_error: Vec<f64>,
    pub rate: Option<RateFit>,
}

impl Diagnostics {
    /// Largest violation over all constraints at each record.
    pub fn max_violation(&self) -> Vec<f64> {
        (0..self.iterations.len())
            .map(|s| self.violation.iter().fold(0.0_f64, |m, v| m.max(v[s])))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence() {
        let ks: Vec<usize> = (0..50).map(|i| 10 * i).collect();
        let es: Vec<f64> = ks.iter().map(|&k| libm::pow(0.999, k as f64)).collect();
        let fit = fit_convergence_rate(&ks, &es).unwrap();
        assert!((fit.q - 0.999).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeros_are_skipped() {
        let fit = fit_convergence_rate(&[0, 1, 2, 3], &[1.0, 0.1, 0.01, 0.0]).unwrap();
        assert_eq!(fit.points, 3);
        assert!((fit.q - 0.1).abs() < 1e-12);
        assert!(fit_convergence_rate(&[0, 1], &[1.0, 0.0]).is_none());
    }
}
