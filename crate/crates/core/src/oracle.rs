//! Brute-force references. Nothing here calls into [`crate::estimators`];
//! the rolling sums are recomputed from their definitions.

use crate::error::{invalid, Result};
use crate::simulate::{LatentPaths, ModelParams};
use crate::timegrid::{eval_f, residue_members, BlockGrid};

/// Fine-grid covariations of the latent spot processes `σ²` and `λ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentTruth {
    pub qcv_ss: f64,
    pub qcv_sl: f64,
    pub qcv_ll: f64,
    pub rho_true: f64,
    pub beta_true: f64,
    pub int_sigma: f64,
    pub int_sigma2: f64,
}

impl LatentTruth {
    pub fn from_paths(paths: &LatentPaths) -> Self {
        let qcv_ss = sum_of_products(&paths.sigma2, &paths.sigma2);
        let qcv_sl = sum_of_products(&paths.sigma2, &paths.lambda_n);
        let qcv_ll = sum_of_products(&paths.lambda_n, &paths.lambda_n);
        let sigma: Vec<f64> = paths.sigma2.iter().map(|v| v.sqrt()).collect();
        Self {
            qcv_ss,
            qcv_sl,
            qcv_ll,
            rho_true: qcv_sl / (qcv_ss * qcv_ll).sqrt(),
            beta_true: qcv_sl / qcv_ll,
            int_sigma: trapezoid(&sigma, paths.dt),
            int_sigma2: trapezoid(&paths.sigma2, paths.dt),
        }
    }
}

fn sum_of_products(a: &[f64], b: &[f64]) -> f64 {
    a.windows(2)
        .zip(b.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[1] - y[0]))
        .sum()
}

fn trapezoid(path: &[f64], dt: f64) -> f64 {
    path.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum::<f64>() * dt
}

/// `Σ_k (A_{k+1} − A_k)(B_{k+1} − B_k)`.
pub fn latent_qcv(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "path lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(sum_of_products(a, b))
}

/// `ρ γ ν √ξ ∫σ ds`, the large-`n` limit of `n⁻¹[σ², λ_n]`.
pub fn closed_form_limit(params: &ModelParams, sigma: &[f64], dt: f64) -> f64 {
    params.rho * params.gamma_vol * params.nu * params.xi.sqrt() * trapezoid(sigma, dt)
}

/// A spot path that is constant between point masses: `θ_s = θ_0 + Σ_{τ_j ≤ s} J_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    pub start: f64,
    pub jumps: Vec<(f64, f64)>,
}

impl StepPath {
    /// `∫_0^t θ_s ds`, exactly.
    pub fn integral(&self, t: f64) -> f64 {
        self.start * t
            + self
                .jumps
                .iter()
                .map(|&(tau, size)| if tau < t { size * (t - tau) } else { 0.0 })
                .sum::<f64>()
    }

    /// `Θ(t_i)` at every boundary of `grid`.
    pub fn integrated_on(&self, grid: &BlockGrid) -> Vec<f64> {
        grid.boundaries()
            .iter()
            .map(|&t| self.integral(t))
            .collect()
    }
}

/// `(1/K) Σ_l Σ_{i≡l[2K]} (∫f dθ)(∫f dλ)` evaluated at the point masses,
/// i.e. the right side of the tent-weight representation of
/// `QV_{B,K}(Θ,Λ)/(KΔ)²`.
pub fn f_representation_qv(
    theta: &StepPath,
    lambda: &StepPath,
    grid: &BlockGrid,
    k: usize,
) -> Result<f64> {
    let horizon = grid.horizon();
    for &(tau, _) in theta.jumps.iter().chain(&lambda.jumps) {
        if !(0.0..=horizon).contains(&tau) {
            return Err(invalid(format!("jump time {tau} outside [0, {horizon}]")));
        }
    }
    let mut total = 0.0;
    for l in 1..=2 * k {
        for i in residue_members(l, k, grid.blocks())? {
            let (lo, hi) = (grid.boundary(i - k), grid.boundary(i + k));
            let weigh = |path: &StepPath| -> f64 {
                path.jumps
                    .iter()
                    .filter(|(tau, _)| *tau >= lo && *tau < hi)
                    .map(|&(tau, size)| size * eval_f(tau, l, k, grid))
                    .sum()
            };
            total += weigh(theta) * weigh(lambda);
        }
    }
    Ok(total / k as f64)
}

/// Nested-loop rolling QV straight from the window-increment definition.
pub fn naive_qv(a: &[f64], b: &[f64], k: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("series lengths differ"));
    }
    let blocks = a.len().saturating_sub(1);
    if k == 0 || 2 * k > blocks {
        return Err(invalid(format!("K={k} out of range for B={blocks}")));
    }
    let mut total = 0.0;
    for i in k..=blocks - k {
        let fwd_a = a[i + k] - a[i];
        let back_a = a[i] - a[i - k];
        let fwd_b = b[i + k] - b[i];
        let back_b = b[i] - b[i - k];
        total += (fwd_a - back_a) * (fwd_b - back_b);
    }
    Ok(total / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latent_qcv_by_hand() {
        assert_eq!(latent_qcv(&[1.0; 4], &[0.0, 5.0, 2.0, 9.0]).unwrap(), 0.0);
        let p = [0.0, 1.0, 0.0, 1.0];
        assert_eq!(latent_qcv(&p, &p).unwrap(), 3.0);
        let q = [0.5, -1.0, 2.0, 2.5];
        assert_eq!(latent_qcv(&p, &q).unwrap(), latent_qcv(&q, &p).unwrap());
        assert!(latent_qcv(&p, &q[..3]).is_err());
    }

    #[test]
    fn closed_form_by_hand() {
        let params = ModelParams {
            rho: 1.0,
            gamma_vol: 1.0,
            nu: 1.0,
            xi: 4.0,
            ..ModelParams::full_scale()
        };
        let sigma = vec![1.0; 1001];
        assert!((closed_form_limit(&params, &sigma, 1e-3) - 2.0).abs() < 1e-12);
        let zero = ModelParams { rho: 0.0, ..params };
        assert_eq!(closed_form_limit(&zero, &sigma, 1e-3), 0.0);
    }

    #[test]
    fn step_path_integral() {
        let p = StepPath {
            start: 1.0,
            jumps: vec![(0.5, 2.0)],
        };
        assert_eq!(p.integral(0.25), 0.25);
        assert_eq!(p.integral(1.0), 1.0 + 2.0 * 0.5);
    }

    #[test]
    fn representation_without_jumps_is_zero() {
        let g = BlockGrid::new(1.0, 12).unwrap();
        let flat = StepPath {
            start: 3.0,
            jumps: vec![],
        };
        assert_eq!(f_representation_qv(&flat, &flat, &g, 2).unwrap(), 0.0);
        let bad = StepPath {
            start: 0.0,
            jumps: vec![(1.5, 1.0)],
        };
        assert!(f_representation_qv(&bad, &flat, &g, 2).is_err());
    }

    #[test]
    fn representation_of_a_single_peak_jump() {
        // jump at centre t_6 of class 2 (K=2): f = 1 for that class and the
        // neighbouring tents of the other classes contribute too
        let g = BlockGrid::new(1.0, 12).unwrap();
        let k = 2;
        let tau = g.boundary(6);
        let p = StepPath {
            start: 0.0,
            jumps: vec![(tau, 2.0)],
        };
        let q = StepPath {
            start: 0.0,
            jumps: vec![(tau, 3.0)],
        };
        let expected: f64 = (1..=2 * k)
            .map(|l| 2.0 * 3.0 * eval_f(tau, l, k, &g).powi(2))
            .sum::<f64>()
            / k as f64;
        assert_eq!(eval_f(tau, 2, k, &g), 1.0);
        let got = f_representation_qv(&p, &q, &g, k).unwrap();
        assert!((got - expected).abs() < 1e-12);
        // tents at t_6 for K=2: classes centred at 5,6,7 give 1/2, 1, 1/2
        assert!((expected - 6.0 * (0.25 + 1.0 + 0.25) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn naive_qv_single_spike() {
        // spike of height 1 at index 5, B = 10, K = 2: the nonzero second
        // differences are at i = 3 (+1), 5 (−2), 7 (+1)
        let mut v = vec![0.0; 11];
        v[5] = 1.0;
        assert_eq!(naive_qv(&v, &v, 2).unwrap(), (1.0 + 4.0 + 1.0) / 2.0);
        let lin: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 - 1.0).collect();
        assert_eq!(naive_qv(&lin, &v, 2).unwrap(), 0.0);
        assert!(naive_qv(&v, &v, 6).is_err());
    }
}
