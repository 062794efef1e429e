use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::gp::GpState;
use crate::numerics::{gauss_legendre, simpson};
use crate::scattering::NeumannSolution;

/// `h_N = (N³(V w_ℓ)(N·) ∗ |φ|²) φ` on the GP grid.
#[derive(Debug, Clone, Serialize)]
pub struct HnProfile {
    pub n: f64,
    pub ell: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub l2: f64,
    pub sup: f64,
    /// `∫ V w_ℓ = ∫V − ∫V f_ℓ`, the `L¹` norm of `N³(Vw_ℓ)(N·)`.
    pub integral_vw: f64,
    /// `‖h_N − (∫V w_ℓ) φ³‖₂`
    pub limit_distance: f64,
    /// `‖h_N‖∞ ≤ ∫V w_ℓ ‖φ‖∞³`
    pub young_bound: f64,
    pub young_holds: bool,
}

/// Spherical mean of `ρ` over the sphere of radius `a` about a point at
/// distance `x` from the origin.
fn spherical_mean(state: &GpState, x: f64, a: f64) -> f64 {
    let rho = |t: f64| state.phi_at(t).powi(2);
    if a == 0.0 {
        return rho(x);
    }
    if x == 0.0 {
        return rho(a);
    }
    let lo = (x - a).abs();
    let hi = x + a;
    gauss_legendre().apply(lo, hi, |t| t * rho(t)) / (2.0 * a * x)
}

pub fn build_hn(sol: &NeumannSolution, state: &GpState) -> HnProfile {
    let grid = state.grid.clone();
    let n = sol.n_param;
    let mut out = HnProfile {
        n,
        ell: sol.ell,
        grid: grid.clone(),
        values: vec![0.0; grid.len()],
        l2: 0.0,
        sup: 0.0,
        integral_vw: 0.0,
        limit_distance: 0.0,
        young_bound: 0.0,
        young_holds: true,
    };
    if sol.is_zero() {
        return out;
    }
    let (h, u, v) = sol.inner_values();
    // 4π V w r² on the support, with u = r f
    let kern: Vec<f64> = (0..u.len())
        .map(|i| {
            let r = i as f64 * h;
            4.0 * PI * v[i] * (r * r - r * u[i])
        })
        .collect();
    out.integral_vw = simpson(&kern, h);
    // thin the radial grid so the convolution costs O(grid × 256)
    let stride = (u.len() / 256).max(1) & !1usize;
    let stride = stride.max(1);
    let idx: Vec<usize> = (0..u.len()).step_by(stride).collect();
    let hs = h * stride as f64;
    out.values = grid
        .par_iter()
        .zip(&state.phi)
        .map(|(&x, &ph)| {
            let g: Vec<f64> = idx
                .iter()
                .map(|&i| kern[i] * spherical_mean(state, x, i as f64 * h / n))
                .collect();
            simpson(&g, hs) * ph
        })
        .collect();
    let sh = state.h();
    let sq: Vec<f64> = grid
        .iter()
        .zip(&out.values)
        .map(|(r, v)| (r * v).powi(2))
        .collect();
    out.l2 = (4.0 * PI * simpson(&sq, sh)).sqrt();
    out.sup = out.values.iter().fold(0.0, |m, v| m.max(v.abs()));
    let diff: Vec<f64> = grid
        .iter()
        .zip(&out.values)
        .zip(&state.phi)
        .map(|((r, v), p)| (r * (v - out.integral_vw * p.powi(3))).powi(2))
        .collect();
    out.limit_distance = (4.0 * PI * simpson(&diff, sh)).sqrt();
    out.young_bound = out.integral_vw.abs() * state.sup().powi(3);
    out.young_holds = out.sup <= out.young_bound * (1.0 + 1e-6);
    out
}
