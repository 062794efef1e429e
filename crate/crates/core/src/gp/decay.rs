use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GpState;
use crate::error::{invalid, Result};
use crate::numerics::filon_sine;
use crate::potentials::TrapPotential;

/// `sup_r g(r) e^{νr}` for `g = φ, |φ'|, |Δφ|` over the trusted region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub nu: f64,
    pub c_phi: f64,
    pub c_dphi: f64,
    pub c_lap: f64,
    /// Largest radius where `φ` is above the floating-point floor.
    pub r_trust: f64,
    /// False when a supremum sits at the edge of the trusted region, i.e.
    /// the weighted function is still growing there.
    pub decays: bool,
}

const FLOOR: f64 = 10.0 * f64::EPSILON;

/// Grid-level `φ'` and `Δφ = χ''/r` at the nodes `1..n`.
pub(crate) fn derivatives(state: &GpState) -> (Vec<f64>, Vec<f64>) {
    let h = state.h();
    let chi = state.chi();
    let n = chi.len();
    // odd extension at 0, zero Dirichlet at r_max
    let c = |i: isize| -> f64 {
        if i == 0 || i == n as isize + 1 {
            0.0
        } else if i < 0 {
            -chi[(-i - 1) as usize]
        } else if i > n as isize + 1 {
            -chi[(2 * (n as isize + 1) - i - 1) as usize]
        } else {
            chi[(i - 1) as usize]
        }
    };
    let mut dphi = Vec::with_capacity(n);
    let mut lap = Vec::with_capacity(n);
    for i in 1..=n as isize {
        let r = i as f64 * h;
        let d1 = (c(i - 2) - 8.0 * c(i - 1) + 8.0 * c(i + 1) - c(i + 2)) / (12.0 * h);
        let d2 = (-c(i - 2) + 16.0 * c(i - 1) - 30.0 * c(i) + 16.0 * c(i + 1) - c(i + 2))
            / (12.0 * h * h);
        dphi.push((d1 * r - c(i)) / (r * r));
        lap.push(d2 / r);
    }
    (dphi, lap)
}

/// Exponential-decay constants of `φ`, `φ'`, `Δφ` at rate `ν`.
pub fn verify_decay(state: &GpState, nu: f64) -> Result<DecayReport> {
    if !(nu > 0.0) {
        return Err(invalid(format!("decay rate must be positive, got {nu}")));
    }
    let (dphi, lap) = derivatives(state);
    let n = dphi.len();
    let last = (1..=n).rev().find(|&i| state.phi[i] > FLOOR).unwrap_or(1);
    let r_trust = state.grid[last];
    let mut decays = true;
    let mut sup = |vals: &dyn Fn(usize) -> f64| {
        let mut best = 0.0;
        let mut arg = 0;
        for i in 1..=last {
            let v = vals(i).abs() * (nu * state.grid[i]).exp();
            if v > best {
                best = v;
                arg = i;
            }
        }
        if arg as f64 > 0.95 * last as f64 {
            decays = false;
        }
        best
    };
    let c_phi = sup(&|i| state.phi[i]);
    let c_dphi = sup(&|i| dphi[i - 1]);
    let c_lap = sup(&|i| lap[i - 1]);
    Ok(DecayReport {
        nu,
        c_phi,
        c_dphi,
        c_lap,
        r_trust,
        decays,
    })
}

/// `φ̂(p)` in the `e^{−2πipx}` convention, and an estimate of its rounding
/// floor.
fn phi_hat(state: &GpState, p: f64) -> (f64, f64) {
    let h = state.h();
    let mut chi = vec![0.0];
    chi.extend(state.chi());
    chi.push(0.0);
    let mass: f64 = chi.iter().map(|c| c.abs()).sum::<f64>() * h;
    if p == 0.0 {
        let g: Vec<f64> = chi.iter().zip(&state.grid).map(|(c, r)| c * r).collect();
        return (
            4.0 * PI * crate::numerics::simpson(&g, h),
            64.0 * f64::EPSILON * mass,
        );
    }
    let v = 2.0 / p * filon_sine(&chi, 0.0, h, 2.0 * PI * p);
    (v, 64.0 * f64::EPSILON * 2.0 / p * mass)
}

/// `sup_p |φ̂(p)|(1 + p)⁴` over `p_grid`; values under the rounding floor
/// are clamped to it.
pub fn fourier_decay(state: &GpState, p_grid: &[f64]) -> Result<f64> {
    check_grid(p_grid)?;
    Ok(p_grid
        .iter()
        .map(|&p| {
            let (v, floor) = phi_hat(state, p);
            v.abs().max(floor.min(v.abs())) * (1.0 + p).powi(4)
        })
        .fold(0.0, f64::max))
}

fn check_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.iter().any(|&p| !(p >= 0.0)) {
        return Err(invalid("p_grid must be nonnegative"));
    }
    let pos: Vec<f64> = p_grid.iter().cloned().filter(|&p| p > 0.0).collect();
    let lo = pos.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pos.iter().cloned().fold(0.0, f64::max);
    if !(hi / lo >= 100.0) {
        return Err(invalid("p_grid must span at least two decades"));
    }
    Ok(())
}

/// Log-log slope of `|φ̂|` beyond `p_min`, fitted only on samples above the
/// rounding floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSlope {
    pub slope: Option<f64>,
    pub resolved_points: usize,
    /// Every sample beyond `p_min` is below the floor.
    pub below_floor: bool,
}

pub fn fourier_tail_slope(state: &GpState, p_grid: &[f64], p_min: f64) -> Result<TailSlope> {
    check_grid(p_grid)?;
    let pts: Vec<(f64, f64)> = p_grid
        .iter()
        .filter(|&&p| p >= p_min)
        .filter_map(|&p| {
            let (v, floor) = phi_hat(state, p);
            (v.abs() > floor).then(|| (p.ln(), v.abs().ln()))
        })
        .collect();
    let slope = if pts.len() >= 3 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(TailSlope {
        slope,
        resolved_points: pts.len(),
        below_floor: pts.is_empty(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VextBound {
    /// `sup_r V_ext(r) φ(r)`
    pub sup_vphi: f64,
    /// `∫ V_ext² φ²`
    pub int_v2phi2: f64,
}

pub fn vext_phi_bound(state: &GpState, trap: &TrapPotential) -> VextBound {
    let sup_vphi = state
        .grid
        .iter()
        .zip(&state.phi)
        .map(|(&r, &p)| trap.value(r) * p.abs())
        .fold(0.0, f64::max);
    let g: Vec<f64> = state
        .grid
        .iter()
        .zip(&state.phi)
        .map(|(&r, &p)| (trap.value(r) * p * r).powi(2))
        .collect();
    VextBound {
        sup_vphi,
        int_v2phi2: 4.0 * PI * crate::numerics::simpson(&g, state.h()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{minimize_gp, GpGrid};
    use crate::potentials::{make_trap, TrapKind};

    #[test]
    fn gaussian_transform_and_bound() {
        let t = make_trap(TrapKind::Harmonic, 128, 10.0).unwrap();
        let s = minimize_gp(&t, 0.0, GpGrid::default(), 1e-9).unwrap();
        // φ̂ of π^{-3/4} e^{-r²/2} is π^{-3/4} (2π)^{3/2} e^{-2π²p²}
        for p in [0.0, 0.1, 0.3] {
            let exact = PI.powf(-0.75) * (2.0 * PI).powf(1.5) * (-2.0 * PI * PI * p * p).exp();
            assert!((phi_hat(&s, p).0 - exact).abs() < 1e-6);
        }
        let b = vext_phi_bound(&s, &t);
        assert!((b.sup_vphi - 2.0 * (-1f64).exp() * PI.powf(-0.75)).abs() < 1e-4);
    }
}
