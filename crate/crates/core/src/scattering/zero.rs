use serde::{Deserialize, Serialize};

use super::shoot::shoot;
use crate::error::{failure, invalid, Error, Result};
use crate::numerics::simpson;
use crate::potentials::InteractionPotential;

/// Zero-energy scattering solution `f` and scattering length `a0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub r_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub f: Vec<f64>,
    pub a0: f64,
    pub tail_fit_window: (f64, f64),
    /// `∫ V f` over ℝ³.
    pub integral_vf: f64,
    /// Change of `u'(R)/u(R)` between the accepted step and half of it.
    pub richardson_delta: f64,
    pub inner_steps: usize,
}

impl ScatteringSolution {
    /// `8π a0` against `∫ V f`, relative.
    pub fn identity_defect(&self) -> f64 {
        if self.a0 == 0.0 {
            return self.integral_vf.abs();
        }
        (8.0 * std::f64::consts::PI * self.a0 - self.integral_vf).abs()
            / (8.0 * std::f64::consts::PI * self.a0)
    }
}

pub(crate) const RICHARDSON_TOL: f64 = 1e-10;

/// Inner solve with step doubling until the boundary log-derivative settles.
pub(crate) fn converged_shot(
    v: &InteractionPotential,
    lambda: f64,
    steps: usize,
) -> Result<(super::shoot::Shot, f64)> {
    let mut n = steps.max(2) & !1;
    let mut coarse = shoot(v, lambda, n);
    for _ in 0..8 {
        let fine = shoot(v, lambda, 2 * n);
        let (u0, d0) = coarse.end();
        let (u1, d1) = fine.end();
        let delta = (d1 / u1 - d0 / u0).abs() / (d1 / u1).abs().max(1e-300);
        if delta <= RICHARDSON_TOL {
            return Ok((coarse, delta));
        }
        coarse = fine;
        n *= 2;
    }
    let (u0, d0) = coarse.end();
    Err(failure("zero-energy RK4 refinement", d0 / u0))
}

/// Solve `−u'' + (V/2)u = 0`, `u(0) = 0`, on `[0, r_max]`.
pub fn solve_zero_energy(
    v: &InteractionPotential,
    r_max: f64,
    n_pts: usize,
) -> Result<ScatteringSolution> {
    let r_sup = v.support_radius;
    if !(r_max >= 10.0 * r_sup) {
        return Err(Error::DomainTooSmall(format!(
            "r_max = {r_max} must be at least 10 support radii ({})",
            10.0 * r_sup
        )));
    }
    if n_pts < 512 {
        return Err(invalid(format!("n_pts must be >= 512, got {n_pts}")));
    }
    let (shot, delta) = converged_shot(v, 0.0, n_pts)?;
    let (ur, dr) = shot.end();
    // Outer region: u = ur + dr (r − R) exactly.
    let n_out = n_pts;
    let h_out = (r_max - r_sup) / n_out as f64;
    let mut r_grid: Vec<f64> = (0..shot.u.len()).map(|i| i as f64 * shot.h).collect();
    let mut u = shot.u.clone();
    for j in 1..=n_out {
        let r = r_sup + j as f64 * h_out;
        r_grid.push(r);
        u.push(ur + dr * (r - r_sup));
    }
    let lo = 0.8 * r_max;
    let pts: Vec<(f64, f64)> = r_grid
        .iter()
        .zip(&u)
        .filter(|(r, _)| **r >= lo)
        .map(|(r, u)| (*r, *u))
        .collect();
    let (slope, intercept) = linear_fit(&pts);
    let a0 = if v.is_zero() { 0.0 } else { -intercept / slope };
    let u: Vec<f64> = u.iter().map(|x| x / slope).collect();
    let f: Vec<f64> = r_grid
        .iter()
        .zip(&u)
        .map(|(&r, &x)| if r == 0.0 { 1.0 / slope } else { x / r })
        .collect();
    let inner: Vec<f64> = (0..shot.u.len())
        .map(|i| {
            let r = i as f64 * shot.h;
            v.value(r) * u[i] * r
        })
        .collect();
    let integral_vf = 4.0 * std::f64::consts::PI * simpson(&inner, shot.h);
    Ok(ScatteringSolution {
        r_grid,
        u,
        f,
        a0,
        tail_fit_window: (lo, r_max),
        integral_vf,
        richardson_delta: delta,
        inner_steps: shot.u.len() - 1,
    })
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::make_square_well;

    #[test]
    fn square_well_oracle() {
        let v = make_square_well(2.0, 1.0, 256).unwrap();
        let s = solve_zero_energy(&v, 20.0, 1024).unwrap();
        let exact = 1.0 - 1f64.tanh();
        assert!(((s.a0 - exact) / exact).abs() < 1e-9, "a0 = {}", s.a0);
        assert!(s.identity_defect() < 1e-6);
        assert!(s.f.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(s.u[0], 0.0);
    }

    #[test]
    fn zero_potential() {
        let v = make_square_well(0.0, 1.0, 64).unwrap();
        let s = solve_zero_energy(&v, 10.0, 512).unwrap();
        assert_eq!(s.a0, 0.0);
        assert!(s.f.iter().all(|&x| (x - 1.0).abs() < 1e-13));
    }

    #[test]
    fn domain_checks() {
        let v = make_square_well(2.0, 1.0, 64).unwrap();
        assert!(matches!(
            solve_zero_energy(&v, 0.5, 512),
            Err(Error::DomainTooSmall(_))
        ));
        assert!(matches!(
            solve_zero_energy(&v, 20.0, 100),
            Err(Error::InvalidParameter(_))
        ));
    }
}
