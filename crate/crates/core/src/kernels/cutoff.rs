use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::adaptive;

/// Sharp momentum cutoff `χ_H = 1{|p| ≥ ℓ^{−α}}` and Gaussian low-pass
/// `g_L(p) = e^{−(ℓ^β p)²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffPair {
    pub ell: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CutoffPair {
    pub fn new(ell: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(ell > 0.0 && ell < 1.0) {
            return Err(invalid(format!("ell must lie in (0,1), got {ell}")));
        }
        if !(beta > 0.0) || !(beta < alpha) {
            return Err(invalid(format!(
                "need 0 < beta < alpha, got beta={beta}, alpha={alpha}"
            )));
        }
        Ok(CutoffPair { ell, alpha, beta })
    }

    /// `ℓ^{−α}`
    pub fn threshold(&self) -> f64 {
        self.ell.powf(-self.alpha)
    }

    pub fn chi_h(&self, p: f64) -> f64 {
        if p.abs() >= self.threshold() {
            1.0
        } else {
            0.0
        }
    }

    pub fn chi_hc(&self, p: f64) -> f64 {
        1.0 - self.chi_h(p)
    }

    pub fn g_l(&self, p: f64) -> f64 {
        (-(self.ell.powf(self.beta) * p).powi(2)).exp()
    }

    /// `ǧ_L(x) = (√π ℓ^{−β})³ e^{−(π ℓ^{−β} x)²}`
    pub fn g_l_check(&self, x: f64) -> f64 {
        let a = self.ell.powf(-self.beta);
        (PI.sqrt() * a).powi(3) * (-(PI * a * x).powi(2)).exp()
    }
}

/// Quadrature norms of `ǧ_L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLowpass {
    pub ell: f64,
    pub beta: f64,
    pub l1_norm: f64,
    pub l2_norm: f64,
    /// `(π/2)^{3/4} ℓ^{−3β/2}`
    pub l2_closed_form: f64,
}

pub fn build_gaussian_lowpass(ell: f64, beta: f64) -> Result<GaussianLowpass> {
    if !(beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    if !(ell > 0.0) {
        return Err(invalid(format!("ell must be positive, got {ell}")));
    }
    let cut = CutoffPair {
        ell,
        alpha: f64::INFINITY,
        beta,
    };
    let width = 1.0 / (PI * ell.powf(-beta));
    let r_end = 12.0 * width;
    let l1 = 4.0 * PI * adaptive(0.0, r_end, 1e-14, &mut |r: f64| cut.g_l_check(r) * r * r);
    let l2sq = 4.0
        * PI
        * adaptive(0.0, r_end, 1e-14 * cut.g_l_check(0.0), &mut |r: f64| {
            (cut.g_l_check(r) * r).powi(2)
        });
    Ok(GaussianLowpass {
        ell,
        beta,
        l1_norm: l1,
        l2_norm: l2sq.sqrt(),
        l2_closed_form: (PI / 2.0).powf(0.75) * ell.powf(-1.5 * beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowpass_norms() {
        for (ell, beta) in [(0.5, 2.0), (0.125, 2.0), (0.3, 0.7)] {
            let g = build_gaussian_lowpass(ell, beta).unwrap();
            assert!((g.l1_norm - 1.0).abs() < 1e-10, "{}", g.l1_norm);
            assert!((g.l2_norm / g.l2_closed_form - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn partition() {
        let c = CutoffPair::new(0.5, 4.0, 2.0).unwrap();
        for p in [0.0, 15.99, 16.0, 100.0] {
            assert_eq!(c.chi_h(p) + c.chi_hc(p), 1.0);
        }
        assert!(CutoffPair::new(0.5, 2.0, 2.0).is_err());
    }
}
