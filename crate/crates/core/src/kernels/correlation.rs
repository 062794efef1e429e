use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::cutoff::CutoffPair;
use crate::numerics::integrate_panels;
use crate::scattering::NeumannSolution;

/// `G(x) = −N w_ℓ(N x)` with `Ĝ(p) = −N^{−2} ŵ_ℓ(p/N)`.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationKernel {
    #[serde(skip)]
    pub sol: Arc<NeumannSolution>,
    pub n: f64,
    pub ell: f64,
    /// `sup_p p²|Ĝ(p)|` over a decade grid.
    pub sup_p2: f64,
}

pub fn build_g(sol: &NeumannSolution) -> CorrelationKernel {
    let n = sol.n_param;
    let grid =
        crate::numerics::decade_grid(0.1 * n / sol.radius, 100.0 * n / sol.support_radius(), 20);
    let mut k = CorrelationKernel {
        sol: Arc::new(sol.clone()),
        n,
        ell: sol.ell,
        sup_p2: 0.0,
    };
    k.sup_p2 = grid
        .iter()
        .map(|&p| p * p * k.hat(p).abs())
        .fold(0.0, f64::max);
    k
}

impl CorrelationKernel {
    pub fn is_zero(&self) -> bool {
        self.sol.is_zero()
    }

    pub fn value(&self, s: f64) -> f64 {
        -self.n * self.sol.w(self.n * s)
    }

    pub fn hat(&self, p: f64) -> f64 {
        -self.sol.w_hat(p / self.n) / (self.n * self.n)
    }

    /// Support scale of `G` features, `R/N`.
    pub fn core_radius(&self) -> f64 {
        self.sol.support_radius() / self.n
    }

    /// `(G ∗ χ̌_{H^c})(s) = (2/s) ∫_0^Λ Ĝ(p) p sin(2πps) dp`.
    pub fn low_pass_spectral(&self, cut: &CutoffPair, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let lam = cut.threshold();
        let width = if s > 0.0 {
            (0.125 / s).min(lam / 8.0)
        } else {
            lam / 8.0
        };
        let q = 2.0 * PI * s;
        // p sin(qp)·(2/s) = 4π p² sinc(qp)
        4.0 * PI
            * integrate_panels(&[0.0, lam], width, |p| {
                self.hat(p) * p * p * crate::profile::sinc(q * p)
            })
    }

    /// The same convolution in position space:
    /// `(2π/s) ∫ s' G(s') [K(s+s') − K(|s−s'|)] ds'`, `K(t) = −sin(2πΛt)/(2π² t)`.
    pub fn low_pass_position(&self, cut: &CutoffPair, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let a = 2.0 * PI * cut.threshold();
        let kk = |t: f64| -> f64 {
            if t == 0.0 {
                -a / (2.0 * PI * PI)
            } else {
                -(a * t).sin() / (2.0 * PI * PI * t)
            }
        };
        let ell = self.ell;
        let core = self.core_radius();
        let mut breaks = vec![0.0, core];
        let mut b = core;
        while 2.0 * b < ell {
            b *= 2.0;
            breaks.push(b);
        }
        breaks.push(ell);
        if s > 0.0 && s < ell {
            breaks.push(s);
        }
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let width = (0.25 / cut.threshold()).min(ell);
        if s == 0.0 {
            // limit: 4π ∫ s'² G(s') χ̌(s') ds', χ̌(t) = K'(t)/t
            let chi = |t: f64| -> f64 {
                let x = a * t;
                if x < 1e-3 {
                    a.powi(3) / (6.0 * PI * PI) * (1.0 - x * x / 10.0)
                } else {
                    (x.sin() - x * x.cos()) / (2.0 * PI * PI * t.powi(3))
                }
            };
            return 4.0 * PI * integrate_panels(&breaks, width, |t| t * t * self.value(t) * chi(t));
        }
        2.0 * PI / s
            * integrate_panels(&breaks, width, |t| {
                t * self.value(t) * (kk(s + t) - kk((s - t).abs()))
            })
    }

    /// `g_H(s) = (G ∗ χ̌_H)(s) = G(s) − (G ∗ χ̌_{H^c})(s)`.
    pub fn high_pass(&self, cut: &CutoffPair, s: f64) -> f64 {
        let g = if s <= self.ell { self.value(s) } else { 0.0 };
        g - self.low_pass_spectral(cut, s)
    }
}
