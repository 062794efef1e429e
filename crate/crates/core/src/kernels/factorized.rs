use std::sync::Arc;

use serde::Serialize;

use super::correlation::CorrelationKernel;
use super::cutoff::CutoffPair;
use crate::gp::GpState;

/// Which radial profile multiplies a kernel on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weight {
    One,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub ell: f64,
    pub alpha: f64,
    pub n: f64,
}

/// `K(x, y) = g(|x − y|) u(|x|) v(|y|)` with `ĝ = Ĝ χ_H`.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizedKernel {
    pub g: CorrelationKernel,
    pub cut: CutoffPair,
    #[serde(skip)]
    pub phi: Arc<GpState>,
    pub left: Weight,
    pub right: Weight,
    pub params: KernelParams,
}

fn make(g: &CorrelationKernel, phi: &GpState, cut: CutoffPair, left: Weight) -> FactorizedKernel {
    FactorizedKernel {
        g: g.clone(),
        cut,
        phi: Arc::new(phi.clone()),
        left,
        right: Weight::Phi,
        params: KernelParams {
            ell: cut.ell,
            alpha: cut.alpha,
            n: g.n,
        },
    }
}

/// `η_H(x, y) = (G ∗ χ̌_H)(x − y) φ(x) φ(y)`.
pub fn build_eta_h(g: &CorrelationKernel, phi: &GpState, cut: CutoffPair) -> FactorizedKernel {
    make(g, phi, cut, Weight::Phi)
}

/// `ν_H(x; y) = (G ∗ χ̌_H)(x − y) φ(y)`.
pub fn build_nu_h(g: &CorrelationKernel, phi: &GpState, cut: CutoffPair) -> FactorizedKernel {
    make(g, phi, cut, Weight::One)
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

impl FactorizedKernel {
    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    /// `Λ = ℓ^{−α}`
    pub fn threshold(&self) -> f64 {
        self.cut.threshold()
    }

    /// `ĝ(p) = Ĝ(p) χ_H(p)`
    pub fn hat(&self, p: f64) -> f64 {
        if p.abs() >= self.threshold() {
            self.g.hat(p)
        } else {
            0.0
        }
    }

    /// Radial factor `g(s)` from the spectral form of the low-pass part.
    pub fn radial(&self, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.g.high_pass(&self.cut, s)
    }

    /// Radial factor with the low-pass part taken as a position-space
    /// convolution, independent of `Ĝ`.
    pub fn radial_direct(&self, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let g = if s <= self.g.ell {
            self.g.value(s)
        } else {
            0.0
        };
        g - self.g.low_pass_position(&self.cut, s)
    }

    pub fn weight(&self, w: Weight, r: f64) -> f64 {
        match w {
            Weight::One => 1.0,
            Weight::Phi => self.phi.phi_at(r),
        }
    }

    pub fn value(&self, x: [f64; 3], y: [f64; 3]) -> f64 {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        self.radial(norm3(d)) * self.weight(self.left, norm3(x)) * self.weight(self.right, norm3(y))
    }

    pub fn value_direct(&self, x: [f64; 3], y: [f64; 3]) -> f64 {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        self.radial_direct(norm3(d))
            * self.weight(self.left, norm3(x))
            * self.weight(self.right, norm3(y))
    }
}
