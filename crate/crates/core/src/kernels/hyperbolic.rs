//! `sinh_η`, `cosh_η` and the remainders `p_η = sinh_η − η`, `r_η = cosh_η − 1`.
//!
//! Three independent estimates are reported:
//! certified Hilbert-Schmidt bounds from `‖η^{(k)}‖ ≤ ‖η‖ t^{k−1}` with
//! `t ≥ ‖η‖_op`; phase-space values `∫d³x ∫d³p F(ρ(x) ĝ(p))²` where the
//! symbol of `η` is `ρ(x) ĝ(p)`; and pointwise values of the truncated series
//! on the periodic lattice.

use std::f64::consts::PI;

use serde::Serialize;

use super::factorized::FactorizedKernel;
use super::lattice::{sample_pairs, LatticeKernel, LatticeSpec};
use super::spectral::{eta_norms, outer_nodes, NormReport};
use crate::error::{Error, Result};
use crate::numerics::simpson;

/// Truncated hyperbolic series of `η_H`.
#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicKernels {
    pub base: FactorizedKernel,
    /// `‖η_H‖_HS`
    pub eta_hs: f64,
    /// `sup_x ‖η_x‖/|φ(x)|`
    pub row_over_phi: f64,
    /// Operator-norm bound `min(‖η‖_HS, ‖φ‖∞² sup|ĝ|)`.
    pub t: f64,
    pub series_depth: usize,
    /// `‖η‖^{2·depth}/(2·depth)!`
    pub tail_bound: f64,
    pub tol: f64,
}

fn sup_ghat(kern: &FactorizedKernel) -> f64 {
    let (p, _) = outer_nodes(kern, &[], 1);
    let mut s = p.iter().map(|&q| kern.hat(q).abs()).fold(0.0, f64::max);
    s = s.max(kern.hat(kern.threshold()).abs());
    s
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn hyperbolic(kern: &FactorizedKernel, tol: f64) -> Result<HyperbolicKernels> {
    hyperbolic_with(kern, &eta_norms(kern)?, tol)
}

/// [`hyperbolic`] with precomputed norms of `η_H`.
pub fn hyperbolic_with(
    kern: &FactorizedKernel,
    norms: &NormReport,
    tol: f64,
) -> Result<HyperbolicKernels> {
    let eta = norms.eta;
    if eta >= 1.0 {
        return Err(Error::InvalidRegime(format!(
            "hyperbolic series needs ‖η_H‖ < 1, got {eta:.4}"
        )));
    }
    let t = eta.min(kern.phi.sup().powi(2) * sup_ghat(kern));
    let mut depth = 1;
    while eta.powi(2 * depth as i32) / factorial(2 * depth) >= tol && depth < 40 {
        depth += 1;
    }
    Ok(HyperbolicKernels {
        base: kern.clone(),
        eta_hs: eta,
        row_over_phi: norms.sup_row_over_phi,
        t,
        series_depth: depth,
        tail_bound: eta.powi(2 * depth as i32) / factorial(2 * depth),
        tol,
    })
}

/// `(sinh t − t)/t` and `(cosh t − 1)/t`, stable for small `t`.
fn sinh_cosh_ratios(t: f64) -> (f64, f64) {
    if t < 1e-3 {
        let t2 = t * t;
        (t2 / 6.0 * (1.0 + t2 / 20.0), t / 2.0 * (1.0 + t2 / 12.0))
    } else {
        ((t.sinh() - t) / t, (t.cosh() - 1.0) / t)
    }
}

/// `sinh F − F` and `cosh F − 1` without cancellation.
fn sinh_rem(f: f64) -> f64 {
    if f.abs() < 1e-2 {
        let f2 = f * f;
        f * f2 / 6.0 * (1.0 + f2 / 20.0 + f2 * f2 / 840.0)
    } else {
        f.sinh() - f
    }
}

fn cosh_rem(f: f64) -> f64 {
    if f.abs() < 1e-2 {
        let f2 = f * f;
        f2 / 2.0 * (1.0 + f2 / 12.0 + f2 * f2 / 360.0)
    } else {
        f.cosh() - 1.0
    }
}

/// Phase-space grid: radial nodes of `ρ` and momentum nodes of `ĝ`.
pub(crate) struct PhaseGrid {
    pub rho: Vec<f64>,
    /// `4π r² × weight`
    pub wx: Vec<f64>,
    pub ghat: Vec<f64>,
    pub p: Vec<f64>,
    /// `4π p² × weight`
    pub wp: Vec<f64>,
}

impl PhaseGrid {
    /// `refine = 1` uses every second GP node and one Gauss panel per
    /// outer interval; `refine = 2` all nodes and two panels.
    pub fn new(kern: &FactorizedKernel, refine: usize) -> Self {
        let st = &kern.phi;
        let stride = if refine >= 2 { 1 } else { 2 };
        let h = st.h() * stride as f64;
        let idx: Vec<usize> = (0..st.grid.len()).step_by(stride).collect();
        let wx = simpson_weights(idx.len(), h);
        let rho: Vec<f64> = idx.iter().map(|&i| st.phi[i].powi(2)).collect();
        let wx: Vec<f64> = idx
            .iter()
            .zip(&wx)
            .map(|(&i, w)| 4.0 * PI * st.grid[i].powi(2) * w)
            .collect();
        let (p, w) = outer_nodes(kern, &[], refine.max(1));
        let ghat = p.iter().map(|&q| kern.hat(q)).collect();
        let wp = p
            .iter()
            .zip(&w)
            .map(|(q, w)| 4.0 * PI * q * q * w)
            .collect();
        PhaseGrid {
            rho,
            wx,
            ghat,
            p,
            wp,
        }
    }

    /// `∫d³x ∫d³p f(ρ(x)ĝ(p), p)`
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for (r, wx) in self.rho.iter().zip(&self.wx) {
            if *r == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for ((g, p), wp) in self.ghat.iter().zip(&self.p).zip(&self.wp) {
                inner += wp * f(r * g, *p);
            }
            s += wx * inner;
        }
        s
    }
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            simpson(&e, h)
        })
        .collect()
}

/// Norms of the hyperbolic remainders and of derivatives of `η^{(2)}`, `p_η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicNorms {
    pub ell: f64,
    pub alpha: f64,
    pub n: f64,
    pub eta_hs: f64,
    pub t: f64,
    /// Certified `‖p_η‖ ≤ ‖η‖(sinh t − t)/t`.
    pub p_bound: f64,
    /// Certified `‖r_η‖ ≤ ‖η‖(cosh t − 1)/t`.
    pub r_bound: f64,
    /// Certified `sup |p_η(x,y)|/(φ(x)φ(y)) ≤ S²(sinh t − t)/t²`,
    /// `S = sup ‖η_x‖/φ(x)`.
    pub p_pointwise_bound: f64,
    pub p_phase: f64,
    pub r_phase: f64,
    pub grad_eta2_phase: f64,
    pub lap_eta2_phase: f64,
    pub grad_p_phase: f64,
    pub lap_p_phase: f64,
    pub series_depth: usize,
    pub tail_bound: f64,
}

pub fn hyperbolic_norms(hk: &HyperbolicKernels) -> HyperbolicNorms {
    let kern = &hk.base;
    let (sr, cr) = sinh_cosh_ratios(hk.t);
    let mut out = HyperbolicNorms {
        ell: kern.params.ell,
        alpha: kern.params.alpha,
        n: kern.params.n,
        eta_hs: hk.eta_hs,
        t: hk.t,
        p_bound: hk.eta_hs * sr,
        r_bound: hk.eta_hs * cr,
        p_pointwise_bound: if hk.t > 0.0 {
            hk.row_over_phi.powi(2) * sr / hk.t
        } else {
            0.0
        },
        p_phase: 0.0,
        r_phase: 0.0,
        grad_eta2_phase: 0.0,
        lap_eta2_phase: 0.0,
        grad_p_phase: 0.0,
        lap_p_phase: 0.0,
        series_depth: hk.series_depth,
        tail_bound: hk.tail_bound,
    };
    if kern.is_zero() {
        return out;
    }
    let grid = PhaseGrid::new(kern, 2);
    let q2 = |p: f64| (2.0 * PI * p).powi(2);
    out.p_phase = grid.integrate(|f, _| sinh_rem(f).powi(2)).sqrt();
    out.r_phase = grid.integrate(|f, _| cosh_rem(f).powi(2)).sqrt();
    out.grad_eta2_phase = grid.integrate(|f, p| q2(p) * f.powi(4)).sqrt();
    out.lap_eta2_phase = grid.integrate(|f, p| q2(p).powi(2) * f.powi(4)).sqrt();
    out.grad_p_phase = grid.integrate(|f, p| q2(p) * sinh_rem(f).powi(2)).sqrt();
    out.lap_p_phase = grid
        .integrate(|f, p| q2(p).powi(2) * sinh_rem(f).powi(2))
        .sqrt();
    out
}

/// The Lemma-4.3 quantity `∫dy dz |∫dx ∇_x η(y;x)·∇_x η(z;x)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossGradient {
    pub ell: f64,
    pub alpha: f64,
    pub n: f64,
    /// Phase-space value `∫∫ (2πp)⁴ ρ⁴ ĝ⁴`.
    pub value: f64,
    /// The same on the coarser phase-space grid.
    pub value_coarse: f64,
    /// `|value/value_coarse − 1|`
    pub refinement_change: f64,
    /// Certified `(‖∇₁η‖ ‖φ‖∞ (‖φ‖∞ sup|2πpĝ| + ‖∇φ‖∞ sup|ĝ|))²`.
    pub bound: f64,
}

pub fn cross_gradient_hs(kern: &FactorizedKernel) -> Result<CrossGradient> {
    Ok(cross_gradient_with(kern, &eta_norms(kern)?))
}

/// [`cross_gradient_hs`] with precomputed norms of `η_H`.
pub fn cross_gradient_with(kern: &FactorizedKernel, norms: &NormReport) -> CrossGradient {
    let pr = kern.params;
    let mut out = CrossGradient {
        ell: pr.ell,
        alpha: pr.alpha,
        n: pr.n,
        value: 0.0,
        value_coarse: 0.0,
        refinement_change: 0.0,
        bound: 0.0,
    };
    if kern.is_zero() {
        return out;
    }
    let f = |grid: &PhaseGrid| grid.integrate(|f, p| (2.0 * PI * p).powi(4) * f.powi(4));
    out.value = f(&PhaseGrid::new(kern, 2));
    out.value_coarse = f(&PhaseGrid::new(kern, 1));
    out.refinement_change = (out.value / out.value_coarse - 1.0).abs();
    let (p, _) = outer_nodes(kern, &[], 1);
    let sup_pg = p
        .iter()
        .map(|&q| (2.0 * PI * q * kern.hat(q)).abs())
        .fold(0.0, f64::max);
    let sup_g = sup_ghat(kern);
    let phi_sup = kern.phi.sup();
    let dphi_sup = kern
        .phi
        .derivative_samples()
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    out.bound = (norms.grad * phi_sup * (phi_sup * sup_pg + dphi_sup * sup_g)).powi(2);
    out
}

/// Pointwise lattice values of `p_η` and `r_η` against `φ(x)φ(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeHyperbolic {
    pub spec: LatticeSpec,
    pub resolved: bool,
    pub samples: usize,
    pub series_depth: usize,
    /// `max |p_η(x,y)| / (φ(x)φ(y))`
    pub p_ratio: f64,
    /// `max |r_η(x,y)| / (φ(x)φ(y))`
    pub r_ratio: f64,
    /// Every sample obeys `|p_η(x,y)| ≤ ‖η_x‖‖η_y‖(sinh t − t)/t²` with the
    /// lattice norms.
    pub certified_holds: bool,
}

pub fn lattice_hyperbolic(
    hk: &HyperbolicKernels,
    spec: LatticeSpec,
    samples: usize,
    seed: u64,
) -> Result<LatticeHyperbolic> {
    let lat = LatticeKernel::new(&hk.base, spec)?;
    let rows = lat.row_norms();
    let hs = lat.hs_norm();
    let t = hs;
    let pairs = sample_pairs(&lat, samples, seed);
    let mut out = LatticeHyperbolic {
        spec,
        resolved: lat.resolved,
        samples: pairs.len(),
        series_depth: 0,
        p_ratio: 0.0,
        r_ratio: 0.0,
        certified_holds: true,
    };
    let mut cols: std::collections::BTreeMap<usize, (Vec<f64>, Vec<f64>)> = Default::default();
    for &(i, j) in &pairs {
        let (p, r) = cols.entry(j).or_insert_with(|| {
            let (p, r, d) = lat.hyperbolic_columns(j, hs, hk.tol);
            out.series_depth = out.series_depth.max(d);
            (p, r)
        });
        let w = lat.phi[i] * lat.phi[j];
        out.p_ratio = out.p_ratio.max(p[i].abs() / w);
        out.r_ratio = out.r_ratio.max(r[i].abs() / w);
        let bound = if t > 0.0 {
            rows[i] * rows[j] * (t.sinh() - t) / (t * t)
        } else {
            0.0
        };
        if p[i].abs() > bound * (1.0 + 1e-9) + hk.tol * rows[i] * rows[j] {
            out.certified_holds = false;
        }
    }
    Ok(out)
}
