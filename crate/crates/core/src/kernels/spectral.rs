//! Two-center integrals through radial transforms.
//!
//! For `η(x, y) = g(x − y) φ(x) φ(y)` every norm reduces to one-dimensional
//! integrals of `ĥ = (g²)^`, `ĥ_a = (|∇g|²)^` against transforms of `ρ = φ²`
//! and `σ = |∇φ|²`. Both `ĥ` are autocorrelations of `ĝ = Ĝ χ_H`, computed in
//! bipolar coordinates:
//! `ĥ(k) = (2π/k) ∫ p ĝ(p) ∫_{|k−p|}^{k+p} t ĝ(t) dt dp`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::factorized::FactorizedKernel;
use crate::error::{failure, Result};
use crate::gp::GpState;
use crate::numerics::{gauss_legendre, radial_transform_uniform};
use crate::profile::sinc;

/// Transforms of `ρ = φ²` and `σ = φ'²` on Gauss nodes in `k`.
#[derive(Debug, Clone)]
pub(crate) struct Density {
    pub k: Vec<f64>,
    pub wk: Vec<f64>,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    pub r_max: f64,
    /// `‖φ̂‖₂` by quadrature.
    pub phi_hat_norm: f64,
}

impl Density {
    pub fn new(state: &GpState) -> Self {
        let h = state.h();
        let rho: Vec<f64> = state.phi.iter().map(|p| p * p).collect();
        let sigma: Vec<f64> = state.derivative_samples().iter().map(|d| d * d).collect();
        let rho0 = radial_transform_uniform(&rho, 0.0, h, 0.0);
        // ρ̂ of a smooth density decays fast; stop once it is at the noise floor
        let k_cap = 0.25 / h;
        let mut k_max = 0.5;
        while k_max < k_cap && radial_transform_uniform(&rho, 0.0, h, k_max).abs() > 1e-13 * rho0 {
            k_max += 0.05;
        }
        let k_max = k_max.min(k_cap) + 0.25;
        let panels = (k_max / 0.25).ceil() as usize;
        let width = k_max / panels as f64;
        let rule = gauss_legendre();
        let mut k = Vec::new();
        let mut wk = Vec::new();
        for j in 0..panels {
            let c = (j as f64 + 0.5) * width;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                k.push(c + 0.5 * width * x);
                wk.push(0.5 * width * w);
            }
        }
        let rho_hat: Vec<f64> = k
            .iter()
            .map(|&q| radial_transform_uniform(&rho, 0.0, h, q))
            .collect();
        let sigma_hat: Vec<f64> = k
            .iter()
            .map(|&q| radial_transform_uniform(&sigma, 0.0, h, q))
            .collect();
        let phi_hat_sq: f64 = k
            .iter()
            .zip(&wk)
            .map(|(&q, w)| {
                let v = radial_transform_uniform(&state.phi, 0.0, h, q);
                4.0 * PI * w * q * q * v * v
            })
            .sum();
        Density {
            k,
            wk,
            rho: rho_hat,
            sigma: sigma_hat,
            r_max: state.r_max(),
            phi_hat_norm: phi_hat_sq.sqrt(),
        }
    }
}

/// Outer momentum panels for integrals over `p ≥ Λ` of `ĝ`-products:
/// doubling panels up to the scale `S = N/R` of `Ĝ`, then width `S/4` up to
/// `50 S`.
pub(crate) fn outer_breaks(k: &FactorizedKernel, extra: &[f64]) -> Vec<f64> {
    let lam = k.threshold();
    let scale = (k.g.n / k.g.sol.support_radius()).max(lam);
    let mut b = vec![lam];
    let mut x = lam;
    while 2.0 * x < scale {
        x *= 2.0;
        b.push(x);
    }
    x = scale;
    b.push(x);
    let top = 50.0 * scale;
    while x < top {
        x += 0.25 * scale;
        b.push(x);
    }
    for &e in extra {
        if e > lam && e < top {
            b.push(e);
        }
    }
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup();
    b
}

/// Gauss nodes and weights over the outer panels.
pub(crate) fn outer_nodes(
    k: &FactorizedKernel,
    extra: &[f64],
    refine: usize,
) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre();
    let b = outer_breaks(k, extra);
    let mut p = Vec::new();
    let mut w = Vec::new();
    for win in b.windows(2) {
        let h = (win[1] - win[0]) / refine as f64;
        for j in 0..refine {
            let c = win[0] + (j as f64 + 0.5) * h;
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                p.push(c + 0.5 * h * x);
                w.push(0.5 * h * wt);
            }
        }
    }
    (p, w)
}

/// `(ĥ(k), ĥ_a(k))` for the high-pass radial factor.
pub(crate) fn pair_transforms(kern: &FactorizedKernel, k: f64) -> (f64, f64) {
    let lam = kern.threshold();
    let (p_nodes, p_w) = outer_nodes(kern, &[lam + k, (k - lam).abs()], 1);
    let rule = gauss_legendre();
    let mut h = 0.0;
    let mut ha = 0.0;
    for (&p, &wp) in p_nodes.iter().zip(&p_w) {
        let gp = kern.hat(p);
        if gp == 0.0 {
            continue;
        }
        let lo = (k - p).abs().max(lam);
        let hi = k + p;
        if hi <= lo {
            continue;
        }
        let c = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut j = 0.0;
        let mut ja = 0.0;
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let t = c + half * x;
            let v = wt * t * kern.hat(t);
            j += v;
            ja += v * 2.0 * PI * PI * (p * p + t * t - k * k);
        }
        h += wp * p * gp * j * half;
        ha += wp * p * gp * ja * half;
    }
    (2.0 * PI / k * h, 2.0 * PI / k * ha)
}

/// Tabulated `ĥ`, `ĥ_a` on the density's `k` nodes.
pub(crate) struct PairTable {
    pub h: Vec<f64>,
    pub ha: Vec<f64>,
}

pub(crate) fn pair_table(kern: &FactorizedKernel, dens: &Density) -> PairTable {
    let v: Vec<(f64, f64)> = dens
        .k
        .par_iter()
        .map(|&k| pair_transforms(kern, k))
        .collect();
    PairTable {
        h: v.iter().map(|x| x.0).collect(),
        ha: v.iter().map(|x| x.1).collect(),
    }
}

/// `(g² ∗ ρ)(r) = 4π ∫ k² ĥ ρ̂ sinc(2πkr) dk`.
fn g2_rho(dens: &Density, table: &PairTable, r: f64) -> f64 {
    let q = 2.0 * PI * r;
    4.0 * PI
        * dens
            .k
            .iter()
            .enumerate()
            .map(|(i, &k)| dens.wk[i] * k * k * table.h[i] * dens.rho[i] * sinc(q * k))
            .sum::<f64>()
}

fn sup_sqrt_g2_rho(dens: &Density, table: &PairTable) -> f64 {
    let n = (dens.r_max / 0.05).ceil() as usize;
    (0..=n)
        .map(|i| g2_rho(dens, table, i as f64 * 0.05).max(0.0).sqrt())
        .fold(0.0, f64::max)
}

/// `‖g_H‖₂² = 4π ∫_Λ^∞ p² Ĝ(p)² dp`.
pub fn radial_l2_momentum(kern: &FactorizedKernel) -> f64 {
    if kern.is_zero() {
        return 0.0;
    }
    let (p, w) = outer_nodes(kern, &[], 1);
    let s: f64 = p
        .iter()
        .zip(&w)
        .map(|(&p, &w)| w * p * p * kern.hat(p).powi(2))
        .sum();
    (4.0 * PI * s).sqrt()
}

/// `‖g_H‖₂` in position space. Because `χ_{H^c}` is a projection,
/// `‖g_H‖² = ⟨G, G⟩ − ⟨G, G ∗ χ̌_{H^c}⟩`, and both pairings live on the
/// support `s ≤ ℓ` of `G`; the low-pass part is the position-space
/// convolution.
pub fn radial_l2_position(kern: &FactorizedKernel) -> f64 {
    if kern.is_zero() {
        return 0.0;
    }
    let g = &kern.g;
    let core = g.core_radius();
    let mut breaks = vec![0.0, core / 4.0, core / 2.0, core];
    let mut b = core;
    while 2.0 * b < g.ell {
        b *= 2.0;
        breaks.push(b);
    }
    breaks.push(g.ell);
    let rule = gauss_legendre();
    let nodes: Vec<(f64, f64)> = breaks
        .windows(2)
        .flat_map(|w| {
            let m = ((w[1] - w[0]) / (0.25 / kern.threshold()).max(core / 4.0))
                .ceil()
                .max(1.0) as usize;
            let h = (w[1] - w[0]) / m as f64;
            (0..m).flat_map(move |j| {
                let c = w[0] + (j as f64 + 0.5) * h;
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(move |(x, wt)| (c + 0.5 * h * x, 0.5 * h * wt))
            })
        })
        .collect();
    let s: f64 = nodes
        .par_iter()
        .map(|&(s, w)| {
            let gs = g.value(s);
            w * s * s * gs * (gs - g.low_pass_position(&kern.cut, s))
        })
        .sum();
    (4.0 * PI * s).max(0.0).sqrt()
}

/// Norms of `η_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub ell: f64,
    pub alpha: f64,
    pub n: f64,
    /// `‖η_H‖` (Hilbert-Schmidt)
    pub eta: f64,
    /// `sup_x ‖η_{H,x}‖ / |φ(x)| = sup_x ((g² ∗ ρ)(x))^{1/2}`
    pub sup_row_over_phi: f64,
    /// `‖∇₁η_H‖`
    pub grad: f64,
    /// `‖∇₁η_H‖ / √N`
    pub grad_over_sqrt_n: f64,
    /// `sup |η_H(x;y)| / (N |φ(x)| |φ(y)|) = sup_s |g_H(s)| / N`
    pub pointwise: f64,
    /// Contributions `∫|∇g|²ρρ`, `∫g²σρ`, `−½∫g²Δρ ρ` to `‖∇₁η_H‖²`.
    pub grad_terms: [f64; 3],
}

/// `sup_s |g_H(s)|` on a grid concentrated at the core.
pub(crate) fn radial_sup(kern: &FactorizedKernel) -> f64 {
    let core = kern.g.core_radius();
    let mut s = vec![0.0];
    s.extend(crate::numerics::decade_grid(core / 20.0, kern.g.ell, 12));
    s.par_iter()
        .map(|&x| kern.radial(x).abs())
        .reduce(|| 0.0, f64::max)
}

fn check(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(failure(what, v))
    }
}

pub fn eta_norms(kern: &FactorizedKernel) -> Result<NormReport> {
    let p = kern.params;
    let mut rep = NormReport {
        ell: p.ell,
        alpha: p.alpha,
        n: p.n,
        eta: 0.0,
        sup_row_over_phi: 0.0,
        grad: 0.0,
        grad_over_sqrt_n: 0.0,
        pointwise: 0.0,
        grad_terms: [0.0; 3],
    };
    if kern.is_zero() {
        return Ok(rep);
    }
    let dens = Density::new(&kern.phi);
    let table = pair_table(kern, &dens);
    let mut eta2 = 0.0;
    let mut terms = [0.0; 3];
    for i in 0..dens.k.len() {
        let k = dens.k[i];
        let w = 4.0 * PI * dens.wk[i] * k * k;
        let r = dens.rho[i];
        eta2 += w * table.h[i] * r * r;
        terms[0] += w * table.ha[i] * r * r;
        terms[1] += w * table.h[i] * dens.sigma[i] * r;
        terms[2] += w * 2.0 * PI * PI * k * k * table.h[i] * r * r;
    }
    let grad2: f64 = terms.iter().sum();
    rep.eta = check(eta2, "eta norm quadrature")?.max(0.0).sqrt();
    rep.grad = check(grad2, "gradient norm quadrature")?.max(0.0).sqrt();
    rep.grad_over_sqrt_n = rep.grad / p.n.sqrt();
    rep.grad_terms = terms;
    rep.sup_row_over_phi = sup_sqrt_g2_rho(&dens, &table);
    rep.pointwise = radial_sup(kern) / p.n;
    Ok(rep)
}

/// Norms of `ν_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuNormReport {
    pub ell: f64,
    pub alpha: f64,
    pub n: f64,
    /// `‖ν_H‖ = ‖g_H‖₂ ‖φ‖₂`
    pub nu: f64,
    /// `sup_x ‖ν_{H,x}‖ = sup_x ((g² ∗ ρ)(x))^{1/2}`
    pub sup_x: f64,
    /// `sup_y ‖ν_{H,y}‖ / |φ(y)| = ‖g_H‖₂`
    pub sup_y_over_phi: f64,
    /// `sup_p p² ‖ν̂_{H,p}‖`
    pub sup_p2_slice: f64,
    /// `‖φ̂‖₂` entering the momentum slices.
    pub phi_hat_norm: f64,
}

pub fn nu_norms(kern: &FactorizedKernel) -> Result<NuNormReport> {
    let p = kern.params;
    let mut rep = NuNormReport {
        ell: p.ell,
        alpha: p.alpha,
        n: p.n,
        nu: 0.0,
        sup_x: 0.0,
        sup_y_over_phi: 0.0,
        sup_p2_slice: 0.0,
        phi_hat_norm: 0.0,
    };
    let dens = Density::new(&kern.phi);
    rep.phi_hat_norm = dens.phi_hat_norm;
    if kern.is_zero() {
        return Ok(rep);
    }
    let gl2 = check(radial_l2_momentum(kern), "nu norm quadrature")?;
    rep.nu = gl2 * kern.phi.norm2().sqrt();
    rep.sup_y_over_phi = gl2;
    let table = pair_table(kern, &dens);
    rep.sup_x = sup_sqrt_g2_rho(&dens, &table);
    let (ps, _) = outer_nodes(kern, &[], 1);
    rep.sup_p2_slice = ps
        .iter()
        .map(|&q| q * q * slice_norm(kern, q, dens.phi_hat_norm))
        .fold(0.0, f64::max);
    Ok(rep)
}

/// `‖ν̂_{H,p}‖ = |Ĝ(p)| χ_H(p) ‖φ̂‖₂`: the slice `q ↦ Ĝ(p)χ_H(p)φ̂(p+q)` is a
/// shifted copy of `φ̂`.
pub fn slice_norm(kern: &FactorizedKernel, p: f64, phi_hat_norm: f64) -> f64 {
    kern.hat(p).abs() * phi_hat_norm
}
