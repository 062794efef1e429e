//! Parameter sweeps over `ℓ` and `N` with log-log slope fits.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::build_g;
use super::cutoff::{build_gaussian_lowpass, CutoffPair, GaussianLowpass};
use super::factorized::{build_eta_h, build_nu_h, FactorizedKernel};
use super::hyperbolic::{
    cross_gradient_with, hyperbolic_norms, hyperbolic_with, lattice_hyperbolic, CrossGradient,
    HyperbolicNorms, LatticeHyperbolic,
};
use super::lattice::{eta_power_bound, LatticeSpec, PowerBoundReport};
use super::spectral::{eta_norms, nu_norms, NormReport, NuNormReport};
use crate::error::Result;
use crate::gp::GpState;
use crate::numerics::{fit_slope, SlopeFit};
use crate::potentials::InteractionPotential;
use crate::scattering::solve_neumann;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSweepConfig {
    pub alpha: f64,
    pub beta: f64,
    /// `ℓ` values of the scaling sweep.
    pub ells: Vec<f64>,
    /// Fixed `N` of the `ℓ` sweep; must exceed `ℓ^{−α}` by orders of
    /// magnitude for `Ĝ` to be in its `|p|^{−2}` regime above the cutoff.
    pub n_large: f64,
    /// `ℓ` of the `N` sweep and of the reference kernel.
    pub n_sweep_ell: f64,
    /// `Nℓ` values of the `N` sweep; the middle one is the reference.
    pub n_sweep_n_ell: Vec<f64>,
    pub neumann_points: usize,
    pub lattice_side: usize,
    pub lattice_samples: usize,
    pub series_tol: f64,
    pub eta_slope_tol: f64,
    pub nu_slope_tol: f64,
    /// Remainder slopes must be `≥ α − margin`.
    pub remainder_margin: f64,
    pub cross_margin: f64,
    pub grad_stability_tol: f64,
    pub lowpass_l1_tol: f64,
    pub lowpass_slope_tol: f64,
    pub cross_refinement_tol: f64,
}

impl Default for KernelSweepConfig {
    fn default() -> Self {
        KernelSweepConfig {
            alpha: 4.0,
            beta: 2.0,
            ells: vec![0.5, 0.25, 0.125],
            n_large: 4_194_304.0,
            n_sweep_ell: 0.5,
            n_sweep_n_ell: vec![50.0, 100.0, 200.0],
            neumann_points: 1024,
            lattice_side: 32,
            lattice_samples: 100,
            series_tol: 1e-14,
            eta_slope_tol: 0.2,
            nu_slope_tol: 0.2,
            remainder_margin: 0.3,
            cross_margin: 0.5,
            grad_stability_tol: 0.2,
            lowpass_l1_tol: 1e-8,
            lowpass_slope_tol: 0.05,
            cross_refinement_tol: 0.2,
        }
    }
}

/// All kernel quantities at one `(ℓ, N)`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelRow {
    pub ell: f64,
    pub n: f64,
    /// `sup_p p²|Ĝ(p)|`
    pub sup_p2_g: f64,
    pub eta: NormReport,
    pub nu: NuNormReport,
    pub hyperbolic: HyperbolicNorms,
    pub cross: CrossGradient,
}

fn kernels_at(
    v: &InteractionPotential,
    state: &GpState,
    ell: f64,
    n: f64,
    cfg: &KernelSweepConfig,
) -> Result<(FactorizedKernel, FactorizedKernel, f64)> {
    let sol = solve_neumann(v, ell, n, cfg.neumann_points)?;
    let g = build_g(&sol);
    let cut = CutoffPair::new(ell, cfg.alpha, cfg.beta)?;
    Ok((
        build_eta_h(&g, state, cut),
        build_nu_h(&g, state, cut),
        g.sup_p2,
    ))
}

pub fn kernel_row(
    v: &InteractionPotential,
    state: &GpState,
    ell: f64,
    n: f64,
    cfg: &KernelSweepConfig,
) -> Result<KernelRow> {
    let (eta_k, nu_k, sup_p2_g) = kernels_at(v, state, ell, n, cfg)?;
    let eta = eta_norms(&eta_k)?;
    let nu = nu_norms(&nu_k)?;
    let hk = hyperbolic_with(&eta_k, &eta, cfg.series_tol)?;
    Ok(KernelRow {
        ell,
        n,
        sup_p2_g,
        eta,
        nu,
        hyperbolic: hyperbolic_norms(&hk),
        cross: cross_gradient_with(&eta_k, &eta),
    })
}

/// Norms of `η_H` at fixed `ℓ` for each `N`.
pub fn n_sweep(
    v: &InteractionPotential,
    state: &GpState,
    ell: f64,
    ns: &[f64],
    cfg: &KernelSweepConfig,
) -> Result<Vec<NormReport>> {
    ns.par_iter()
        .map(|&n| {
            let (eta_k, _, _) = kernels_at(v, state, ell, n, cfg)?;
            eta_norms(&eta_k)
        })
        .collect()
}

/// Spread of a series about its mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stability {
    pub values: Vec<f64>,
    pub mean: f64,
    /// `max |v/mean − 1|`
    pub max_deviation: f64,
    pub max_over_min: f64,
    pub pass: bool,
}

impl Stability {
    pub fn new(values: Vec<f64>, tol: f64) -> Self {
        let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        let (dev, ratio) = if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (
                values
                    .iter()
                    .map(|v| (v / mean - 1.0).abs())
                    .fold(0.0, f64::max),
                hi / lo,
            )
        };
        Stability {
            values,
            mean,
            max_deviation: dev,
            max_over_min: ratio,
            pass: dev <= tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSweep {
    pub config: KernelSweepConfig,
    pub rows: Vec<KernelRow>,
    pub n_rows: Vec<NormReport>,
    pub lowpass: Vec<GaussianLowpass>,
    pub lowpass_l1_pass: bool,
    pub slopes: BTreeMap<String, SlopeFit>,
    pub grad_stability: Stability,
    pub cross_refinement_pass: bool,
    pub power_bounds: Vec<PowerBoundReport>,
    pub lattice_hyperbolic: LatticeHyperbolic,
    pub pass: bool,
}

/// Slope fit passing when the slope is at least `floor`.
fn at_least(series: &[(f64, f64)], floor: f64) -> Result<SlopeFit> {
    let mut f = fit_slope(series, floor, f64::INFINITY)?;
    f.pass = f.trivial || f.slope >= floor;
    Ok(f)
}

pub fn kernel_sweep(
    v: &InteractionPotential,
    state: &GpState,
    cfg: &KernelSweepConfig,
    seed: u64,
) -> Result<KernelSweep> {
    let rows: Vec<KernelRow> = cfg
        .ells
        .par_iter()
        .map(|&ell| kernel_row(v, state, ell, cfg.n_large, cfg))
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = cfg
        .n_sweep_n_ell
        .iter()
        .map(|x| x / cfg.n_sweep_ell)
        .collect();
    let n_rows = n_sweep(v, state, cfg.n_sweep_ell, &ns, cfg)?;
    let lowpass: Vec<GaussianLowpass> = cfg
        .ells
        .iter()
        .map(|&ell| build_gaussian_lowpass(ell, cfg.beta))
        .collect::<Result<_>>()?;
    let lowpass_l1_pass = lowpass
        .iter()
        .all(|g| (g.l1_norm - 1.0).abs() <= cfg.lowpass_l1_tol);

    let a = cfg.alpha;
    let series = |f: &dyn Fn(&KernelRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.ell, f(r))).collect()
    };
    let mut slopes = BTreeMap::new();
    slopes.insert(
        "eta".to_string(),
        fit_slope(&series(&|r| r.eta.eta), a / 2.0, cfg.eta_slope_tol)?,
    );
    slopes.insert(
        "nu".to_string(),
        fit_slope(&series(&|r| r.nu.nu), a / 2.0, cfg.nu_slope_tol)?,
    );
    slopes.insert(
        "p_eta".to_string(),
        at_least(&series(&|r| r.hyperbolic.p_bound), a - cfg.remainder_margin)?,
    );
    slopes.insert(
        "r_eta".to_string(),
        at_least(&series(&|r| r.hyperbolic.r_bound), a - cfg.remainder_margin)?,
    );
    slopes.insert(
        "p_eta_phase".to_string(),
        at_least(&series(&|r| r.hyperbolic.p_phase), a - cfg.remainder_margin)?,
    );
    slopes.insert(
        "r_eta_phase".to_string(),
        at_least(&series(&|r| r.hyperbolic.r_phase), a - cfg.remainder_margin)?,
    );
    slopes.insert(
        "p_eta_pointwise".to_string(),
        at_least(
            &series(&|r| r.hyperbolic.p_pointwise_bound),
            a - cfg.remainder_margin,
        )?,
    );
    slopes.insert(
        "lap_eta2".to_string(),
        at_least(
            &series(&|r| r.hyperbolic.lap_eta2_phase),
            a / 2.0 - cfg.eta_slope_tol,
        )?,
    );
    slopes.insert(
        "grad_eta2".to_string(),
        at_least(
            &series(&|r| r.hyperbolic.grad_eta2_phase),
            a / 2.0 - cfg.eta_slope_tol,
        )?,
    );
    slopes.insert(
        "lap_p".to_string(),
        at_least(
            &series(&|r| r.hyperbolic.lap_p_phase),
            a / 2.0 - cfg.eta_slope_tol,
        )?,
    );
    slopes.insert(
        "grad_p".to_string(),
        at_least(
            &series(&|r| r.hyperbolic.grad_p_phase),
            a / 2.0 - cfg.eta_slope_tol,
        )?,
    );
    slopes.insert(
        "cross_gradient".to_string(),
        at_least(&series(&|r| r.cross.value), a - cfg.cross_margin)?,
    );
    let lp: Vec<(f64, f64)> = lowpass.iter().map(|g| (g.ell, g.l2_norm)).collect();
    slopes.insert(
        "lowpass_l2".to_string(),
        fit_slope(&lp, -1.5 * cfg.beta, cfg.lowpass_slope_tol)?,
    );

    let grad_stability = Stability::new(
        n_rows.iter().map(|r| r.grad_over_sqrt_n).collect(),
        cfg.grad_stability_tol,
    );
    let cross_refinement_pass = rows
        .iter()
        .all(|r| r.cross.refinement_change <= cfg.cross_refinement_tol);

    let n_ref = ns[ns.len() / 2];
    let (eta_ref, _, _) = kernels_at(v, state, cfg.n_sweep_ell, n_ref, cfg)?;
    let spec = LatticeSpec::for_cutoff(cfg.lattice_side, eta_ref.threshold());
    let power_bounds = [2, 3]
        .iter()
        .map(|&n| eta_power_bound(&eta_ref, n, spec, cfg.lattice_samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let hk = hyperbolic_with(&eta_ref, &eta_norms(&eta_ref)?, cfg.series_tol)?;
    let lat_h = lattice_hyperbolic(&hk, spec, cfg.lattice_samples, seed)?;

    let pass = lowpass_l1_pass
        && slopes.values().all(|s| s.pass)
        && grad_stability.pass
        && cross_refinement_pass
        && power_bounds.iter().all(|p| p.holds)
        && lat_h.certified_holds;
    Ok(KernelSweep {
        config: cfg.clone(),
        rows,
        n_rows,
        lowpass,
        lowpass_l1_pass,
        slopes,
        grad_stability,
        cross_refinement_pass,
        power_bounds,
        lattice_hyperbolic: lat_h,
        pass,
    })
}
