//! The four pipeline stages. Each returns its data plus its lemma entries.

use std::f64::consts::PI;
use std::sync::Arc;

use gpregime::fock::{self, CoefficientSet, FockSpace, IdentityReport, Surd};
use gpregime::gp::{self, DecayReport, GpState, SpectrumResult, TailSlope, VextBound};
use gpregime::kernels::{self, HnProfile, KernelSweep};
use gpregime::numerics::{decade_grid, fit_slope, simpson};
use gpregime::potentials::{
    validate, InteractionPotential, PotentialSpec, TrapKind, TrapPotential,
};
use gpregime::scattering::{self, LemmaReport, ScatteringSolution};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{FockConfig, GpConfig, ScatterConfig, Stage};
use crate::error::CliError;
use crate::report::LemmaEntry;

fn desc(id: &str) -> &'static str {
    crate::report::LEMMA_IDS
        .iter()
        .find(|e| e.0 == id)
        .map(|e| e.2)
        .unwrap_or("")
}

fn entry(id: &str, stage: Stage) -> LemmaEntry {
    LemmaEntry::new(id, stage, desc(id))
}

/// One row of the Neumann sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatterRow {
    pub ell: f64,
    pub n: f64,
    pub radius: f64,
    pub lambda_ell: f64,
    pub i_ratio: f64,
    pub i_deviation: f64,
    pub ii_scaled: f64,
    pub iii_w_decay: f64,
    pub iii_dw_decay: f64,
    pub iii_volume: f64,
    pub iii_volume_scaled: f64,
    pub iv_sup_p2: f64,
}

impl ScatterRow {
    pub fn new(ell: f64, n: f64, lambda_ell: f64, r: &LemmaReport) -> Self {
        ScatterRow {
            ell,
            n,
            radius: r.radius,
            lambda_ell,
            i_ratio: r.i_ratio,
            i_deviation: r.i_deviation,
            ii_scaled: r.ii_scaled,
            iii_w_decay: r.iii_w_decay,
            iii_dw_decay: r.iii_dw_decay,
            iii_volume: r.iii_volume,
            iii_volume_scaled: r.iii_volume_scaled,
            iv_sup_p2: r.iv_sup_p2,
        }
    }
}

pub struct ScatterOutput {
    pub spec: PotentialSpec,
    pub potential: InteractionPotential,
    pub zero: ScatteringSolution,
    pub rows: Vec<ScatterRow>,
    pub entries: Vec<LemmaEntry>,
}

/// Closed-form scattering length of a square well.
pub fn square_well_a0(spec: &PotentialSpec) -> Option<f64> {
    if spec.kind != "square_well" {
        return None;
    }
    let v0 = *spec.parameters.get("v0")?;
    let r = *spec.parameters.get("radius")?;
    if v0 == 0.0 {
        return Some(0.0);
    }
    let k = (v0 / 2.0).sqrt();
    Some(r - (k * r).tanh() / k)
}

fn max_over_min(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(0.0, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi == 0.0 {
        1.0
    } else {
        hi / lo
    }
}

pub fn run_scatter(cfg: &ScatterConfig) -> Result<ScatterOutput, CliError> {
    let st = CliError::stage;
    let v = cfg.potential.interaction().map_err(st("scatter"))?;
    let zero = scattering::solve_zero_energy(&v, cfg.r_max, cfg.n_pts).map_err(st("scatter"))?;
    let a0 = zero.a0;

    let mut e0 = entry("a0", Stage::Scatter);
    e0.quantity("a0", a0)
        .quantity("integral_vf", zero.integral_vf)
        .quantity("identity_defect", zero.identity_defect());
    e0.threshold("identity_rel_tol", cfg.identity_rel_tol)
        .threshold("a0_rel_tol", cfg.a0_rel_tol);
    e0.check("identity", zero.identity_defect() <= cfg.identity_rel_tol);
    if let Some(exact) = square_well_a0(&cfg.potential) {
        let dev = if exact == 0.0 {
            a0.abs()
        } else {
            ((a0 - exact) / exact).abs()
        };
        e0.quantity("a0_closed_form", exact)
            .quantity("a0_rel_deviation", dev);
        e0.check("closed_form", dev <= cfg.a0_rel_tol);
    }
    let val = validate(&v);
    e0.quantity("assumptions", &val);
    e0.check("assumptions", val.all_pass());

    let sols: Vec<_> = cfg
        .n_ell
        .par_iter()
        .map(|&nl| scattering::solve_neumann(&v, cfg.ell, nl / cfg.ell, cfg.n_pts))
        .collect::<Result<_, _>>()
        .map_err(st("scatter"))?;
    let reports: Vec<LemmaReport> = sols
        .par_iter()
        .map(|s| scattering::verify_lemma_scattering(s, &zero))
        .collect();
    let rows: Vec<ScatterRow> = sols
        .iter()
        .zip(&reports)
        .map(|(s, r)| ScatterRow::new(cfg.ell, s.n_param, s.lambda_ell, r))
        .collect();
    let radii: Vec<f64> = rows.iter().map(|r| r.radius).collect();

    let mut e1 = entry("3.0.i", Stage::Scatter);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.radius, r.i_deviation.abs()))
        .collect();
    e1.quantity("n_ell", &radii)
        .quantity("ratio", rows.iter().map(|r| r.i_ratio).collect::<Vec<_>>());
    e1.quantity(
        "deviation",
        rows.iter().map(|r| r.i_deviation).collect::<Vec<_>>(),
    );
    e1.threshold("slope", cfg.i_slope)
        .threshold("slope_tol", cfg.i_slope_tol);
    // a single-N run from the subcommand has nothing to fit
    if pts.len() >= 3 {
        e1.slope(
            "deviation",
            fit_slope(&pts, cfg.i_slope, cfg.i_slope_tol).map_err(st("scatter"))?,
        );
    }

    let mut e2 = entry("3.0.ii", Stage::Scatter);
    let ii: Vec<f64> = rows.iter().map(|r| r.ii_scaled).collect();
    let ratio = max_over_min(&ii);
    e2.quantity("n_ell", &radii)
        .quantity("scaled_defect", &ii)
        .quantity("max_over_min", ratio);
    e2.threshold("max_over_min", cfg.ii_max_over_min);
    e2.check("bounded", ratio.is_finite() && ratio < cfg.ii_max_over_min);

    let mut e3 = entry("3.0.iii", Stage::Scatter);
    e3.quantity("n_ell", &radii)
        .quantity(
            "w_decay",
            rows.iter().map(|r| r.iii_w_decay).collect::<Vec<_>>(),
        )
        .quantity(
            "dw_decay",
            rows.iter().map(|r| r.iii_dw_decay).collect::<Vec<_>>(),
        )
        .quantity(
            "volume",
            rows.iter().map(|r| r.iii_volume).collect::<Vec<_>>(),
        )
        .quantity(
            "volume_scaled",
            rows.iter().map(|r| r.iii_volume_scaled).collect::<Vec<_>>(),
        );
    e3.threshold("volume_factor", cfg.iii_volume_factor);
    e3.check(
        "volume",
        rows.iter()
            .all(|r| r.iii_volume_scaled <= cfg.iii_volume_factor),
    );
    e3.check(
        "decay_finite",
        rows.iter()
            .all(|r| r.iii_w_decay.is_finite() && r.iii_dw_decay.is_finite()),
    );

    let mut e4 = entry("3.0.iv", Stage::Scatter);
    let reference = scattering::solve_neumann(&v, cfg.ell, cfg.refine_n_ell / cfg.ell, cfg.n_pts)
        .map_err(st("scatter"))?;
    let hi = 100.0 / v.support_radius;
    let lo = 0.1 / reference.radius;
    let coarse =
        scattering::fourier_w(&reference, &decade_grid(lo, hi, 20)).map_err(st("scatter"))?;
    let fine =
        scattering::fourier_w(&reference, &decade_grid(lo, hi, 80)).map_err(st("scatter"))?;
    let change = if fine.sup_p2 == 0.0 {
        0.0
    } else {
        (coarse.sup_p2 - fine.sup_p2).abs() / fine.sup_p2
    };
    e4.quantity("n_ell", &radii).quantity(
        "sup_p2",
        rows.iter().map(|r| r.iv_sup_p2).collect::<Vec<_>>(),
    );
    e4.quantity("refine_n_ell", cfg.refine_n_ell)
        .quantity("sup_p2_coarse", coarse.sup_p2)
        .quantity("sup_p2_fine", fine.sup_p2)
        .quantity("refinement_change", change);
    e4.threshold("refine_tol", cfg.iv_refine_tol);
    e4.check("finite", rows.iter().all(|r| r.iv_sup_p2.is_finite()));
    e4.check("refinement_stable", change <= cfg.iv_refine_tol);

    Ok(ScatterOutput {
        spec: cfg.potential.clone(),
        potential: v,
        zero,
        rows,
        entries: vec![
            e0.finish(),
            e1.finish(),
            e2.finish(),
            e3.finish(),
            e4.finish(),
        ],
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicOracle {
    pub energy: f64,
    pub eps_gp: f64,
    pub l2_distance: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpSummary {
    pub a0: f64,
    pub energy: gp::Energy,
    pub eps_gp: f64,
    pub residual: f64,
    pub iterations: usize,
    pub spectrum: SpectrumResult,
    pub decay: Vec<DecayReport>,
    pub fourier_sup: f64,
    pub fourier_sup_fine: f64,
    pub fourier_tail: TailSlope,
    pub vext: VextBound,
    pub oracle: Option<HarmonicOracle>,
}

pub struct GpOutput {
    pub trap: TrapPotential,
    pub state: GpState,
    pub summary: GpSummary,
    pub entries: Vec<LemmaEntry>,
}

fn l4_norm4(s: &GpState) -> f64 {
    let g: Vec<f64> = s
        .grid
        .iter()
        .zip(&s.phi)
        .map(|(&r, &p)| p.powi(4) * r * r)
        .collect();
    4.0 * PI * simpson(&g, s.h())
}

fn harmonic_oracle(trap: &TrapPotential, cfg: &GpConfig) -> gpregime::Result<HarmonicOracle> {
    let s = gp::minimize_gp(trap, 0.0, cfg.grid, cfg.tol)?;
    let c = PI.powf(-0.75);
    let g: Vec<f64> = s
        .grid
        .iter()
        .zip(&s.phi)
        .map(|(&r, &p)| (p - c * (-r * r / 2.0).exp()).powi(2) * r * r)
        .collect();
    let sp = gp::hgp_spectrum(&s, trap, cfg.spectrum_k.max(2))?;
    Ok(HarmonicOracle {
        energy: s.energy.total,
        eps_gp: s.eps_gp,
        l2_distance: (4.0 * PI * simpson(&g, s.h())).sqrt(),
        gap: sp.gap,
    })
}

pub fn run_gp(cfg: &GpConfig, a0: f64) -> Result<GpOutput, CliError> {
    let st = CliError::stage;
    let trap = cfg.trap.trap_potential().map_err(st("gp"))?;
    let state = gp::minimize_gp(&trap, a0, cfg.grid, cfg.tol).map_err(st("gp"))?;
    let spectrum = gp::hgp_spectrum(&state, &trap, cfg.spectrum_k.max(2)).map_err(st("gp"))?;
    let decay: Vec<DecayReport> = cfg
        .decay_rates
        .iter()
        .map(|&nu| gp::verify_decay(&state, nu))
        .collect::<Result<_, _>>()
        .map_err(st("gp"))?;
    let coarse = gp::fourier_decay(&state, &decade_grid(cfg.p_min, cfg.p_max, cfg.p_per_decade))
        .map_err(st("gp"))?;
    let fine = gp::fourier_decay(
        &state,
        &decade_grid(cfg.p_min, cfg.p_max, 4 * cfg.p_per_decade),
    )
    .map_err(st("gp"))?;
    let tail = gp::fourier_tail_slope(
        &state,
        &decade_grid(cfg.p_min, cfg.p_max, 4 * cfg.p_per_decade),
        5.0,
    )
    .map_err(st("gp"))?;
    let vext = gp::vext_phi_bound(&state, &trap);
    let oracle = match trap.kind {
        TrapKind::Harmonic => Some(harmonic_oracle(&trap, cfg).map_err(st("gp"))?),
        TrapKind::Quartic => None,
    };

    let mut eg = entry("gp", Stage::Gp);
    let eps_defect = (state.eps_gp - state.energy.total - 4.0 * PI * a0 * l4_norm4(&state)).abs();
    eg.quantity("a0", a0)
        .quantity("energy", state.energy)
        .quantity("eps_gp", state.eps_gp)
        .quantity("residual", state.residual)
        .quantity("eps_identity_defect", eps_defect)
        .quantity("norm_defect", (state.norm2() - 1.0).abs());
    eg.threshold("tol", cfg.tol)
        .threshold("eps_identity_tol", cfg.eps_identity_tol);
    eg.check("residual", gp::el_residual(&state) <= cfg.tol);
    eg.check("eps_identity", eps_defect <= cfg.eps_identity_tol);
    eg.check("normalized", (state.norm2() - 1.0).abs() <= 1e-10);
    eg.check(
        "positive",
        state.phi[..state.phi.len() - 1].iter().all(|&p| p > 0.0),
    );
    let val = validate(&trap);
    eg.quantity("trap_assumptions", &val);
    eg.check("trap_assumptions", val.all_pass());
    if let Some(o) = &oracle {
        eg.quantity("oracle", o);
        eg.threshold("oracle_energy_tol", cfg.oracle_energy_tol)
            .threshold("oracle_l2_tol", cfg.oracle_l2_tol);
        eg.check(
            "oracle_energy",
            (o.energy - 3.0).abs() <= cfg.oracle_energy_tol,
        );
        eg.check("oracle_gaussian", o.l2_distance <= cfg.oracle_l2_tol);
    }

    let mut ea = entry("gap", Stage::Gp);
    let l0 = spectrum.eigenvalues[0];
    ea.quantity("eigenvalues", &spectrum.eigenvalues)
        .quantity("overlaps", &spectrum.overlaps)
        .quantity("gap", spectrum.gap);
    ea.threshold("lambda0_rel_tol", cfg.lambda0_rel_tol)
        .threshold("overlap_tol", cfg.overlap_tol);
    ea.check("lambda0", l0.abs() <= cfg.lambda0_rel_tol * spectrum.gap);
    ea.check("overlap", spectrum.overlaps[0] >= 1.0 - cfg.overlap_tol);
    ea.check("positive_gap", spectrum.gap > 0.0);
    if let Some(o) = &oracle {
        ea.quantity("oracle_gap", o.gap)
            .threshold("oracle_gap_tol", cfg.oracle_gap_tol);
        ea.check(
            "oracle_gap",
            (o.gap - cfg.oracle_gap).abs() <= cfg.oracle_gap_tol,
        );
    }

    let mut ed = entry("decay", Stage::Gp);
    let change = (coarse - fine).abs() / fine;
    ed.quantity("constants", &decay)
        .quantity("fourier_sup", coarse)
        .quantity("fourier_sup_fine", fine)
        .quantity("fourier_refinement_change", change)
        .quantity("fourier_tail", &tail)
        .quantity("vext", vext);
    ed.threshold("refine_tol", cfg.refine_tol);
    ed.check(
        "decay_constants",
        decay.iter().all(|d| {
            d.decays && d.c_phi.is_finite() && d.c_dphi.is_finite() && d.c_lap.is_finite()
        }),
    );
    ed.check("fourier_finite", coarse.is_finite() && fine.is_finite());
    ed.check("fourier_refinement", change <= cfg.refine_tol);
    ed.check(
        "vext_finite",
        vext.sup_vphi.is_finite() && vext.int_v2phi2.is_finite(),
    );

    let summary = GpSummary {
        a0,
        energy: state.energy,
        eps_gp: state.eps_gp,
        residual: state.residual,
        iterations: state.iterations,
        spectrum,
        decay,
        fourier_sup: coarse,
        fourier_sup_fine: fine,
        fourier_tail: tail,
        vext,
        oracle,
    };
    Ok(GpOutput {
        trap,
        state,
        summary,
        entries: vec![eg.finish(), ea.finish(), ed.finish()],
    })
}

/// One row of the kernel table.
#[derive(Debug, Clone, Serialize)]
pub struct KernelTableRow {
    pub ell: f64,
    pub n: f64,
    pub eta: f64,
    pub nu: f64,
    pub grad_over_sqrt_n: f64,
    pub sup_row_over_phi: f64,
    pub p_bound: f64,
    pub r_bound: f64,
    pub p_phase: f64,
    pub r_phase: f64,
    pub grad_eta2: f64,
    pub lap_eta2: f64,
    pub cross_gradient: f64,
}

pub fn kernel_table(sw: &KernelSweep) -> Vec<KernelTableRow> {
    sw.rows
        .iter()
        .map(|r| KernelTableRow {
            ell: r.ell,
            n: r.n,
            eta: r.eta.eta,
            nu: r.nu.nu,
            grad_over_sqrt_n: r.eta.grad_over_sqrt_n,
            sup_row_over_phi: r.eta.sup_row_over_phi,
            p_bound: r.hyperbolic.p_bound,
            r_bound: r.hyperbolic.r_bound,
            p_phase: r.hyperbolic.p_phase,
            r_phase: r.hyperbolic.r_phase,
            grad_eta2: r.hyperbolic.grad_eta2_phase,
            lap_eta2: r.hyperbolic.lap_eta2_phase,
            cross_gradient: r.cross.value,
        })
        .chain(sw.n_rows.iter().map(|r| KernelTableRow {
            ell: r.ell,
            n: r.n,
            eta: r.eta,
            nu: f64::NAN,
            grad_over_sqrt_n: r.grad_over_sqrt_n,
            sup_row_over_phi: r.sup_row_over_phi,
            p_bound: f64::NAN,
            r_bound: f64::NAN,
            p_phase: f64::NAN,
            r_phase: f64::NAN,
            grad_eta2: f64::NAN,
            lap_eta2: f64::NAN,
            cross_gradient: f64::NAN,
        }))
        .collect()
}

pub struct KernelsOutput {
    pub sweep: KernelSweep,
    pub hn: HnProfile,
    pub entries: Vec<LemmaEntry>,
}

pub fn run_kernels(
    cfg: &kernels::KernelSweepConfig,
    v: &InteractionPotential,
    state: &GpState,
    seed: u64,
) -> Result<KernelsOutput, CliError> {
    let st = CliError::stage;
    let sw = kernels::kernel_sweep(v, state, cfg, seed).map_err(st("kernels"))?;
    let mid = cfg.n_sweep_n_ell[cfg.n_sweep_n_ell.len() / 2];
    let sol = scattering::solve_neumann(
        v,
        cfg.n_sweep_ell,
        mid / cfg.n_sweep_ell,
        cfg.neumann_points,
    )
    .map_err(st("kernels"))?;
    let hn = kernels::build_hn(&sol, state);
    let ells: Vec<f64> = sw.rows.iter().map(|r| r.ell).collect();
    let col =
        |f: &dyn Fn(&kernels::KernelRow) -> f64| -> Vec<f64> { sw.rows.iter().map(f).collect() };
    let slope = |e: &mut LemmaEntry, k: &str| {
        if let Some(s) = sw.slopes.get(k) {
            e.slope(k, *s);
        }
    };

    let mut e22 = entry("2.2", Stage::Kernels);
    e22.quantity("ell", &ells)
        .quantity("n_large", cfg.n_large)
        .quantity("eta", col(&|r| r.eta.eta))
        .quantity("sup_row_over_phi", col(&|r| r.eta.sup_row_over_phi))
        .quantity("pointwise", col(&|r| r.eta.pointwise))
        .quantity("n_sweep", sw.n_rows.iter().map(|r| r.n).collect::<Vec<_>>())
        .quantity("grad_over_sqrt_n", &sw.grad_stability);
    e22.threshold("eta_slope_tol", cfg.eta_slope_tol)
        .threshold("grad_stability_tol", cfg.grad_stability_tol);
    slope(&mut e22, "eta");
    e22.check("grad_stability", sw.grad_stability.pass);

    let mut e24 = entry("2.4", Stage::Kernels);
    e24.quantity("ell", &ells)
        .quantity("nu", col(&|r| r.nu.nu))
        .quantity("sup_x", col(&|r| r.nu.sup_x))
        .quantity("sup_y_over_phi", col(&|r| r.nu.sup_y_over_phi))
        .quantity("lowpass", &sw.lowpass);
    e24.threshold("nu_slope_tol", cfg.nu_slope_tol)
        .threshold("lowpass_l1_tol", cfg.lowpass_l1_tol)
        .threshold("lowpass_slope_tol", cfg.lowpass_slope_tol);
    slope(&mut e24, "nu");
    slope(&mut e24, "lowpass_l2");
    e24.check("lowpass_l1", sw.lowpass_l1_pass);

    let mut ep = entry("bndpr", Stage::Kernels);
    ep.quantity("ell", &ells)
        .quantity("p_bound", col(&|r| r.hyperbolic.p_bound))
        .quantity("r_bound", col(&|r| r.hyperbolic.r_bound))
        .quantity("p_phase", col(&|r| r.hyperbolic.p_phase))
        .quantity("r_phase", col(&|r| r.hyperbolic.r_phase))
        .quantity(
            "p_pointwise_bound",
            col(&|r| r.hyperbolic.p_pointwise_bound),
        )
        .quantity("power_bounds", &sw.power_bounds)
        .quantity("lattice", sw.lattice_hyperbolic);
    ep.threshold("remainder_margin", cfg.remainder_margin);
    for k in [
        "p_eta",
        "r_eta",
        "p_eta_phase",
        "r_eta_phase",
        "p_eta_pointwise",
    ] {
        slope(&mut ep, k);
    }
    ep.check("power_bound", sw.power_bounds.iter().all(|p| p.holds));
    ep.check("lattice_certified", sw.lattice_hyperbolic.certified_holds);

    let mut e42 = entry("4.2", Stage::Kernels);
    e42.quantity("ell", &ells)
        .quantity("grad_eta2", col(&|r| r.hyperbolic.grad_eta2_phase))
        .quantity("lap_eta2", col(&|r| r.hyperbolic.lap_eta2_phase))
        .quantity("grad_p", col(&|r| r.hyperbolic.grad_p_phase))
        .quantity("lap_p", col(&|r| r.hyperbolic.lap_p_phase));
    for k in ["grad_eta2", "lap_eta2", "grad_p", "lap_p"] {
        slope(&mut e42, k);
    }

    let mut e43 = entry("4.3", Stage::Kernels);
    e43.quantity("ell", &ells).quantity(
        "cross",
        sw.rows.iter().map(|r| &r.cross).collect::<Vec<_>>(),
    );
    e43.threshold("cross_margin", cfg.cross_margin)
        .threshold("refinement_tol", cfg.cross_refinement_tol);
    slope(&mut e43, "cross_gradient");
    e43.check("refinement", sw.cross_refinement_pass);

    let mut eh = entry("hN", Stage::Kernels);
    eh.quantity("n", hn.n)
        .quantity("ell", hn.ell)
        .quantity("l2", hn.l2)
        .quantity("sup", hn.sup)
        .quantity("integral_vw", hn.integral_vw)
        .quantity("limit_distance", hn.limit_distance)
        .quantity("young_bound", hn.young_bound);
    eh.check("young", hn.young_holds);
    eh.check("finite", hn.l2.is_finite() && hn.limit_distance.is_finite());

    Ok(KernelsOutput {
        sweep: sw,
        hn,
        entries: vec![
            e22.finish(),
            e24.finish(),
            ep.finish(),
            e42.finish(),
            e43.finish(),
            eh.finish(),
        ],
    })
}

/// Fock-stage results, also used by the `fock` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct FockResults {
    pub identities: Vec<IdentityLine>,
    pub b_growth: Option<fock::GrowthTable>,
    pub a_growth: Option<fock::GrowthTable>,
    pub d_eta: Option<fock::DEtaTable>,
    pub bch: Option<fock::BchCheck>,
    pub energy: Vec<fock::EnergyIdentityReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityLine {
    pub suite: String,
    pub name: String,
    pub modes: usize,
    pub n_cap: usize,
    pub mode: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn lines(
    out: &mut Vec<IdentityLine>,
    suite: &str,
    rep: &IdentityReport,
    m: usize,
    n: usize,
    mode: &str,
    tol: f64,
) {
    for (name, &dev) in &rep.deviations {
        out.push(IdentityLine {
            suite: suite.into(),
            name: name.clone(),
            modes: m,
            n_cap: n,
            mode: mode.into(),
            max_deviation: dev,
            tolerance: tol,
            pass: dev <= tol,
        });
    }
}

fn space(m: usize, n: usize) -> Result<Arc<FockSpace>, CliError> {
    Ok(Arc::new(
        FockSpace::new(m, n).map_err(CliError::stage("fock"))?,
    ))
}

pub fn fock_ccr(cfg: &FockConfig, out: &mut Vec<IdentityLine>, seed: u64) -> Result<(), CliError> {
    for &(m, n) in &cfg.float_spaces {
        let s = space(m, n)?;
        let mut rep = fock::verify_ccr::<Complex64>(&s);
        rep.merge(&fock::verify_b_commutators::<Complex64>(&s));
        rep.merge(&fock::verify_contracted(&s, seed, 5));
        lines(out, "ccr", &rep, m, n, "float", cfg.float_tol);
    }
    for &(m, n) in &cfg.exact_spaces {
        let s = space(m, n)?;
        let mut rep = fock::verify_ccr::<Surd>(&s);
        rep.merge(&fock::verify_b_commutators::<Surd>(&s));
        lines(out, "ccr", &rep, m, n, "exact", 0.0);
    }
    Ok(())
}

pub fn fock_un(cfg: &FockConfig, out: &mut Vec<IdentityLine>) -> Result<(), CliError> {
    for &(m, n) in &cfg.float_spaces {
        let rep =
            fock::verify_un::<Complex64>(&space(m, n)?, 0).map_err(CliError::stage("fock"))?;
        lines(out, "un", &rep, m, n, "float", cfg.float_tol);
    }
    for &(m, n) in &cfg.exact_spaces {
        let rep = fock::verify_un::<Surd>(&space(m, n)?, 0).map_err(CliError::stage("fock"))?;
        lines(out, "un", &rep, m, n, "exact", 0.0);
    }
    Ok(())
}

pub fn fock_ln(cfg: &FockConfig, seed: u64, res: &mut FockResults) -> Result<(), CliError> {
    let st = CliError::stage;
    for &(m, n) in &cfg.ln_spaces {
        let coeff = CoefficientSet::random(m, seed, cfg.eta_norm, cfg.nu_norm);
        let rep = fock::verify_energy_identity(&coeff, &space(m, n)?, cfg.ln_trials, seed ^ 0x9e37)
            .map_err(st("fock"))?;
        let mut ir = IdentityReport::default();
        ir.record("energy identity", rep.max_energy_deviation);
        ir.record("U H U* = Γ(q) L Γ(q)", rep.operator_deviation);
        ir.record("vacuum energy", rep.vacuum_deviation);
        lines(
            &mut res.identities,
            "ln",
            &ir,
            m,
            n,
            "float",
            cfg.energy_tol,
        );
        res.energy.push(rep);
    }
    // GP-form linear term on GP-solved coefficients
    let m = cfg.modes;
    let n = cfg.ln_spaces.last().map(|x| x.1).unwrap_or(3);
    let (coeff, residual) =
        CoefficientSet::gp_solved(m, seed, cfg.gp_coupling).map_err(st("fock"))?;
    let s = space(m, n)?;
    let parts = fock::build_ln(&coeff, &s).map_err(st("fock"))?;
    let gp_form = fock::gp_form_linear(&coeff, &s, cfg.gp_coupling, &parts[1]);
    let mut ir = IdentityReport::default();
    ir.record("discrete GP residual", residual);
    ir.record(
        "L1 generic vs GP form",
        fock::deviation(&gp_form, &parts[1]),
    );
    lines(
        &mut res.identities,
        "ln",
        &ir,
        m,
        n,
        "float",
        cfg.energy_tol,
    );
    Ok(())
}

fn eta_of(cfg: &FockConfig, seed: u64, norm: f64) -> DMatrix<f64> {
    CoefficientSet::random(cfg.modes, seed, norm, 0.0).eta
}

pub fn fock_bgrowth(cfg: &FockConfig, seed: u64, res: &mut FockResults) -> Result<(), CliError> {
    let st = CliError::stage;
    let eta = eta_of(cfg, seed, cfg.eta_norm);
    let table = fock::verify_b_number_growth(&eta, &cfg.n_caps, &cfg.b_powers, cfg.growth_bound)
        .map_err(st("fock"))?;
    let zero = fock::verify_b_number_growth(
        &DMatrix::zeros(cfg.modes, cfg.modes),
        &cfg.n_caps,
        &cfg.b_powers,
        cfg.growth_bound,
    )
    .map_err(st("fock"))?;
    let mut ir = IdentityReport::default();
    ir.record(
        "eta = 0 ratio − 1",
        zero.entries
            .iter()
            .map(|e| (e.ratio - 1.0).abs())
            .fold(0.0, f64::max),
    );
    lines(
        &mut res.identities,
        "bgrowth",
        &ir,
        cfg.modes,
        *cfg.n_caps.last().unwrap_or(&2),
        "float",
        0.0,
    );
    let mut ir = IdentityReport::default();
    ir.record(
        "e^B unitarity",
        table
            .entries
            .iter()
            .map(|e| e.unitarity_defect)
            .fold(0.0, f64::max),
    );
    lines(
        &mut res.identities,
        "bgrowth",
        &ir,
        cfg.modes,
        *cfg.n_caps.last().unwrap_or(&2),
        "float",
        cfg.unitarity_tol,
    );
    // antisymmetry and spectrum invariance on the largest space
    let n = *cfg.n_caps.iter().max().unwrap_or(&2);
    let s = space(cfg.modes, n)?;
    let b = fock::build_b(&eta, &s).map_err(st("fock"))?;
    let h = fock::build_hn(
        &CoefficientSet::random(cfg.modes, seed, cfg.eta_norm, 0.0),
        &s,
    )
    .map_err(st("fock"))?;
    let conj = fock::conjugation_report(&b, &h).map_err(st("fock"))?;
    let mut ir = IdentityReport::default();
    ir.record("B + B†", conj.antisymmetry_defect);
    lines(
        &mut res.identities,
        "bgrowth",
        &ir,
        cfg.modes,
        n,
        "float",
        0.0,
    );
    let mut ir = IdentityReport::default();
    ir.record("spectrum shift under e^B", conj.spectrum_shift);
    ir.record("hermiticity of e^{-B} H e^B", conj.hermiticity_defect);
    lines(
        &mut res.identities,
        "bgrowth",
        &ir,
        cfg.modes,
        n,
        "float",
        cfg.spectrum_tol,
    );
    res.b_growth = Some(table);
    Ok(())
}

pub fn fock_agrowth(cfg: &FockConfig, seed: u64, res: &mut FockResults) -> Result<(), CliError> {
    let st = CliError::stage;
    let coeff = CoefficientSet::random(cfg.modes, seed, 0.0, cfg.nu_norm);
    let table = fock::verify_a_number_growth(
        &coeff.nu,
        &coeff.g,
        &cfg.n_caps,
        &cfg.a_powers,
        &cfg.t_grid,
        cfg.growth_bound,
    )
    .map_err(st("fock"))?;
    let n_top = *cfg.n_caps.iter().max().unwrap_or(&2);
    let t0 = table
        .entries
        .iter()
        .filter(|e| e.t == 0.0)
        .map(|e| (e.ratio - 1.0).abs())
        .fold(0.0, f64::max);
    let mut ir = IdentityReport::default();
    ir.record("t = 0 ratio − 1", t0);
    let s = space(cfg.modes, n_top)?;
    let a = fock::build_a(&coeff.nu, &coeff.g, &s).map_err(st("fock"))?;
    ir.record("A + A†", a.add(&a.adjoint()).max_abs());
    let zero =
        fock::build_a(&DMatrix::zeros(cfg.modes, cfg.modes), &coeff.g, &s).map_err(st("fock"))?;
    ir.record("nu = 0 gives A = 0", zero.max_abs());
    lines(
        &mut res.identities,
        "agrowth",
        &ir,
        cfg.modes,
        n_top,
        "float",
        0.0,
    );
    let mut ir = IdentityReport::default();
    ir.record(
        "e^{tA} unitarity",
        table
            .entries
            .iter()
            .map(|e| e.unitarity_defect)
            .fold(0.0, f64::max),
    );
    lines(
        &mut res.identities,
        "agrowth",
        &ir,
        cfg.modes,
        n_top,
        "float",
        cfg.unitarity_tol,
    );
    let mut ir = IdentityReport::default();
    let h = fock::build_hn(&CoefficientSet::random(cfg.modes, seed, 0.0, 0.0), &s)
        .map_err(st("fock"))?;
    let conj = fock::conjugation_report(&a, &h).map_err(st("fock"))?;
    ir.record("spectrum shift under e^A", conj.spectrum_shift);
    lines(
        &mut res.identities,
        "agrowth",
        &ir,
        cfg.modes,
        n_top,
        "float",
        cfg.spectrum_tol,
    );
    res.a_growth = Some(table);
    Ok(())
}

pub fn fock_deta(cfg: &FockConfig, seed: u64, res: &mut FockResults) -> Result<(), CliError> {
    let st = CliError::stage;
    let eta = eta_of(cfg, seed, cfg.d_eta_norm);
    let table = fock::d_eta_sweep(&eta, &cfg.n_caps, cfg.d_eta_power, cfg.d_eta_bound)
        .map_err(st("fock"))?;
    let zero = fock::d_eta_sweep(
        &DMatrix::zeros(cfg.modes, cfg.modes),
        &cfg.n_caps,
        cfg.d_eta_power,
        cfg.d_eta_bound,
    )
    .map_err(st("fock"))?;
    let n_top = *cfg.n_caps.iter().max().unwrap_or(&2);
    let mut ir = IdentityReport::default();
    ir.record(
        "eta = 0 gives d = 0",
        zero.entries.iter().map(|e| e.ratio).fold(0.0, f64::max),
    );
    lines(
        &mut res.identities,
        "deta",
        &ir,
        cfg.modes,
        n_top,
        "float",
        0.0,
    );
    let unit = eta_of(cfg, seed, 1.0);
    let bch = fock::bch_check(
        &unit,
        &space(
            cfg.modes,
            cfg.n_caps
                .iter()
                .copied()
                .filter(|&n| n <= 4)
                .max()
                .unwrap_or(n_top),
        )?,
        cfg.bch_scale,
    )
    .map_err(st("fock"))?;
    let mut ir = IdentityReport::default();
    ir.record("BCH remainder order − 3", (bch.order - 3.0).abs());
    lines(
        &mut res.identities,
        "deta",
        &ir,
        cfg.modes,
        n_top,
        "float",
        cfg.bch_order_tol,
    );
    res.d_eta = Some(table);
    res.bch = Some(bch);
    Ok(())
}

pub struct FockOutput {
    pub results: FockResults,
    pub entries: Vec<LemmaEntry>,
}

fn identity_entry(id: &str, suites: &[&str], res: &FockResults) -> LemmaEntry {
    let mut e = entry(id, Stage::Fock);
    let sel: Vec<&IdentityLine> = res
        .identities
        .iter()
        .filter(|l| suites.contains(&l.suite.as_str()))
        .collect();
    for l in &sel {
        let key = format!("{} [{}] M={} N={}", l.name, l.mode, l.modes, l.n_cap);
        e.quantity(&key, l.max_deviation);
        e.check(&key, l.pass);
    }
    e
}

pub fn run_fock(cfg: &FockConfig, seed: u64) -> Result<FockOutput, CliError> {
    let mut res = FockResults {
        identities: vec![],
        b_growth: None,
        a_growth: None,
        d_eta: None,
        bch: None,
        energy: vec![],
    };
    fock_ccr(cfg, &mut res.identities, seed)?;
    fock_un(cfg, &mut res.identities)?;
    fock_ln(cfg, seed, &mut res)?;
    fock_bgrowth(cfg, seed, &mut res)?;
    fock_agrowth(cfg, seed, &mut res)?;
    fock_deta(cfg, seed, &mut res)?;

    let mut ecomm = identity_entry("comm-b", &["ccr"], &res);
    ecomm.threshold("float_tol", cfg.float_tol);
    let mut eun = identity_entry("UNconjugation", &["un"], &res);
    eun.threshold("float_tol", cfg.float_tol);
    let mut eln = identity_entry("cLNj", &["ln"], &res);
    eln.threshold("energy_tol", cfg.energy_tol)
        .quantity("trials", cfg.ln_trials);

    let mut e23 = identity_entry("2.3", &["bgrowth"], &res);
    if let Some(t) = &res.b_growth {
        e23.quantity("table", t)
            .quantity("eta_norm", t.generator_norm);
        e23.threshold("growth_bound", t.bound);
        e23.check("bounded", t.bounded);
    }
    let mut e26 = identity_entry("2.6", &["agrowth"], &res);
    if let Some(t) = &res.a_growth {
        e26.quantity("table", t)
            .quantity("nu_norm", t.generator_norm);
        e26.threshold("growth_bound", t.bound);
        e26.check("bounded", t.bounded);
    }
    let mut ed = identity_entry("defd", &["deta"], &res);
    if let Some(t) = &res.d_eta {
        ed.quantity("table", t);
        ed.threshold("ratio_times_n_bound", t.bound);
        ed.check("ratio_times_n_bounded", t.bounded);
    }
    if let Some(b) = &res.bch {
        ed.quantity("bch", b);
    }
    let entries = vec![
        ecomm.finish(),
        eun.finish(),
        eln.finish(),
        e23.finish(),
        e26.finish(),
        ed.finish(),
    ];
    Ok(FockOutput {
        results: res,
        entries,
    })
}
