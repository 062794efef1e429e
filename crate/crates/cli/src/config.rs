//! Versioned JSON run configuration and its stage DAG.

use std::fmt;

use gpregime::gp::GpGrid;
use gpregime::kernels::KernelSweepConfig;
use gpregime::potentials::{GridSpec, PotentialSpec, TrapKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "gpregime-run/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Scatter,
    Gp,
    Kernels,
    Fock,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Scatter => "scatter",
            Stage::Gp => "gp",
            Stage::Kernels => "kernels",
            Stage::Fock => "fock",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub pipeline: Vec<Stage>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scatter: ScatterConfig,
    #[serde(default)]
    pub gp: GpConfig,
    #[serde(default)]
    pub kernels: KernelSweepConfig,
    #[serde(default)]
    pub fock: FockConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema: SCHEMA.into(),
            pipeline: vec![Stage::Scatter, Stage::Gp, Stage::Kernels, Stage::Fock],
            seed: 7,
            scatter: ScatterConfig::default(),
            gp: GpConfig::default(),
            kernels: KernelSweepConfig::default(),
            fock: FockConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatterConfig {
    pub potential: PotentialSpec,
    pub r_max: f64,
    pub n_pts: usize,
    pub ell: f64,
    /// Ball radii `Nℓ` of the Neumann sweep.
    pub n_ell: Vec<f64>,
    /// `Nℓ` at which `sup p²|ŵ|` is refined.
    pub refine_n_ell: f64,
    pub a0_rel_tol: f64,
    pub identity_rel_tol: f64,
    pub i_slope: f64,
    pub i_slope_tol: f64,
    pub ii_max_over_min: f64,
    pub iii_volume_factor: f64,
    pub iv_refine_tol: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        let mut potential = PotentialSpec::square_well(2.0, 1.0);
        potential.grid = GridSpec {
            n_pts: 256,
            r_max: None,
        };
        ScatterConfig {
            potential,
            r_max: 20.0,
            n_pts: 1024,
            ell: 0.5,
            n_ell: vec![25.0, 50.0, 100.0, 200.0, 400.0],
            refine_n_ell: 100.0,
            a0_rel_tol: 1e-6,
            identity_rel_tol: 1e-6,
            i_slope: -1.0,
            i_slope_tol: 0.15,
            ii_max_over_min: 3.0,
            iii_volume_factor: 5.0,
            iv_refine_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpConfig {
    pub trap: PotentialSpec,
    /// Overrides the scattering length from the scatter stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    pub grid: GpGrid,
    pub tol: f64,
    pub spectrum_k: usize,
    pub decay_rates: Vec<f64>,
    pub p_min: f64,
    pub p_max: f64,
    pub p_per_decade: usize,
    pub refine_tol: f64,
    pub oracle_energy_tol: f64,
    pub oracle_l2_tol: f64,
    pub eps_identity_tol: f64,
    pub lambda0_rel_tol: f64,
    pub overlap_tol: f64,
    pub oracle_gap: f64,
    pub oracle_gap_tol: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            trap: PotentialSpec::trap(TrapKind::Harmonic, 10.0),
            a0: None,
            grid: GpGrid::default(),
            tol: 1e-8,
            spectrum_k: 3,
            decay_rates: vec![1.0, 2.0, 4.0],
            p_min: 0.01,
            p_max: 20.0,
            p_per_decade: 10,
            refine_tol: 0.1,
            oracle_energy_tol: 1e-4,
            oracle_l2_tol: 1e-4,
            eps_identity_tol: 1e-10,
            lambda0_rel_tol: 1e-6,
            overlap_tol: 1e-8,
            oracle_gap: 4.0,
            oracle_gap_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockConfig {
    /// Modes of the growth and `d_η` sweeps.
    pub modes: usize,
    pub n_caps: Vec<usize>,
    /// `(M, N_cap)` pairs for the float-mode commutator and `U_N` checks.
    pub float_spaces: Vec<(usize, usize)>,
    /// `(M, N_cap)` pairs for the exact-mode checks (dim ≤ 200).
    pub exact_spaces: Vec<(usize, usize)>,
    /// `(M, N_cap)` pairs for the excitation-Hamiltonian identity.
    pub ln_spaces: Vec<(usize, usize)>,
    pub ln_trials: usize,
    pub eta_norm: f64,
    pub d_eta_norm: f64,
    pub nu_norm: f64,
    pub b_powers: Vec<i32>,
    pub a_powers: Vec<i32>,
    pub t_grid: Vec<f64>,
    pub d_eta_power: i32,
    pub bch_scale: f64,
    pub gp_coupling: f64,
    pub float_tol: f64,
    pub energy_tol: f64,
    pub unitarity_tol: f64,
    pub spectrum_tol: f64,
    pub growth_bound: f64,
    pub d_eta_bound: f64,
    pub bch_order_tol: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig {
            modes: 3,
            n_caps: vec![2, 3, 4, 5, 6],
            float_spaces: vec![(2, 3), (3, 4), (4, 4)],
            exact_spaces: vec![(1, 1), (2, 3), (3, 3), (2, 5)],
            ln_spaces: vec![(2, 3), (3, 3), (3, 4)],
            ln_trials: 20,
            eta_norm: 0.3,
            d_eta_norm: 0.2,
            nu_norm: 0.3,
            b_powers: vec![-2, -1, 1, 2],
            a_powers: vec![-1, 1, 2],
            t_grid: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            d_eta_power: 1,
            bch_scale: 0.1,
            gp_coupling: 0.2,
            float_tol: 1e-12,
            energy_tol: 1e-10,
            unitarity_tol: 1e-12,
            spectrum_tol: 1e-10,
            growth_bound: 10.0,
            d_eta_bound: 10.0,
            bch_order_tol: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: String,
    pub lemma_csv: String,
    /// Write per-stage CSV tables next to the report.
    pub tables: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            report: "report.json".into(),
            lemma_csv: "lemmas.csv".into(),
            tables: true,
        }
    }
}

/// Upstream stages whose outputs a stage consumes.
pub fn upstream(stage: Stage, cfg: &RunConfig) -> Vec<Stage> {
    match stage {
        Stage::Scatter | Stage::Fock => vec![],
        Stage::Gp if cfg.gp.a0.is_some() => vec![],
        Stage::Gp => vec![Stage::Scatter],
        Stage::Kernels => vec![Stage::Scatter, Stage::Gp],
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Schema tag, duplicate stages and DAG order.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        if self.pipeline.is_empty() {
            return Err(CliError::Config("pipeline is empty".into()));
        }
        for (i, &s) in self.pipeline.iter().enumerate() {
            if self.pipeline[..i].contains(&s) {
                return Err(CliError::Config(format!("stage `{s}` listed twice")));
            }
            for dep in upstream(s, self) {
                match self.pipeline.iter().position(|&x| x == dep) {
                    None => {
                        return Err(CliError::Config(format!(
                            "stage `{s}` needs upstream stage `{dep}`, which is missing from the pipeline"
                        )))
                    }
                    Some(j) if j > i => {
                        return Err(CliError::Config(format!("stage `{s}` runs before its upstream stage `{dep}`")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
