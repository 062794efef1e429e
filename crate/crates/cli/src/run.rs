//! Pipeline execution and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::config::{RunConfig, Stage};
use crate::error::CliError;
use crate::report::{summary_csv, to_csv, LemmaReportBundle};
use crate::stages::{self, FockOutput, GpOutput, KernelsOutput, ScatterOutput};

/// Everything a run produced, for callers that want more than the bundle.
pub struct RunOutput {
    pub bundle: LemmaReportBundle,
    pub scatter: Option<ScatterOutput>,
    pub gp: Option<GpOutput>,
    pub kernels: Option<KernelsOutput>,
    pub fock: Option<FockOutput>,
    /// Wall time per stage; kept out of the report so it stays deterministic.
    pub timings: Vec<(Stage, Duration)>,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct PhiRow {
    r: f64,
    phi: f64,
}

pub fn phi_csv(state: &gpregime::gp::GpState) -> String {
    let rows: Vec<PhiRow> = state
        .grid
        .iter()
        .zip(&state.phi)
        .map(|(&r, &phi)| PhiRow { r, phi })
        .collect();
    to_csv(&rows)
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("artifact serializes");
    s.push('\n');
    s
}

pub fn write(path: &Path, text: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))?;
    written.push(path.to_path_buf());
    Ok(())
}

pub fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Run the configured stages in order. With `out_dir` set, artifacts are
/// written there.
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunOutput, CliError> {
    config.validate()?;
    let mut out = RunOutput {
        bundle: LemmaReportBundle::assemble(config.seed, vec![], vec![]),
        scatter: None,
        gp: None,
        kernels: None,
        fock: None,
        timings: vec![],
        written: vec![],
    };
    let mut entries = Vec::new();
    for &stage in &config.pipeline {
        let t0 = Instant::now();
        match stage {
            Stage::Scatter => {
                let s = stages::run_scatter(&config.scatter)?;
                entries.extend(s.entries.iter().cloned());
                out.scatter = Some(s);
            }
            Stage::Gp => {
                let a0 = match (config.gp.a0, &out.scatter) {
                    (Some(a), _) => a,
                    (None, Some(s)) => s.zero.a0,
                    (None, None) => unreachable!("validated DAG"),
                };
                let g = stages::run_gp(&config.gp, a0)?;
                entries.extend(g.entries.iter().cloned());
                out.gp = Some(g);
            }
            Stage::Kernels => {
                let (Some(s), Some(g)) = (&out.scatter, &out.gp) else {
                    unreachable!("validated DAG")
                };
                let k = stages::run_kernels(&config.kernels, &s.potential, &g.state, config.seed)?;
                entries.extend(k.entries.iter().cloned());
                out.kernels = Some(k);
            }
            Stage::Fock => {
                let f = stages::run_fock(&config.fock, config.seed)?;
                entries.extend(f.entries.iter().cloned());
                out.fock = Some(f);
            }
        }
        out.timings.push((stage, t0.elapsed()));
    }
    out.bundle = LemmaReportBundle::assemble(config.seed, config.pipeline.clone(), entries);
    if let Some(dir) = out_dir {
        let mut written = Vec::new();
        write_artifacts(config, &out, dir, &mut written)?;
        out.written = written;
    }
    Ok(out)
}

fn write_artifacts(
    config: &RunConfig,
    out: &RunOutput,
    dir: &Path,
    w: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let o = &config.output;
    write(&dir.join(&o.report), &to_json(&out.bundle), w)?;
    write(&dir.join(&o.lemma_csv), &summary_csv(&out.bundle), w)?;
    if o.tables {
        if let Some(s) = &out.scatter {
            write(&dir.join("potential.json"), &to_json(&s.spec), w)?;
            write(&dir.join("scatter_sweep.csv"), &to_csv(&s.rows), w)?;
        }
        if let Some(g) = &out.gp {
            write(&dir.join("gp.json"), &to_json(&g.summary), w)?;
            write(&dir.join("gp_phi.csv"), &phi_csv(&g.state), w)?;
        }
        if let Some(k) = &out.kernels {
            write(
                &dir.join("kernels.csv"),
                &to_csv(&stages::kernel_table(&k.sweep)),
                w,
            )?;
            write(
                &dir.join("kernel_slopes.json"),
                &to_json(&k.sweep.slopes),
                w,
            )?;
        }
        if let Some(f) = &out.fock {
            write(&dir.join("fock.json"), &to_json(&f.results), w)?;
            write(
                &dir.join("fock_identities.csv"),
                &to_csv(&f.results.identities),
                w,
            )?;
        }
    }
    Ok(())
}
