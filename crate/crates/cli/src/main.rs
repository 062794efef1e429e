use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gpregime::kernels::KernelSweepConfig;
use gpregime::potentials::PotentialSpec;
use gpregime_cli::config::{FockConfig, GpConfig, RunConfig, ScatterConfig};
use gpregime_cli::report::{to_csv, LemmaEntry, Status};
use gpregime_cli::run::{io_err, phi_csv, to_json, write};
use gpregime_cli::stages::{self, FockResults};
use gpregime_cli::CliError;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "gpregime",
    version,
    about = "Numerical checks for the Gross-Pitaevskii regime"
)]
struct Cli {
    /// Output format of the primary artifact.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Zero-energy and Neumann scattering with the Lemma 3.0 report.
    Scatter {
        /// Potential spec JSON; defaults to the square well V0 = 2, R = 1.
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        ell: f64,
        /// N values, comma separated. Defaults to Nℓ ∈ {25, 50, 100, 200, 400}.
        #[arg(long, value_delimiter = ',')]
        n: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GP minimizer, spectrum of h_GP and decay constants.
    Gp {
        /// Trap spec JSON; defaults to the harmonic trap.
        #[arg(long)]
        trap: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel norm sweep from a scatter report and a GP report.
    Kernels {
        #[arg(long)]
        scatter: PathBuf,
        #[arg(long)]
        gp: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// `ell=0.5,0.25,0.125`
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated Fock space identities and growth bounds.
    Fock {
        #[arg(long, default_value_t = 3)]
        modes: usize,
        /// Largest N_cap; growth sweeps run over 2..=ncap.
        #[arg(long, default_value_t = 4)]
        ncap: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ccr,un,ln,bgrowth,agrowth,deta"
        )]
        suite: Vec<Suite>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline from a config file.
    Run {
        /// Run config JSON; defaults to the built-in configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the default run config.
    Config {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Ccr,
    Un,
    Ln,
    Bgrowth,
    Agrowth,
    Deta,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text, &mut Vec::new()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn all_pass(entries: &[LemmaEntry]) -> bool {
    entries.iter().all(|e| e.status != Status::Fail)
}

/// What `gp` writes and `kernels` reads back: the solve is re-run from
/// the inputs, which is deterministic.
#[derive(Serialize, Deserialize)]
struct GpArtifact {
    trap: PotentialSpec,
    a0: f64,
    tol: f64,
    grid: gpregime::gp::GpGrid,
    #[serde(default)]
    summary: Option<serde_json::Value>,
    #[serde(default)]
    entries: Option<serde_json::Value>,
}

fn cmd_scatter(
    fmt: Format,
    potential: Option<PathBuf>,
    ell: f64,
    n: Vec<f64>,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let mut cfg = ScatterConfig::default();
    if let Some(p) = potential {
        cfg.potential = read_json(&p)?;
    }
    cfg.ell = ell;
    if !n.is_empty() {
        cfg.n_ell = n.iter().map(|n| n * ell).collect();
    }
    let s = stages::run_scatter(&cfg)?;
    let text = match fmt {
        Format::Csv => to_csv(&s.rows),
        Format::Json => to_json(&json!({
            "a0": s.zero.a0,
            "potential": s.spec,
            "lambda_ell": s.rows.iter().map(|r| r.lambda_ell).collect::<Vec<_>>(),
            "lemma30": {
                "i": s.entries[1], "ii": s.entries[2], "iii": s.entries[3], "iv": s.entries[4],
            },
            "a0_entry": s.entries[0],
            "grids": {"r_max": cfg.r_max, "n_pts": cfg.n_pts, "ell": ell,
                      "n": s.rows.iter().map(|r| r.n).collect::<Vec<_>>()},
            "rows": s.rows,
        })),
    };
    emit(out.as_deref(), &text)?;
    Ok(all_pass(&s.entries))
}

fn cmd_gp(
    fmt: Format,
    trap: Option<PathBuf>,
    a0: f64,
    tol: f64,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let mut cfg = GpConfig::default();
    if let Some(p) = trap {
        cfg.trap = read_json(&p)?;
    }
    cfg.tol = tol;
    let g = stages::run_gp(&cfg, a0)?;
    let text = match fmt {
        Format::Csv => phi_csv(&g.state),
        Format::Json => {
            if let Some(p) = &out {
                // φ samples go next to the JSON
                write(
                    &p.with_extension("phi.csv"),
                    &phi_csv(&g.state),
                    &mut Vec::new(),
                )?;
            }
            to_json(&GpArtifact {
                trap: cfg.trap.clone(),
                a0,
                tol,
                grid: cfg.grid,
                summary: Some(serde_json::to_value(&g.summary).expect("serializes")),
                entries: Some(serde_json::to_value(&g.entries).expect("serializes")),
            })
        }
    };
    emit(out.as_deref(), &text)?;
    Ok(all_pass(&g.entries))
}

fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let v = s
        .strip_prefix("ell=")
        .ok_or_else(|| CliError::Config(format!("--sweep expects ell=..., got {s:?}")))?;
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("--sweep value {x:?}: {e}")))
        })
        .collect()
}

#[derive(Deserialize)]
struct ScatterArtifact {
    potential: PotentialSpec,
}

#[allow(clippy::too_many_arguments)]
fn cmd_kernels(
    fmt: Format,
    scatter: PathBuf,
    gp: PathBuf,
    alpha: f64,
    beta: f64,
    sweep: Option<String>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let sa: ScatterArtifact = read_json(&scatter)?;
    let ga: GpArtifact = read_json(&gp)?;
    let v = sa
        .potential
        .interaction()
        .map_err(CliError::stage("scatter"))?;
    let trap = ga.trap.trap_potential().map_err(CliError::stage("gp"))?;
    let state =
        gpregime::gp::minimize_gp(&trap, ga.a0, ga.grid, ga.tol).map_err(CliError::stage("gp"))?;
    let mut cfg = KernelSweepConfig {
        alpha,
        beta,
        ..Default::default()
    };
    if let Some(s) = sweep {
        cfg.ells = parse_sweep(&s)?;
    }
    let k = stages::run_kernels(&cfg, &v, &state, seed)?;
    let text = match fmt {
        Format::Csv => to_csv(&stages::kernel_table(&k.sweep)),
        Format::Json => to_json(&json!({
            "alpha": alpha, "beta": beta, "ells": cfg.ells,
            "slopes": k.sweep.slopes,
            "entries": k.entries,
            "table": stages::kernel_table(&k.sweep),
        })),
    };
    emit(out.as_deref(), &text)?;
    Ok(all_pass(&k.entries))
}

fn cmd_fock(
    fmt: Format,
    modes: usize,
    ncap: usize,
    seed: u64,
    suite: Vec<Suite>,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let n_caps: Vec<usize> = (2..=ncap.max(2)).collect();
    let cfg = FockConfig {
        modes,
        n_caps: n_caps.clone(),
        float_spaces: vec![(modes, ncap)],
        exact_spaces: vec![(modes, ncap)],
        ln_spaces: vec![(modes, ncap)],
        ..Default::default()
    };
    let mut res = FockResults {
        identities: vec![],
        b_growth: None,
        a_growth: None,
        d_eta: None,
        bch: None,
        energy: vec![],
    };
    for s in &suite {
        match s {
            Suite::Ccr => stages::fock_ccr(&cfg, &mut res.identities, seed)?,
            Suite::Un => stages::fock_un(&cfg, &mut res.identities)?,
            Suite::Ln => stages::fock_ln(&cfg, seed, &mut res)?,
            Suite::Bgrowth => stages::fock_bgrowth(&cfg, seed, &mut res)?,
            Suite::Agrowth => stages::fock_agrowth(&cfg, seed, &mut res)?,
            Suite::Deta => stages::fock_deta(&cfg, seed, &mut res)?,
        }
    }
    let pass = res.identities.iter().all(|l| l.pass)
        && res.b_growth.as_ref().is_none_or(|t| t.bounded)
        && res.a_growth.as_ref().is_none_or(|t| t.bounded)
        && res.d_eta.as_ref().is_none_or(|t| t.bounded);
    let text = match fmt {
        Format::Csv => to_csv(&res.identities),
        Format::Json => to_json(
            &json!({"modes": modes, "ncap": ncap, "seed": seed, "pass": pass, "results": res}),
        ),
    };
    emit(out.as_deref(), &text)?;
    Ok(pass)
}

fn cmd_run(fmt: Format, config: Option<PathBuf>, out: PathBuf) -> Result<bool, CliError> {
    let cfg = match config {
        Some(p) => RunConfig::parse(&read(&p)?)?,
        None => RunConfig::default(),
    };
    let r = gpregime_cli::run(&cfg, Some(&out))?;
    match fmt {
        Format::Json => print!("{}", to_json(&r.bundle)),
        Format::Csv => print!("{}", gpregime_cli::report::summary_csv(&r.bundle)),
    }
    Ok(r.bundle.pass)
}

fn threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("GPREGIME_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("GPREGIME_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fmt = cli.format;
    let result = threads().and_then(|_| match cli.cmd {
        Cmd::Scatter {
            potential,
            ell,
            n,
            out,
        } => cmd_scatter(fmt, potential, ell, n, out),
        Cmd::Gp { trap, a0, tol, out } => cmd_gp(fmt, trap, a0, tol, out),
        Cmd::Kernels {
            scatter,
            gp,
            alpha,
            beta,
            sweep,
            seed,
            out,
        } => cmd_kernels(fmt, scatter, gp, alpha, beta, sweep, seed, out),
        Cmd::Fock {
            modes,
            ncap,
            seed,
            suite,
            out,
        } => cmd_fock(fmt, modes, ncap, seed, suite, out),
        Cmd::Run { config, out } => cmd_run(fmt, config, out),
        Cmd::Config { out } => emit(out.as_deref(), &to_json(&RunConfig::default())).map(|_| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gpregime: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
