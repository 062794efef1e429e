use gpregime_cli::config::{RunConfig, Stage, SCHEMA};
use gpregime_cli::report::{LemmaReportBundle, Status, LEMMA_IDS};
use gpregime_cli::{run, CliError};

fn with_pipeline(p: &[Stage]) -> RunConfig {
    RunConfig {
        pipeline: p.to_vec(),
        ..RunConfig::default()
    }
}

#[test]
fn config_round_trip() {
    let cfg = RunConfig::default();
    let text = serde_json::to_string_pretty(&cfg).unwrap();
    let back = RunConfig::parse(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    assert_eq!(back.schema, SCHEMA);
}

#[test]
fn partial_config_takes_defaults() {
    let cfg = RunConfig::parse(&format!(
        r#"{{"schema":"{SCHEMA}","pipeline":["fock"],"seed":3}}"#
    ))
    .unwrap();
    assert_eq!(cfg.pipeline, [Stage::Fock]);
    assert_eq!(cfg.fock.n_caps, RunConfig::default().fock.n_caps);
}

#[test]
fn missing_upstream_names_the_gap() {
    let err = with_pipeline(&[Stage::Gp, Stage::Fock])
        .validate()
        .unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, CliError::Config(_)));
    assert!(msg.contains("`gp`") && msg.contains("`scatter`"), "{msg}");
    assert_eq!(err.exit_code(), 2);

    let err = with_pipeline(&[Stage::Scatter, Stage::Kernels])
        .validate()
        .unwrap_err();
    assert!(err.to_string().contains("`kernels`") && err.to_string().contains("`gp`"));
}

#[test]
fn gp_with_explicit_a0_needs_no_scatter() {
    let mut cfg = with_pipeline(&[Stage::Gp]);
    cfg.gp.a0 = Some(0.1);
    cfg.validate().unwrap();
}

#[test]
fn rejects_bad_configs() {
    for text in [
        r#"{"schema":"gpregime-run/0"}"#.to_string(),
        format!(r#"{{"schema":"{SCHEMA}","pipeline":[]}}"#),
        format!(r#"{{"schema":"{SCHEMA}","pipeline":["fock","fock"]}}"#),
        format!(r#"{{"schema":"{SCHEMA}","pipeline":["gp","scatter"]}}"#),
        format!(r#"{{"schema":"{SCHEMA}","colour":1}}"#),
    ] {
        let e = RunConfig::parse(&text).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{text}: {e}");
    }
}

#[test]
fn subset_pipeline_skips_the_rest() {
    let out = run(&with_pipeline(&[Stage::Fock]), None).unwrap();
    let b = &out.bundle;
    assert_eq!(b.entries.len(), LEMMA_IDS.len());
    for (id, stage, _) in LEMMA_IDS {
        assert_eq!(b.entries.iter().filter(|e| e.id == id).count(), 1);
        let want = if stage == Stage::Fock {
            Status::Pass
        } else {
            Status::Skipped
        };
        assert_eq!(b.entry(id).unwrap().status, want, "{id}");
    }
    assert!(b.pass);
}

#[test]
fn zero_potential_is_trivial() {
    let mut cfg = with_pipeline(&[Stage::Scatter, Stage::Gp, Stage::Kernels]);
    cfg.scatter.potential.parameters.insert("v0".into(), 0.0);
    let out = run(&cfg, None).unwrap();
    for e in &out.bundle.entries {
        if e.stage == Stage::Fock {
            continue;
        }
        assert_eq!(e.status, Status::Pass, "{}", e.id);
        if matches!(e.stage, Stage::Scatter | Stage::Kernels) {
            // ǧ_L does not involve V
            for (k, s) in e.slopes.iter().filter(|(k, _)| *k != "lowpass_l2") {
                assert!(s.trivial, "{}:{k}", e.id);
            }
        }
    }
    let s = out.scatter.unwrap();
    assert_eq!(s.zero.a0, 0.0);
    assert!(s
        .rows
        .iter()
        .all(|r| r.i_deviation == 0.0 && r.ii_scaled == 0.0 && r.iv_sup_p2 == 0.0));
    let k = out.kernels.unwrap();
    assert!(k
        .sweep
        .rows
        .iter()
        .all(|r| r.eta.eta == 0.0 && r.nu.nu == 0.0));
    assert_eq!(k.hn.l2, 0.0);
}

#[test]
fn artifacts_written_and_readable() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = with_pipeline(&[Stage::Scatter, Stage::Gp, Stage::Fock]);
    cfg.fock.n_caps = vec![2, 3];
    let out = run(&cfg, Some(dir.path())).unwrap();
    for f in [
        "report.json",
        "lemmas.csv",
        "potential.json",
        "scatter_sweep.csv",
        "gp.json",
        "gp_phi.csv",
        "fock.json",
        "fock_identities.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back: LemmaReportBundle = serde_json::from_str(&text).unwrap();
    assert_eq!(back.canonical_json(), out.bundle.canonical_json());
    let csv = std::fs::read_to_string(dir.path().join("lemmas.csv")).unwrap();
    assert_eq!(csv.lines().count(), LEMMA_IDS.len() + 1);
    let rows = std::fs::read_to_string(dir.path().join("scatter_sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), cfg.scatter.n_ell.len() + 1);
}

#[test]
fn same_seed_same_bytes() {
    let cfg = with_pipeline(&[Stage::Scatter, Stage::Fock]);
    let a = run(&cfg, None).unwrap().bundle.canonical_json();
    let b = run(&cfg, None).unwrap().bundle.canonical_json();
    assert_eq!(a, b);
}
