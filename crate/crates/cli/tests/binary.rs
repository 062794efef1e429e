use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gpregime"))
}

#[test]
fn fock_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fock.json");
    let st = bin()
        .args([
            "fock",
            "--modes",
            "2",
            "--ncap",
            "3",
            "--suite",
            "ccr,un,ln",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["results"]["identities"].as_array().unwrap().len() > 10);
}

#[test]
fn scatter_gp_kernels_chain() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f);
    let st = bin()
        .args(["scatter", "--ell", "0.5", "--n", "200", "--out"])
        .arg(p("s.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p("s.json")).unwrap()).unwrap();
    assert!((s["a0"].as_f64().unwrap() - (1.0 - 1f64.tanh())).abs() < 1e-8);
    for k in ["i", "ii", "iii", "iv"] {
        assert!(s["lemma30"][k].is_object());
    }
    let st = bin()
        .args(["gp", "--a0", "0.2384", "--out"])
        .arg(p("gp.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(p("gp.phi.csv").is_file());
    let st = bin()
        .args([
            "--format",
            "csv",
            "kernels",
            "--sweep",
            "ell=0.5,0.25,0.125",
            "--scatter",
        ])
        .arg(p("s.json"))
        .arg("--gp")
        .arg(p("gp.json"))
        .arg("--out")
        .arg(p("k.csv"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(std::fs::read_to_string(p("k.csv"))
        .unwrap()
        .starts_with("ell,n,eta"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"schema":"gpregime-run/1","pipeline":["kernels"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing from the pipeline"));
}

#[test]
fn failing_lemma_exits_1() {
    // an impossible float tolerance makes comm-b fail without any error
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"schema":"gpregime-run/1","pipeline":["fock"],"fock":{"float_spaces":[[2,2]],"exact_spaces":[],"ln_spaces":[[2,2]],"n_caps":[2,3],"float_tol":-1.0}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["--format", "csv", "run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("comm-b,fock,fail"));
}
