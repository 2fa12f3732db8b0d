use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contagionlab"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_infect() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let rounds = dir.path().join("r.csv");
    let summary = dir.path().join("s.json");
    run(&["generate", "--model", "PA_INDEPENDENT", "--n", "300", "--m", "3", "--p", "0.5", "--seed", "4", "--out", path(&g)]);
    run(&[
        "infect", path(&g), "--k", "2", "--seeds", "oldest:3", "--multiplicity",
        "--out", path(&rounds), "--summary", path(&summary),
    ]);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    let infected = s["infected_count"].as_u64().unwrap() as usize;
    let csv = fs::read_to_string(&rounds).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("node,round"));
    let rows: Vec<(usize, usize)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), infected);
    assert_eq!(rows.iter().filter(|r| r.1 == 0).count(), 3);
    assert_eq!(rows.iter().map(|r| r.1).max().unwrap() as u64, s["rounds_to_fixation"].as_u64().unwrap());

    // the pruned process never infects more
    let pruned = run(&["infect", path(&g), "--k", "2", "--seeds", "oldest:3", "--multiplicity", "--pruned"]);
    let pruned_rows = String::from_utf8(pruned.stdout).unwrap().lines().count() - 1;
    assert!(pruned_rows <= infected);
}

#[test]
fn generation_is_reproducible() {
    let a = run(&["generate", "--model", "CM_CONDITIONED", "--n", "100", "--m", "2", "--p", "0.3", "--seed", "9"]);
    let b = run(&["generate", "--model", "CM_CONDITIONED", "--n", "100", "--m", "2", "--p", "0.3", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_seed_spec_is_rejected() {
    let out = bin().args(["infect", "missing.txt", "--k", "2", "--seeds", "some"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("oldest:<c>"));
}

#[test]
fn branch_profile_starts_at_the_root() {
    let out = run(&["branch", "--m", "2", "--alpha", "0.9", "--x", "3", "--depth", "4", "--runs", "50"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "depth,mean_phi,survivor_fraction");
    assert_eq!(rows.len(), 6);
    assert!(rows[1].starts_with("0,") && rows[1].ends_with(",1"));
}

#[test]
fn analyze_tables() {
    let eta = run(&["analyze", "eta", "--p", "0.5", "--m", "3", "--x-max", "50"]);
    let text = String::from_utf8(eta.stdout).unwrap();
    let total: f64 = text.lines().skip(1).map(|l| l.split_once(',').unwrap().1.parse::<f64>().unwrap()).sum();
    assert!(total > 0.9 && total <= 1.0 + 1e-9);

    let bound = run(&["analyze", "bootstrap-bound", "--p", "0.5", "--m", "3", "--k", "2", "--s", "10", "--n", "1000"]);
    let v: serde_json::Value = serde_json::from_slice(&bound.stdout).unwrap();
    assert!(v["bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn mcv_check_reports_each_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    let bad = dir.path().join("bad.txt");
    fs::write(&good, "gate 0 0 ONE\ngate 1 0 ZERO\ngate 2 1 OR 0 1\noutput 2\n").unwrap();
    fs::write(&bad, "gate 0 0 ONE\ngate 1 1 NOT 0 0\noutput 1\n").unwrap();

    let ok = run(&["mcv", "check", path(&good), "--k", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["detail"]["circuit_value"], true);

    let out = bin().args(["mcv", "check", path(&good), path(&bad)]).output().unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["verdict"], "ERROR");
    assert!(lines[1]["error"].as_str().unwrap().contains("NOT"));
}

#[test]
fn experiment_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"kind": "BRANCH_EXTINCTION", "m": 2, "alpha": 0.9, "x": 3, "zero_label_xs": [2],
            "replications": 20, "base_seed": 3}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let seq = dir.path().join("seq");
    run(&["experiment", "--config", path(&cfg), "--out", path(&out)]);
    run(&["experiment", "--config", path(&cfg), "--out", path(&seq), "--sequential"]);
    assert!(out.join("records.csv").exists());
    assert_eq!(fs::read(out.join("summary.json")).unwrap(), fs::read(seq.join("summary.json")).unwrap());
}

#[test]
fn thread_variable_is_validated() {
    let out = bin()
        .env("CONTAGIONLAB_THREADS", "many")
        .args(["analyze", "eta", "--p", "0.5", "--m", "2", "--x-max", "5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("CONTAGIONLAB_THREADS"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            let cfg = contagionlab::experiments::ExperimentConfig::load(&p)
                .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            cfg.validate().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 7);
}
