use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gbs_dks::graph::density;
use gbs_dks::harness::load_graph;

fn gbs_dks(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbs-dks"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_then_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbs_dks(&["gen", "--n", "24", "--rho", "0.4", "--seed", "7", "--out", "g.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let g = load_graph(dir.path().join("g.json")).unwrap();
    assert_eq!(g.n(), 24);
    let rho = density(&g).unwrap();
    assert!((0.25..=0.47).contains(&rho), "{rho}");

    let o = gbs_dks(&["greedy", "--graph", "g.json", "--k", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let d: f64 = stdout(&o).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&d));
}

#[test]
fn planted_clique_is_found_by_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let o = gbs_dks(&["gen", "--n", "20", "--rho", "0.2", "--seed", "3", "--clique", "6", "--out", "g.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = gbs_dks(&["greedy", "--graph", "g.json", "--k", "6"], dir.path());
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn embed_reports_squeezing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("k3.json"), r#"{"n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}"#).unwrap();
    let o = gbs_dks(&["embed", "--graph", "k3.json", "--c", "0.25"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# bound=0.5 c=0.25\nmode,t,tanh_r\n"), "{text}");
    // K3 has eigenvalues 2, -1, -1
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect();
    let expected = [0.5, 0.25, 0.25];
    for (row, t) in rows.iter().zip(expected) {
        assert!((row[0] - t).abs() < 1e-12 && (row[1] - t).abs() < 1e-8, "{row:?}");
    }
    let o = gbs_dks(&["embed", "--graph", "k3.json", "--c", "0.6"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dist_writes_normalised_csv() {
    let dir = tempfile::tempdir().unwrap();
    gbs_dks(&["gen", "--n", "8", "--rho", "0.5", "--seed", "2", "--out", "g.json"], dir.path());
    let o = gbs_dks(
        &["dist", "--graph", "g.json", "--k", "3", "--loss", "0.2", "--purity", "2,1,0.8", "--out", "d.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# c="));
    assert_eq!(lines.next(), Some("pattern,probability"));
    let probs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(probs.len(), 56);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-8);
}

#[test]
fn run_writes_trajectories_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"kind": "fig1", "graph": {"n": 10, "rho": 0.5, "seed": 1}, "k": 3, "steps": 3,
            "iterations": 2, "loss": [0.0, 0.5], "master_seed": 4, "out": "res.csv"}"#,
    )
    .unwrap();
    let o = gbs_dks(&["run", "--config", "c.json", "--workers", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("res.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    for series in ["uniform,", "gbs,"] {
        let per_noise = if series == "gbs," { 2 } else { 1 };
        assert_eq!(rows.iter().filter(|r| r.starts_with(series)).count(), 2 * 3 * per_noise);
    }
    assert_eq!(rows.iter().filter(|r| r.starts_with("greedy,")).count(), 3);
    assert!(dir.path().join("res.summary.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gbs_dks(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(gbs_dks(&["gen", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(gbs_dks(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(gbs_dks(&["greedy", "--graph", "missing.json", "--k", "2"], dir.path()).status.code(), Some(1));

    fs::write(dir.path().join("bad.json"), r#"{"kind": "fig1", "graph": {"n": 80, "rho": 0.3}, "k": 4, "loss": [0]}"#).unwrap();
    let o = gbs_dks(&["run", "--config", "bad.json", "--out", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.csv").exists());

    // an empty 3-click subspace is a runtime failure
    fs::write(dir.path().join("e.json"), r#"{"n": 4, "edges": [[0, 1]]}"#).unwrap();
    fs::write(
        dir.path().join("r.json"),
        r#"{"kind": "fig1", "graph": {"path": "e.json"}, "k": 3, "loss": [0.0], "out": "r.csv"}"#,
    )
    .unwrap();
    let o = gbs_dks(&["run", "--config", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}
