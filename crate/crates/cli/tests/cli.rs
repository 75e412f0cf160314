use std::path::Path;
use std::process::{Command, Output};

fn endonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endonet")).args(args).output().expect("binary runs")
}

fn text(out: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn fig4a_run_exports_forty_node_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = endonet(&["model2-run", "--preset", "fig4a", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("master seed: 1"));
    assert!(stdout.contains("artifact-chosen parameters"));
    let dot = read(&dir.path().join("model2_final.dot"));
    let nodes = dot.lines().filter(|l| l.contains("[fitness=")).count();
    assert_eq!(nodes, 40);
    assert!(dot.starts_with("// endonet"));
    assert!(dot.contains("// master_seed: 1"));
    assert!(dir.path().join("model2_final.edges").exists());
    assert!(dir.path().join("model2_periods.csv").exists());
}

#[test]
fn table2_sweep_average_fit_is_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = endonet(&[
        "model1-sweep",
        "--preset",
        "table2",
        "--replications",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out));
    let mut reader = csv::Reader::from_path(dir.path().join("model1_aggregate.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        if &rec[col("metric")] == "average_fit" {
            let mean: f64 = rec[col("mean")].parse().unwrap();
            assert!((mean - 1.0).abs() < 0.05, "{} mean {mean}", &rec[col("grid")]);
            assert_eq!(&rec[col("replications")], "50");
            rows += 1;
        }
    }
    assert_eq!(rows, 8);
    let records = read(&dir.path().join("model1_records.csv"));
    assert_eq!(records.lines().count(), 1 + 8 * 50);
}

#[test]
fn unknown_subcommand_exits_with_usage_code() {
    let out = endonet(&["model3-run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_alpha_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = endonet(&[
        "model2-run",
        "--preset",
        "fig4a",
        "--set",
        "alpha=1.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).contains("alpha ∈ (0,1)"));
    assert!(!dir.path().join("model2_final.dot").exists());
}

#[test]
fn config_errors_report_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[model2]\nn = 30\nepsilon = = 2\n").unwrap();
    let out = endonet(&["model2-run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).contains("bad.toml:3:"), "{}", text(&out));

    std::fs::write(&cfg, "[model1]\nn = 30\n").unwrap();
    let out = endonet(&["model2-run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        "[model2]\nn = 20\nperiods = 30\nreplications = 4\n\n[sweep]\naxes = { epsilon = [0.3, 1.0] }\n",
    )
    .unwrap();
    let run = |sub: &str, jobs: &str| {
        let out_dir = dir.path().join(format!("{sub}-{jobs}"));
        let out = endonet(&[
            "model2-sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "77",
            "--jobs",
            jobs,
            "--format",
            "json",
            "--no-timestamp",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", text(&out));
        (read(&out_dir.join("model2_aggregate.json")), read(&out_dir.join("model2_records.json")))
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert_eq!(a, b);
    assert!(a.0.contains("\"master_seed\": 77"));
}

#[test]
fn model1_run_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m1.toml");
    std::fs::write(&cfg, "[model1]\nn = 50\nshocks = 25\nperiods = 4\np = 1.0\nreward = 0.05\nseed = 3\n").unwrap();
    let out = endonet(&["model1-run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out));
    // 1 + 2·25·4·0.05/50
    assert!(String::from_utf8_lossy(&out.stdout).contains("average fit 1.2000"));
    let traj = read(&dir.path().join("model1_trajectory.csv"));
    assert_eq!(traj.lines().count(), 1 + 5);
    assert!(traj.lines().next().unwrap().ends_with("master_seed,config"));
}

#[test]
fn export_graph_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = endonet(&[
        "export-graph",
        "--preset",
        "fig4c",
        "--initial",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out));
    let edges = read(&dir.path().join("graph.edges"));
    // m0 = 3, m = 2 on 40 nodes
    assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 3 + 2 * 37);
    assert!(edges.contains("# n 40"));
}

#[test]
fn presets_are_listed_with_chosen_parameters() {
    let out = endonet(&["presets"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["table1", "table2", "fig3-alpha09", "fig3-alpha099", "fig4a", "fig4b", "fig4c", "fig4d"] {
        assert!(stdout.contains(name), "missing {name}");
    }
    assert!(stdout.contains("periods = 20"));
}

#[test]
fn strict_sum_flag_is_model2_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = endonet(&["model1-run", "--preset", "table1", "--strict-eq4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
