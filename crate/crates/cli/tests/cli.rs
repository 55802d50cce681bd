use std::process::{Command, Output};

fn picone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_picone"))
        .args(args)
        .env_remove("PICONE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_exit_codes() {
    let ok = picone(&["verify", "--ineq", "classic", "--p", "2.5", "--n", "100000"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["violations"], 0);

    let bad = picone(&["verify", "--ineq", "general", "--p", "1.3", "--q", "1.05", "--regime", "anti"]);
    assert_eq!(bad.status.code(), Some(1));
    let summary = json(&bad);
    assert!(summary["violations"].as_u64().unwrap() > 0);
    assert!(summary["min_slack"].as_f64().unwrap() < 0.0);
    assert!(summary["argmin"]["grad_u"].is_array());

    let member = picone(&["verify", "--ineq", "general", "--p", "2", "--q", "1.5"]);
    assert_eq!(member.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(picone(&["spectrum", "--r", "1.0"]).status.code(), Some(2));
    assert_eq!(picone(&["verify", "--ineq", "bogus", "--p", "2"]).status.code(), Some(2));
    assert_eq!(picone(&["verify", "--ineq", "bm", "--p", "2", "--q", "3"]).status.code(), Some(2));
    assert_eq!(picone(&["region", "counterexample", "--p", "2", "--q", "1.5"]).status.code(), Some(2));
    assert_eq!(picone(&["solve", "--p", "1.6", "--q", "2.2"]).status.code(), Some(2));
}

#[test]
fn region_commands() {
    let out = picone(&["region", "qtilde"]);
    let q: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((q - 1.051633991).abs() < 1e-3);

    let out = picone(&["region", "ptilde", "--q", "2"]);
    let p: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(p > 2.0 && p < 3.0);

    let out = picone(&["region", "counterexample", "--p", "3.2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["slack"].as_f64().unwrap() < 0.0);

    let out = picone(&["region", "gap", "--q", "1.03"]);
    assert!(json(&out)["gap"].is_array());
}

#[test]
fn region_grid_band_is_member() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = picone(&["region", "grid", "--pmax", "4", "--qmax", "3", "--res", "400", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["p", "q", "g_min", "s_argmin", "in_I", "suff_I", "suff_II"]
    );
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let p: f64 = rec[0].parse().unwrap();
        let q: f64 = rec[1].parse().unwrap();
        if p <= q {
            assert_eq!(&rec[4], "true", "p={p} q={q}");
        }
        rows += 1;
    }
    assert_eq!(rows, 400 * 400);
}

#[test]
fn spectrum_writes_eigendata_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_picone"))
        .args(["spectrum", "--r", "2", "--ball", "2"])
        .env("PICONE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let lambda = json(&out)["lambda1"].as_f64().unwrap();
    assert!((lambda - 5.783186).abs() < 1e-4);
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eigendata.json")).unwrap()).unwrap();
    assert_eq!(saved["lambda1"].as_f64(), Some(lambda));
    let profile = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(profile.starts_with("r,u,du\n"));
}

#[test]
fn solve_band_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let csv_path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_picone"))
            .args(["solve", "--p", "2.2", "--q", "1.6", "--ball", "2", "--mu-steps", "60"])
            .args(["--csv", csv_path.to_str().unwrap()])
            .env_remove("PICONE_OUT_DIR")
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(csv_path).unwrap())
    };
    let (json_a, csv_a) = run("1", "a.csv");
    let (json_b, csv_b) = run("3", "b.csv");
    assert_eq!(json_a, json_b);
    assert_eq!(csv_a, csv_b);

    let map: serde_json::Value = serde_json::from_slice(&json_a).unwrap();
    let l1q = map["lambda1_q"].as_f64().unwrap();
    let beta = map["beta_star"].as_f64().unwrap();
    let records = map["records"].as_array().unwrap();
    assert_eq!(records.len(), 60);
    let found: Vec<f64> = records
        .iter()
        .filter(|r| r["found"].as_bool().unwrap())
        .map(|r| r["mu"].as_f64().unwrap())
        .collect();
    assert!(!found.is_empty());
    assert!(found.iter().all(|&mu| mu > l1q && mu < beta));
}

#[test]
fn verify_is_byte_identical_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_picone"))
            .args(["verify", "--ineq", "bm", "--p", "3", "--q", "1.5", "--n", "20000", "--seed", "9"])
            .env_remove("PICONE_OUT_DIR")
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
