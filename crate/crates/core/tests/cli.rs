use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str], dir: &Path) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_signclust"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn signclust");
    assert!(
        out.status.success(),
        "signclust {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const SMALL: &[&str] = &["--n", "120", "--k", "3", "--p", "0.15", "--eta", "0.05", "--seed", "9", "--trials", "2"];

#[test]
fn generate_then_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        &["generate", "--n", "90", "--k", "3", "--p", "0.2", "--eta", "0", "--seed", "1", "-o", "g.txt", "--labels", "truth.csv"],
        d,
    );
    let out = run(
        &["cluster", "-i", "g.txt", "--k", "3", "--truth", "truth.csv", "-o", "labels.csv", "--summary", "s.json"],
        d,
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ARI 1.0000"), "{stderr}");
    let labels = fs::read_to_string(d.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 91);
    assert!(labels.starts_with("node,label\n"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert_eq!(summary["method"], "SPONGE_sym");
}

#[test]
fn nodes_outside_component_get_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.txt"), "# n 6\n0 1 1\n1 2 1\n2 3 -1\n3 0 -1\n0 2 1\n1 3 -1\n4 5 1\n").unwrap();
    run(&["cluster", "-i", "g.txt", "--k", "2", "--method", "Lbar_sym", "-o", "l.csv"], d);
    let text = fs::read_to_string(d.join("l.csv")).unwrap();
    assert!(text.contains("\n4,-1\n") && text.ends_with("5,-1\n"), "{text}");
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), "0 0 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_signclust"))
        .args(["cluster", "-i", "g.txt", "--k", "2"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"n": 100, "k": 2, "p": 0.2, "eta": 0.0, "trials": 2, "methods": ["SPONGE_sym", "A"]}"#,
    )
    .unwrap();
    run(&["compare", "--config", "cfg.json", "--eta", "0.05", "-o", "out"], d);
    let rec: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("out/compare.json")).unwrap()).unwrap();
    assert_eq!(rec["config"]["n"], 100);
    assert_eq!(rec["config"]["eta"], 0.05);
    let csv = fs::read_to_string(d.join("out/compare.csv")).unwrap();
    assert!(csv.starts_with("method,rho,mean_ari,std_ari,trials\n"));
    assert_eq!(csv.lines().count(), 3);
}

/// Each experiment subcommand twice with the same seed, compared byte for byte.
#[test]
fn reruns_are_byte_identical() {
    let cases: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (
            [&["grid-tau"], SMALL, &["--tau-plus-grid", "0.1,1", "--tau-minus-grid", "0,1"]].concat(),
            vec!["grid_tau.csv", "grid_tau.json", "grid_tau.svg"],
        ),
        (
            [&["grid-gamma"], SMALL, &["--gamma-plus-grid", "0,5", "--gamma-minus-grid", "0,5", "--methods", "Lbar_sym_reg"]]
                .concat(),
            vec!["grid_gamma.csv", "grid_gamma.json"],
        ),
        (
            [&["rho-curve"], SMALL, &["--rhos", "0.5,1", "--methods", "SPONGE_sym,BNC"]].concat(),
            vec!["rho_curve.csv", "rho_curve.json", "rho_curve.svg"],
        ),
        ([&["compare"], SMALL].concat(), vec!["compare.csv", "compare.json"]),
    ];
    for (args, files) in cases {
        let mut outputs = Vec::new();
        for run_id in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut full = args.clone();
            full.extend(["-o", "out"]);
            run(&full, dir.path());
            outputs.push(
                files
                    .iter()
                    .map(|f| fs::read(dir.path().join("out").join(f)).unwrap_or_else(|_| panic!("{f} missing in run {run_id}")))
                    .collect::<Vec<_>>(),
            );
        }
        assert_eq!(outputs[0], outputs[1], "{:?} differs between runs", args[0]);
    }

    let mut gen = Vec::new();
    let mut theory = Vec::new();
    let mut cluster = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        run(&["generate", "--n", "150", "--k", "3", "--p", "0.1", "--eta", "0.1", "--rho", "0.5", "--seed", "4", "-o", "g.txt"], d);
        gen.push(fs::read(d.join("g.txt")).unwrap());
        run(&["cluster", "-i", "g.txt", "--k", "3", "--seed", "2", "-o", "l.csv", "--summary", "s.json"], d);
        cluster.push((fs::read(d.join("l.csv")).unwrap(), fs::read(d.join("s.json")).unwrap()));
        theory.push(run(&["theory-check", "--n", "60", "--k", "3", "--p", "0.3", "--eta", "0.1"], d).stdout);
    }
    assert_eq!(gen[0], gen[1]);
    assert_eq!(cluster[0], cluster[1]);
    assert_eq!(theory[0], theory[1]);
}
