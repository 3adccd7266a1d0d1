use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ngd(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ngd")).arg("--out").arg(out).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const EXAMPLE_CYCLE: &str =
    "n=10\n0\t1\t1\n1\t2\t1\n2\t3\t1\n3\t4\t1\n4\t5\t1\n5\t6\t1\n6\t7\t1\n7\t8\t1\n8\t9\t1\n0\t9\t10\n";

#[test]
fn unweighted_cycle_is_compatible() {
    let tmp = tempfile::tempdir().unwrap();
    let edges: String = (0..10).map(|i| format!("{}\t{}\t1\n", i.min((i + 1) % 10), i.max((i + 1) % 10))).collect();
    let base = write(tmp.path(), "base.tsv", &edges);
    let o = ngd(&tmp.path().join("out"), &["check-compat", &base, "--against", "fractional", "--alpha", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("compatible"));
    assert!(tmp.path().join("out/report.json").exists());
    assert!(tmp.path().join("out/manifest.json").exists());
}

#[test]
fn weighted_cycle_is_incompatible_with_witnesses() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", EXAMPLE_CYCLE);
    let out = tmp.path().join("out");
    let o = ngd(&out, &["check-compat", &base, "--against", "fractional", "--alpha", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("incompatible"));
    assert!(text.contains("witness node=0"));
    let csv = fs::read_to_string(out.join("witnesses.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn regularized_then_checked_is_exactly_compatible() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", EXAMPLE_CYCLE);
    let reg = tmp.path().join("reg");
    let o = ngd(&reg, &["regularize", &base, "--alpha", "0.5", "--beta", "auto"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("beta="));
    let sup = reg.join("graph.tsv").to_string_lossy().into_owned();
    let o = ngd(&tmp.path().join("chk"), &["check-compat", &base, "--super", &sup, "--tolerance", "1e-9"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("compatible"));
    assert!(text.contains("worst_ratio_deviation=0.0000000000000000e0"));
}

#[test]
fn matrix_market_input_and_path_kernel() {
    let tmp = tempfile::tempdir().unwrap();
    let mtx =
        write(tmp.path(), "c4.mtx", "%%MatrixMarket matrix coordinate pattern symmetric\n4 4 4\n2 1\n3 2\n4 3\n4 1\n");
    let out = tmp.path().join("out");
    let o = ngd(&out, &["path", &mtx, "--kernel", "mellin", "--alpha", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let weights = fs::read_to_string(out.join("weights.csv")).unwrap();
    let row: Vec<f64> = weights.lines().next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(row, vec![0.0, 1.0, 0.25, 1.0]);
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", EXAMPLE_CYCLE);
    let out = tmp.path().join("out");
    for args in [
        vec!["fractional", base.as_str(), "--alpha", "1.5"],
        vec!["check-compat", base.as_str()],
        vec!["analyze", base.as_str()],
        vec!["regularize", base.as_str()],
        vec!["check-compat", base.as_str(), "--against", "path", "--alpha", "1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(ngd(&out, &args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validation_errors_exit_one_with_structured_message() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("loop.tsv", "0 0 1\n", "SelfLoop"),
        ("split.tsv", "0 1 1\n2 3 1\n", "Disconnected"),
        ("dup.tsv", "0 1 1\n1 0 1\n", "DuplicateEdge"),
        ("bad.tsv", "0 1 one\n", "ParseError"),
        ("neg.tsv", "0 1 -2\n", "NegativeWeight"),
    ];
    for (name, text, kind) in cases {
        let file = write(tmp.path(), name, text);
        let o = ngd(&out, &["laplacian", &file]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        let err = stderr_json(&o);
        assert_eq!(err["error"], kind, "{name}: {err}");
        assert!(err["message"].as_str().unwrap().contains(name));
    }
    let missing = tmp.path().join("missing.tsv").to_string_lossy().into_owned();
    assert_eq!(ngd(&out, &["laplacian", &missing]).status.code(), Some(1));
}

#[test]
fn csv_values_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", "0 1 1\n1 2 1\n2 3 1\n");
    let out = tmp.path().join("out");
    assert!(ngd(&out, &["laplacian", &base]).status.success());
    let csv = fs::read_to_string(out.join("normalized_laplacian.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows[1], vec![-0.5, 1.0, -0.5, 0.0]);
    assert_eq!(rows[3], vec![0.0, 0.0, -1.0, 1.0]);
}

#[test]
fn walk_is_thread_count_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", EXAMPLE_CYCLE);
    let mut hists = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(format!("w{threads}"));
        let o = Command::new(env!("CARGO_BIN_EXE_ngd"))
            .env("NGD_THREADS", threads)
            .arg("--out")
            .arg(&out)
            .args(["walk", &base, "--walks", "500", "--steps", "15", "--seed", "9", "--trajectories"])
            .output()
            .unwrap();
        assert!(o.status.success());
        hists.push((fs::read(out.join("visits.csv")).unwrap(), fs::read(out.join("trajectories.csv")).unwrap()));
    }
    assert_eq!(hists[0], hists[1]);
}

#[test]
fn replay_detects_changed_input() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write(tmp.path(), "base.tsv", EXAMPLE_CYCLE);
    let out = tmp.path().join("out");
    assert!(ngd(&out, &["analyze", &base, "--stationary", "--trapping"]).status.success());
    let again = ngd(&tmp.path().join("again"), &["replay", out.join("manifest.json").to_str().unwrap()]);
    assert!(again.status.success());
    assert!(stdout(&again).contains("reproduced 2 outputs"));

    fs::write(&base, EXAMPLE_CYCLE.replace("\t10\n", "\t9\n")).unwrap();
    let o = ngd(&tmp.path().join("third"), &["replay", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "InputChanged");
}

#[test]
fn manifest_records_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = ngd(&out, &["generate", "ba", "--n", "40", "--theta", "0.2", "--seed", "17", "--format", "mtx"]);
    assert!(o.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["operation"], "generate");
    assert_eq!(manifest["seed"], 17);
    assert_eq!(manifest["outputs"][0]["file"], "graph.mtx");
    assert_eq!(manifest["command"]["family"]["theta"], 0.2);

    let mtx = out.join("graph.mtx").to_string_lossy().into_owned();
    let o = ngd(&tmp.path().join("frac"), &["fractional", &mtx, "--alpha", "0.4"]);
    assert!(o.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("frac/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["alpha"], 0.4);
    assert_eq!(manifest["kernel"], "fractional");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
}
