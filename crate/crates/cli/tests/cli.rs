use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn randpivot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randpivot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SPD4: &str = "%%MatrixMarket matrix array real symmetric\n4 4\n4\n1\n0.5\n0.2\n3\n0.9\n0.1\n2\n0.7\n5\n";

fn summary(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn diagonal_input_needs_no_iterations() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "d.mtx", "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2\n2 2 5\n3 3 1\n");
    let json = dir.path().join("s.json");
    let out = randpivot(&["factor", &input, "--summary", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&json);
    assert_eq!(s["iters_used"], 0);
    assert_eq!(s["converged"], true);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.mtx", SPD4);
    let run = |tag: &str| -> Vec<Vec<u8>> {
        let names = ["trace.csv", "q.mtx", "t.mtx", "s.json"].map(|n| dir.path().join(format!("{tag}-{n}")));
        let out = randpivot(&[
            "factor",
            &input,
            "--kind",
            "ldl",
            "--seed",
            "7",
            "--cadence",
            "1",
            "--trace",
            names[0].to_str().unwrap(),
            "--out-q",
            names[1].to_str().unwrap(),
            "--out-t",
            names[2].to_str().unwrap(),
            "--summary",
            names[3].to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        names.iter().map(|p| fs::read(p).unwrap()).collect()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.mtx", SPD4);
    let json = dir.path().join("s.json");
    let out = randpivot(&["factor", &input, "--max-iters", "1", "--summary", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let s = summary(&json);
    assert_eq!(s["converged"], false);
    assert_eq!(s["iters_used"], 1);
}

#[test]
fn trace_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.mtx", SPD4);
    let out = randpivot(&["factor", &input, "--mode", "one-sided", "--kind", "qr", "--trace", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,pivot,gamma,off_hat,kappa_hat,residual"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[..2], ["0", ""]);
    assert!(first[2].parse::<f64>().unwrap() > 0.0);
    let second: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(second[0], "1");
    assert_eq!(second[1].split(';').count(), 2);
}

#[test]
fn factors_reconstruct_the_input() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.mtx", SPD4);
    let d = dir.path().join("d.mtx");
    let t = dir.path().join("t.mtx");
    let out = randpivot(&["factor", &input, "--out-q", d.to_str().unwrap(), "--out-t", t.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let read = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p).unwrap().lines().skip(2).map(|l| l.parse().unwrap()).collect()
    };
    let (d, t) = (read(&d), read(&t));
    let b = [4.0, 1.0, 0.5, 0.2, 1.0, 3.0, 0.9, 0.1, 0.5, 0.9, 2.0, 0.7, 0.2, 0.1, 0.7, 5.0];
    for i in 0..4 {
        for j in 0..4 {
            // (Tᵀ·diag(D)·T)_ij, column-major storage.
            let v: f64 = (0..4).map(|r| t[r + i * 4] * d[r + r * 4] * t[r + j * 4]).sum();
            assert!((v - b[i + j * 4]).abs() < 1e-8, "({i},{j}): {v}");
        }
    }
}

#[test]
fn parse_errors_exit_one_with_line() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\nx\n0\n1\n");
    let out = randpivot(&["factor", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(randpivot(&["factor"]).status.code(), Some(1));
    assert_eq!(randpivot(&["factor", "x.mtx", "--kind", "nope"]).status.code(), Some(1));
    assert_eq!(randpivot(&["factor", "/nonexistent.mtx"]).status.code(), Some(1));
    assert_eq!(randpivot(&["--help"]).status.code(), Some(0));
}

#[test]
fn asymmetric_input_is_rejected_in_two_sided_mode() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "a.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n0.5\n0\n1\n");
    assert_eq!(randpivot(&["factor", &input]).status.code(), Some(1));
    assert_eq!(randpivot(&["factor", &input, "--mode", "one-sided"]).status.code(), Some(0));
}

#[test]
fn lemma_suites_pass() {
    let out = randpivot(&["check", "--suite", "lemmas", "--cases", "200", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn studies_write_tables() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("conv.csv");
    let json = dir.path().join("s.json");
    let out = randpivot(&[
        "study", "--family", "haar", "--n", "8", "--d", "12", "--trials", "6", "--horizon", "60",
        "--sample-every", "20", "--kind", "qr,rule=gs2", "--out", table.to_str().unwrap(),
        "--summary", json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("t,mean_ratio,std_err,q10,median,q90,predicted\n"));
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(summary(&json)["config"]["mode"], "one-sided");

    let seq = dir.path().join("seq.csv");
    let out = randpivot(&[
        "study", "--family", "haar", "--n", "8", "--d", "12", "--trials", "6", "--horizon", "60",
        "--sample-every", "20", "--kind", "qr,rule=gs2", "--sequential", "--out", seq.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&table).unwrap(), fs::read(&seq).unwrap());

    let stab = dir.path().join("stab.csv");
    let out = randpivot(&[
        "study", "--study", "stability", "--family", "spd-kappahat", "--n", "6", "--kappa", "10",
        "--trials", "3", "--out", stab.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&stab).unwrap().lines().count(), 4);
}

#[test]
fn pivot_size_override() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.mtx", SPD4);
    let json = dir.path().join("s.json");
    let out = randpivot(&["factor", &input, "--k", "3", "--summary", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&json)["pivot"], "random:k=3");
    assert_eq!(randpivot(&["factor", &input, "--pivot", "row-cyclic", "--k", "3"]).status.code(), Some(1));
    assert_eq!(randpivot(&["factor", &input, "--k", "5"]).status.code(), Some(1));
}
