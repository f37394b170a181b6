use std::path::Path;
use std::process::{Command, Output};

fn mocorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mocorr"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mocorr(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn param<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("# {key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn capacity_at_240_deg_per_second() {
    let rows = table(&ok(&["analyze", "capacity", "--speed", "240"]));
    assert_eq!(rows[0][0], "speed_deg_s");
    let r = &rows[1];
    assert_eq!(r[1], "45");
    assert_eq!(r[2], "7");
    assert!((r[3].parse::<f64>().unwrap() - 0.156).abs() < 5e-4);
    assert!((r[4].parse::<f64>().unwrap() - 2.81).abs() < 5e-3);
    assert_eq!(r[5], "14");
}

#[test]
fn square_window_sweep_minimum() {
    let text = ok(&[
        "analyze",
        "window-sweep",
        "--shape",
        "square",
        "--n",
        "120",
        "--min",
        "20",
        "--max",
        "60",
    ]);
    let argmin: usize = param(&text, "argmin").parse().unwrap();
    assert!((35..=45).contains(&argmin), "argmin {argmin}");
    assert_eq!(table(&text).len(), 1 + 41);
}

fn write_fixtures(dir: &Path) {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    for (i, phase) in ["0", "120", "240"].iter().enumerate() {
        ok(&[
            "gen-circle",
            "--n",
            "60",
            "--phase",
            phase,
            "--out",
            &p(&format!("t{}.csv", i + 1)),
        ]);
    }
    ok(&[
        "distort",
        "--input",
        &p("t2.csv"),
        "--seed",
        "3",
        "--noise",
        "0.05",
        "--out",
        &p("u.csv"),
    ]);
}

#[test]
fn simulate_over_files_selects_the_followed_target() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let text = ok(&[
        "simulate",
        "--input",
        &p("u.csv"),
        "--targets",
        &p("t1.csv"),
        &p("t2.csv"),
        &p("t3.csv"),
        "--model",
        "logistic",
        "--window",
        "20",
        "--hop",
        "5",
    ]);
    let rows = table(&text);
    assert_eq!(rows[0].len(), 1 + 3 + 4 + 2);
    assert_eq!(rows[0][9], "decision");
    assert_eq!(rows.len(), 1 + 9);
    for r in &rows[1..] {
        let probs: f64 = r[4..8].iter().map(|v| v.parse::<f64>().unwrap()).sum();
        assert!((probs - 1.0).abs() < 1e-9);
        assert_eq!(r[9], "2");
    }

    // the same run with fitted densities
    ok(&[
        "fit-pdf",
        "--seed",
        "1",
        "--samples",
        "200",
        "--window",
        "30",
        "--out",
        &p("pdf.json"),
    ]);
    let text = ok(&[
        "simulate",
        "--input",
        &p("u.csv"),
        "--targets",
        &p("t1.csv"),
        &p("t2.csv"),
        &p("t3.csv"),
        "--model",
        "empirical",
        "--pdf",
        &p("pdf.json"),
        "--window",
        "30",
        "--hop",
        "10",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r["decision"] == 2.0));
}

#[test]
fn seeded_output_is_byte_identical() {
    for args in [
        &["gen-null", "--n", "300", "--seed", "11"][..],
        &[
            "analyze", "rotation", "--seed", "4", "--reps", "3", "--step", "30",
        ][..],
        &["fit-pdf", "--seed", "2", "--samples", "100"][..],
    ] {
        let a = ok(args);
        assert_eq!(a, ok(args), "{args:?}");
    }
    assert_ne!(
        ok(&["gen-null", "--n", "300", "--seed", "11"]),
        ok(&["gen-null", "--n", "300", "--seed", "12"])
    );
    let header = ok(&["gen-null", "--n", "30", "--seed", "11"]);
    assert_eq!(header.lines().next(), Some("# rate=30 closed=0 seed=11"));
}

#[test]
fn usage_and_runtime_errors_have_distinct_exit_codes() {
    assert_eq!(
        mocorr(&["analyze", "capacity", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(mocorr(&["gen-null"]).status.code(), Some(2));
    let missing = mocorr(&[
        "distort",
        "--input",
        "/definitely/not/here.csv",
        "--seed",
        "1",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));
    assert_eq!(mocorr(&["gen-circle", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn serve_over_stdio() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_mocorr"))
        .args(["serve", "--stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"v\":1,\"config\":{\"n_targets\":2}}\n{\"v\":9}\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["layout"]["positions"].as_array().unwrap().len(), 2);
    assert_eq!(lines[1]["error"]["code"], "bad-version");
}
