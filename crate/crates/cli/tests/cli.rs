use std::path::Path;
use std::process::{Command, Output};

fn gradest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn theta_one_fails_c2() {
    let out = gradest(&[
        "check",
        "--suite",
        "C",
        "--preset",
        "theta-power",
        "--theta",
        "1.0",
        "--k",
        "1",
        "--T",
        "2",
    ]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    let c2 = text.lines().find(|l| l.starts_with("C2")).expect("C2 row");
    assert!(c2.split_whitespace().nth(1) == Some("fail"), "{text}");
}

#[test]
fn theta_half_passes_suite_c() {
    let out = gradest(&[
        "check",
        "--suite",
        "C",
        "--preset",
        "theta-power",
        "--theta",
        "0.5",
        "--k",
        "1",
        "--T",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn improved_lyd_holds_on_h3() {
    let out = gradest(&[
        "verify",
        "--family",
        "improved-lyd",
        "--beta",
        "0.5",
        "--data",
        "h3",
        "--n",
        "3",
        "--k",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let max_g: f64 = text
        .split("max_G = ")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(max_g <= 0.0, "{text}");
}

#[test]
fn crossover_prints_threshold() {
    let out = gradest(&[
        "crossover",
        "--a",
        "lyd:0.5",
        "--b",
        "improved-lyd:0.5",
        "--n",
        "3",
        "--k",
        "1",
        "--bracket",
        "1.001",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let t: f64 = stdout(&out).trim().parse().unwrap();
    assert!((t - 1.03125).abs() < 1e-8, "{t}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&gradest(&["eval", "--family", "no-such-family"])), 1);
    assert_eq!(code(&gradest(&["frobnicate"])), 1);
    assert_eq!(
        code(&gradest(&["eval", "--family", "lyd"])),
        1,
        "missing beta"
    );
    assert_eq!(code(&gradest(&["--help"])), 0);
}

#[test]
fn curvature_mismatch_is_a_usage_error() {
    // h3 data has Ric = -2 g, so k = 1 is not a valid lower bound
    let out = gradest(&[
        "verify", "--family", "lyd:0.5", "--data", "h3", "--n", "3", "--k", "1",
    ]);
    assert_eq!(
        code(&out),
        1,
        "k below the data's curvature is a hypothesis mismatch"
    );
}

#[test]
fn csv_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(
        &scenario,
        r#"{"version": 1, "ctx": {"n": 3, "k": 1.0, "T": 4.0},
            "bounds": [{"family": "lyd", "params": [0.5]}, {"family": "lixu-linear", "params": []},
                       {"family": "qian-theta", "params": [0.5]}],
            "grid": {"t_lo": 0.01, "t_hi": 4.0, "points": 40},
            "outputs": {"csv": "cmp.csv"}}"#,
    )
    .unwrap();
    let run = || {
        let out = gradest(&["compare", "--scenario", scenario.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join("cmp.csv")).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(
        text.starts_with("t,lyd(0.5),lixu-linear,qian-theta(0.5),dominant\n"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 41);
    // no temp files left behind
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names.len(), 2, "{names:?}");
}

#[test]
fn scenario_typos_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let cases = [
        r#"{"version": 1, "ctx": {"n": 3, "k": 1.0, "T": 4.0}, "coefficient": {"preset": "theta-power", "thetta": 0.5}}"#,
        r#"{"version": 1, "ctx": {"n": 3, "k": 1.0, "T": 4.0, "kappa": 2}}"#,
        r#"{"version": 2, "ctx": {"n": 3, "k": 1.0, "T": 4.0}}"#,
        r#"{"version": 1, "ctx": {"n": 3, "k": 1.0, "T": 4.0}, "coefficient": {"table": "missing.csv"}}"#,
        r#"{"version": 1, "ctx": {"n": 3, "k": 1.0, "T": 4.0}"#,
    ];
    for (i, body) in cases.iter().enumerate() {
        let p = write(&format!("bad{i}.json"), body);
        let out = gradest(&["generate", "--scenario", p.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "case {i}: {}", stdout(&out));
    }
}

#[test]
fn generate_from_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("b.csv");
    let mut text = String::from("t,b,bprime\n");
    for i in 1..=400 {
        let t = 2.0 * i as f64 / 400.0;
        text.push_str(&format!("{t},{},{}\n", t.powf(1.5), 1.5 * t.sqrt()));
    }
    std::fs::write(&table, text).unwrap();
    let out_path = dir.path().join("gen.csv");
    let out = gradest(&[
        "generate",
        "--table",
        table.to_str().unwrap(),
        "--n",
        "2",
        "--k",
        "1",
        "--T",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("t,b,beta,psi\n"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,b\n0.5,0.5\n1,1\n").unwrap();
    let out = gradest(&["generate", "--table", bad.to_str().unwrap(), "--T", "1"]);
    assert_eq!(code(&out), 1, "missing column");
}

#[test]
fn solve_then_verify_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.csv");
    let out = gradest(&[
        "solve",
        "--n",
        "3",
        "--nr",
        "600",
        "--t-end",
        "2",
        "--out",
        sol.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = Command::new(env!("CARGO_BIN_EXE_gradest"))
        .args([
            "verify",
            "--family",
            "lyd:0.5",
            "--k",
            "2",
            "--data",
            sol.to_str().unwrap(),
        ])
        .env("GRADEST_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(
        code(&out),
        0,
        "{}{}",
        stdout(&out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let (json, csv, margin) = (p("r.json"), p("g.csv"), p("m.csv"));
    let out = gradest(&[
        "verify",
        "--family",
        "lixu-hyperbolic",
        "--data",
        "h3",
        "--k",
        "2",
        "--json",
        &json,
        "--csv",
        &csv,
        "--margin",
        &margin,
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("r,t,G\n"));
    assert!(std::fs::read_to_string(&margin)
        .unwrap()
        .starts_with("t,margin\n"));
    assert!(Path::new(&json).exists());
}
