use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_commoninfo"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value following `key` on the summary line that starts with it.
fn summary_value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).expect("summary line");
    line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn discrete_dsbs_summary_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["discrete", data("dsbs_0.1.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(summary_value(&s, "C_GK"), 0.0);
    assert!((summary_value(&s, "C_W") - 0.873).abs() < 1e-2);
    assert!(s.contains("grid oracle"));
    for (f, header) in [
        ("c_curve.csv", "excess_rate_bits,shared_rate_bits,lagrange_weight,residual,converged"),
        ("k_curve.csv", "excess_rate_bits,shared_rate_bits,lagrange_weight,residual,converged"),
        ("gw_points.csv", "r0,r1,r2,sum,d1,d2,witness_id"),
    ] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(text.lines().next(), Some(header));
        assert!(text.lines().count() > 2);
    }
}

#[test]
fn discrete_identity() {
    let o = run(&["discrete", data("identity_2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(summary_value(&s, "C_GK"), 1.0);
    assert!((summary_value(&s, "C_W") - 1.0).abs() < 1e-6);
}

#[test]
fn discrete_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&[
            "discrete",
            data("two_block.json").to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["c_curve.csv", "k_curve.csv", "gw_points.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"p\": [[0.5, oops]]}").unwrap();
    assert_eq!(run(&["discrete", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "{\"p\": [[0.5, -0.5], [0.5, 0.5]]}").unwrap();
    assert_eq!(run(&["discrete", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["discrete", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["gaussian", "--rho", "1.5", "--d2", "0.2"]).status.code(), Some(2));
    assert_eq!(
        run(&["gaussian", "--rho", "0.5", "--d2", "0.2", "--d1-grid", "0.5:0.1:0.1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--only", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn gaussian_sweep_marks_corners() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&[
        "gaussian",
        "--rho",
        "0.5",
        "--d2",
        "0.2",
        "--d1-grid",
        "0.3:0.9:0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains(" A 0.5 ") && s.contains(" B 0.6875"), "{s}");
    let csv = std::fs::read_to_string(out).unwrap();
    let regimes: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    let mut changes: Vec<&str> = regimes.clone();
    changes.dedup();
    assert_eq!(changes, ["I", "III", "II"]);
}

#[test]
fn gaussian_independent_sources() {
    let o = run(&["gaussian", "--rho", "0", "--d2", "0.3", "--d1-grid", "0.1:0.9:0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("d1,d2,regime,joint_rd_bits,lossy_ci_bits,slb_bits,slb_tight\n"));
    for line in s.lines().skip(1) {
        assert_eq!(line.split(',').nth(4), Some("0"), "{line}");
    }
}

#[test]
fn lossy_matches_lossless_at_zero_distortion() {
    let pmf = data("dsbs_0.1.json");
    let d = run(&["discrete", pmf.to_str().unwrap()]);
    let cw = summary_value(&stdout(&d), "C_W");
    let o = run(&["lossy", pmf.to_str().unwrap(), "--d1", "0", "--d2", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[3] - cw).abs() < 2e-2);
}

#[test]
fn lossy_summary_and_limits() {
    let pmf = data("dsbs_0.1.json");
    let o = run(&["lossy", pmf.to_str().unwrap(), "--d1", "0.02", "--d2", "0.02"]);
    assert_eq!(o.status.code(), Some(0));
    let err = stderr(&o);
    let gap: f64 = err.rsplit("pangloss gap ").next().unwrap().trim().parse().unwrap();
    assert!(gap.abs() <= 2e-2);

    let o = run(&["lossy", pmf.to_str().unwrap(), "--d1", "0.9", "--d2", "0.9"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("0.9,0.9,0,0,0,0,0"));

    let o = run(&["lossy", pmf.to_str().unwrap(), "--d1=-0.1", "--d2", "0"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn lossy_grid_sweeps_d1() {
    let pmf = data("dsbs_0.1.json");
    let o = run(&["lossy", pmf.to_str().unwrap(), "--d1-grid", "0.5:0.7:0.1", "--d2", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let d1: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(d1, ["0.5", "0.6", "0.7"]);

    let o = run(&["lossy", pmf.to_str().unwrap(), "--d2", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lossy_custom_distortion_below_minimum_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("d.json");
    std::fs::write(&spec, "{\"d_x\": [[0.2, 1.0], [1.0, 0.2]], \"d_y\": [[0.0, 1.0], [1.0, 0.0]]}").unwrap();
    let o = run(&[
        "lossy",
        data("dsbs_0.1.json").to_str().unwrap(),
        "--d1",
        "0.1",
        "--d2",
        "0.1",
        "--distortion",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn verify_subset_is_deterministic() {
    let args = ["verify", "--only", "gaussian-lossless,gk-exact", "--only", "slb", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert_eq!(s.lines().filter(|l| l.starts_with("criterion")).count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["verify", "--only", "gaussian-sweep", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(out).unwrap(), stdout(&o));
}
