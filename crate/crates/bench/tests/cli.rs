use std::fs;
use std::path::Path;
use std::process::Command;

use inertial_vi::problems::gen_nash_cournot;
use inertial_vi::{solve, Method, SolverConfig};
use tempfile::tempdir;
use vi_bench::report::{PLOT_HEADER, TRACE_HEADER};
use vi_bench::{emit_plot_csv, emit_trace_csv, parse_config, run_experiment};

fn vibench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vibench"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn trace_csv_has_one_line_per_record() {
    let inst = gen_nash_cournot(5, 3).unwrap();
    let cfg = SolverConfig {
        max_iter: 3,
        tol: 1e-300,
        record_timing: false,
        ..SolverConfig::default()
    };
    let trace = solve(&inst.operator, &inst.feasible, Method::Alg1, &cfg, &inst.initial_point, &inst.known).unwrap();
    assert_eq!(trace.records.len(), 3);

    let dir = tempdir().unwrap();
    let (a, b, plot) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("p.csv"));
    emit_trace_csv(&trace, &a).unwrap();
    emit_trace_csv(&trace, &b).unwrap();
    emit_plot_csv(&trace, &plot).unwrap();

    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], TRACE_HEADER);
    for (i, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[0], (i + 1).to_string());
        // No reference solution for this family.
        assert_eq!(cols[5], "");
        assert_eq!(cols[6].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[1].parse::<f64>().unwrap(), trace.records[i].step_diff);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let plot_text = fs::read_to_string(&plot).unwrap();
    assert!(plot_text.starts_with(PLOT_HEADER));
    assert_eq!(plot_text.lines().count(), 4);
}

#[test]
fn exponential_experiment_writes_artifacts() {
    let dir = tempdir().unwrap();
    let cfg = parse_config(r#"{"problem": {"family": "exponential"}, "methods": ["alg1"], "record_timing": false}"#).unwrap();
    let report = run_experiment(&cfg, dir.path()).unwrap();
    let row = report.row("alg1").unwrap();
    assert_eq!((row.runs, row.converged, row.invariant_violations), (1, 1, 0));
    assert!(report.all_converged());
    for f in ["summary.json", "summary.txt", "traces/exponential__alg1__seed0__rep0.csv", "plots/exponential__alg1__seed0__rep0.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["runs"][0]["status"], "converged");
}

#[test]
fn cli_rejects_bad_config_with_exit_4() {
    let dir = tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"problem": {"family": "exponential"}, "methods": ["alg2"]}"#);
    let out = vibench().arg("run").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    let missing = vibench().args(["run", "--config", "/nonexistent/cfg.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn cli_run_and_sweep_succeed() {
    let dir = tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nc.json",
        r#"{"problem": {"family": "nash_cournot", "n_units": 5}, "methods": ["alg1", "sem"]}"#,
    );
    let run_dir = dir.path().join("run");
    let out = vibench().arg("run").arg("--config").arg(&cfg).arg("--out").arg(&run_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("method"));
    assert!(table.contains("nash_cournot_n5"));

    let sweep_dir = dir.path().join("sweep");
    let out = vibench()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .args(["--seeds", "1..=3", "--mode", "fast", "--out"])
        .arg(&sweep_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_dir(sweep_dir.join("traces")).unwrap().count(), 6);
}

#[test]
fn cli_reports_non_convergence_with_exit_2() {
    let dir = tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "short.json",
        r#"{"problem": {"family": "volterra", "grid_size": 20}, "methods": ["alg1"], "max_iter": 3}"#,
    );
    let out = vibench().arg("run").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_check_passes() {
    let dir = tempdir().unwrap();
    let out = vibench().arg("check").arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["exponential", "harker_pang", "nash_cournot", "volterra"] {
        assert!(dir.path().join(name).join("summary.json").is_file(), "{name}");
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = parse_config(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 4);
}
