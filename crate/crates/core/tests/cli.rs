use d2d_underlay::emit::{read_records, Format};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2d-underlay")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["eval", "--set", "bogus.key=1"])), 1);
    assert_eq!(code(&run(&["eval", "--set", "network.lambda=-1"])), 1);
    assert_eq!(code(&run(&["eval", "--preset", "fig9"])), 1);
    assert_eq!(code(&run(&["eval", "--format", "xml"])), 1);
    assert_eq!(code(&run(&["eval", "--config", "/nonexistent.toml"])), 1);
    assert_eq!(code(&run(&["simulate"])), 1);
    let out = run(&["eval", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn numerical_failures_exit_2() {
    assert_eq!(code(&run(&["solve-xi", "--target", "1e-12"])), 2);
    let out = run(&["eval", "--quantity", "tau", "--set", "network.lambda=0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("undefined"));
}

#[test]
fn validation_failures_exit_3() {
    let validate = |alpha_c: &str, d: &str| {
        run(&[
            "validate",
            "--mc-runs",
            "2000",
            "--set",
            "sweep.parameter=\"d\"",
            "--set",
            &format!("sweep.grid=[{d}]"),
            "--set",
            "sweep.quantities=[\"p_d2d\"]",
            "--set",
            "mode.xi_db=10",
            "--set",
            &format!("pathloss.alpha_c={alpha_c}"),
        ])
    };
    let out = validate("4.0", "250");
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("PASS p_d2d"));
    let out = validate("3.5", "10");
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("FAIL p_d2d"));
}

#[test]
fn eval_output_parses_in_both_formats() {
    for (flag, format) in [("csv", Format::Csv), ("json", Format::Json)] {
        let out = run(&["eval", "--format", flag]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let records = read_records(format, out.stdout.as_slice()).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.analytic.is_some() && r.error.is_none()));
    }
}

#[test]
fn sweep_rows_match_grid_and_quantities() {
    let out = run(&[
        "sweep",
        "--set",
        "sweep.grid=[-10, 0, 10]",
        "--set",
        "sweep.quantities=[\"outage_bs\", \"m_bar_d2d\"]",
    ]);
    assert_eq!(code(&out), 0);
    let records = read_records(Format::Csv, out.stdout.as_slice()).unwrap();
    assert_eq!(records.len(), 6);
    let column: Vec<f64> = records.iter().filter(|r| r.quantity == "outage_bs").map(|r| r.analytic.unwrap()).collect();
    assert!(column.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn file_output_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = ["sweep", "--preset", "fig2a", "--set", "sweep.grid=[-10, 0]"];
    let stdout = run(&args).stdout;
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(code(&run(&with_out)), 0);
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "mode.xi_db = 5.0\n\n[pathloss]\nalpha_c = 3.5\n").unwrap();
    let p = path.to_str().unwrap();
    let base = run(&["eval", "--quantity", "outage_bs", "--config", p]);
    let over = run(&["eval", "--quantity", "outage_bs", "--config", p, "--set", "mode.xi_db=-5"]);
    let value = |o: &Output| read_records(Format::Csv, o.stdout.as_slice()).unwrap()[0].analytic.unwrap();
    assert!(value(&over) < value(&base));
    assert_eq!(read_records(Format::Csv, base.stdout.as_slice()).unwrap()[0].xi_db, 5.0);
}

#[test]
fn solve_xi_reports_the_solution() {
    let out = run(&["solve-xi", "--target", "0.01"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("solved"));
    let r = &read_records(Format::Csv, out.stdout.as_slice()).unwrap()[0];
    assert!((r.analytic.unwrap() - 0.01).abs() < 1e-4);

    let out = run(&["solve-xi", "--target", "0.01", "--set", "power.rho_bs_dbm=-60", "--set", "power.rho_d_dbm=-110"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("saturated"));
    let r = &read_records(Format::Csv, out.stdout.as_slice()).unwrap()[0];
    assert_eq!(r.xi_db, f64::INFINITY);
}

#[test]
fn simulate_dumps_realizations() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("r.jsonl");
    let d = dump.to_str().unwrap();
    let out = run(&["simulate", "--mc-runs", "200", "--seed", "3", "--set", "sweep.grid=[0]", "--dump", d, "--dump-count", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&dump).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2]["index"], 2);
    assert_eq!(lines[2]["seed"], 3);
    let r = &read_records(Format::Csv, out.stdout.as_slice()).unwrap()[0];
    assert!(r.analytic.is_none() && r.mc_mean.is_some() && r.seed == Some(3));
}

#[test]
fn presets_are_listed() {
    let out = run(&["presets"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2a", "fig2b", "fig3", "fig4", "fig5"] {
        assert!(text.contains(name));
    }
}
