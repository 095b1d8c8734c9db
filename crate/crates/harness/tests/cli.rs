use std::process::Command;

use sla_esprit_harness::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sla-esprit").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

#[test]
fn geometry_reports_aperture() {
    let (code, out, _) = run(&["geometry", "--omega", "0,1,6,9,11,13"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "M"), Some("14"));
    assert_eq!(value(&out, "coarray"), Some("0,1,2,3,4,5,6,7,8,9,10,11,12,13"));
    let sigma: f64 = value(&out, "sigma_K_A_M").unwrap().parse().unwrap();
    assert!(sigma > 0.0);
}

#[test]
fn small_array_with_too_many_sources() {
    let (code, out, _) = run(&["geometry", "--omega", "0,1,3"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "M"), Some("4"));
    assert!(out.contains("cannot be resolved"));
}

#[test]
fn bound_with_defaults_is_clamped() {
    let (code, out, _) = run(&["bound"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(value(&out, "md_bound"), Some("1"));
    let unclamped: f64 = value(&out, "md_bound_unclamped").unwrap().parse().unwrap();
    assert!(unclamped > 1.0);
    let (_, out, _) = run(&["bound", "--delta", "0.018"]);
    assert!(value(&out, "resolution_snapshots").is_some());
}

#[test]
fn simulate_prints_estimates_and_dumps_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("rda.txt");
    let (code, out, err) = run(&["simulate", "-L", "5000", "--seed", "11", "--dump-cov", dump.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let md: f64 = value(&out, "DA.md").unwrap().parse().unwrap();
    assert!(md > 0.0 && md < 0.01);
    assert!(value(&out, "SS.estimates").is_some());
    let text = std::fs::read_to_string(dump).unwrap();
    assert_eq!(text.lines().count(), 14);
    assert!(text.lines().all(|l| l.split_whitespace().count() == 14));
}

#[test]
fn errors_have_distinct_messages_and_codes() {
    let (unknown, _, e1) = run(&["geometry", "--bogus"]);
    let (config, _, e2) = run(&["sweep", "--trials", "0"]);
    let (geom, _, e3) = run(&["geometry", "--omega", "0,3,1"]);
    assert!(e1.contains("--bogus"));
    assert!(e2.contains("trials must be at least 1"));
    assert!(e3.contains("strictly increasing"));
    let codes = [unknown, config, geom];
    assert!(codes.iter().all(|&c| c != 0));
    assert_ne!(codes[0], codes[1]);
    assert_ne!(codes[1], codes[2]);
    assert_ne!(codes[0], codes[2]);
}

#[test]
fn malformed_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "trials = 2\nl_grid 100\n").unwrap();
    let (code, _, err) = run(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, err) = run(&["sweep", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(code, 3);
    assert!(err.contains("cannot read config"));
}

#[test]
fn sweep_from_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    let csv = dir.path().join("out/s.csv");
    std::fs::write(
        &cfg,
        format!(
            "experiment_id = s\nl_grid = 200, 2000\nsigma_grid = 1\ntrials = 50\noutput_path = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let (code, out, err) = run(&["sweep", "--config", cfg.to_str().unwrap(), "--trials", "3", "--emit-plot-data"]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    assert!(dir.path().join("out/s_summary.csv").exists());
    assert!(out.contains("plot_data = "));
    let plot = std::fs::read_to_string(dir.path().join("out/s_DA_sigma2_1.dat")).unwrap();
    assert_eq!(plot.lines().count(), 3);
}

#[test]
fn presets_accept_overrides() {
    let dir = tempfile::tempdir().unwrap();
    // exp1: one L and one σ; exp2: three σ; exp3: four separations
    for (preset, rows) in [("exp1", 1), ("exp2", 3), ("exp3", 4)] {
        let csv = dir.path().join(format!("{preset}.csv"));
        let (code, _, err) = run(&[
            preset,
            "--trials",
            "1",
            "--l-grid",
            "100",
            "--sigma_grid",
            if preset == "exp2" { "0.1,1,3" } else { "1" },
            "--output-path",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{preset}: {err}");
        let n = std::fs::read_to_string(&csv).unwrap().lines().count() - 1;
        assert_eq!(n, rows, "{preset}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_sla-esprit"))
        .args(["exp3", "--trials", "1", "--l-grid", "100", "--delta-grid", "0.143"])
        .env("SLA_ESPRIT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let csv = std::fs::read_to_string(dir.path().join("exp3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn unwritable_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub/out.csv");
    let (code, _, err) = run(&["sweep", "--trials", "1", "--output-path", target.to_str().unwrap()]);
    assert_eq!(code, 6);
    assert!(err.contains("cannot write"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sla-esprit");
    let ok = Command::new(bin).args(["geometry"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("M = 14"));
    let bad = Command::new(bin).args(["sweep", "--trials", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
}
