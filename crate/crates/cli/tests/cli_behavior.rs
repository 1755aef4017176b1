//! End-to-end checks of the scenario runner binary: artifact determinism,
//! summary values, plot derivation, and exit-code conventions.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ras-sim");

fn run_bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn run_ok(dir: &Path, args: &[&str]) {
    let out = run_bin(dir, args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_config(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("config should write");
    path
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn summary_value(summary: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    summary
        .lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("summary should contain key {key:?}:\n{summary}"))
        .to_string()
}

fn data_rows(table: &str) -> Vec<&str> {
    table.lines().skip(1).filter(|l| !l.is_empty()).collect()
}

const FLOCK_CONFIG: &str = "mode = flock\nn = 6\nr = 0.5\neps_o = 0.05\n\
                            max_steps = 20000\nquiet_tail = 200\nseed = 3\n";

#[test]
fn resolved_config_reruns_to_identical_artifacts() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(tmp.path(), "flock.conf", FLOCK_CONFIG);
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "first"],
    );
    let resolved = tmp.path().join("first/config.resolved");
    run_ok(
        tmp.path(),
        &["run", "--config", resolved.to_str().unwrap(), "--out", "second"],
    );
    assert_eq!(
        read(&resolved),
        read(&tmp.path().join("second/config.resolved")),
        "resolved config should be a fixed point of parse -> serialize"
    );
    assert_eq!(
        read(&tmp.path().join("first/trace.csv")),
        read(&tmp.path().join("second/trace.csv")),
        "rerunning the resolved config should reproduce the trace byte for byte"
    );
}

#[test]
fn identical_seeds_give_byte_identical_swarm_artifacts() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "swarm.conf",
        "mode = swarm\ngraph = grid:5x5\np = 0.7\nsteps = 50\nseed = 42\n",
    );
    for out in ["a", "b"] {
        run_ok(
            tmp.path(),
            &["run", "--config", config.to_str().unwrap(), "--out", out],
        );
    }
    for name in ["trace.csv", "positions.csv", "summary.txt"] {
        assert_eq!(
            read(&tmp.path().join("a").join(name)),
            read(&tmp.path().join("b").join(name)),
            "{name} should be byte-identical across same-seed reruns"
        );
    }
}

#[test]
fn two_agent_release_reports_the_known_energy() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "lb.conf",
        "mode = lower-bound\nn = 2\nm = 1\nrho = 0.1\ns_values = 1\nseed = 0\n",
    );
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "out"],
    );
    let summary = read(&tmp.path().join("out/summary.txt"));
    let e1: f64 = summary_value(&summary, "e_1").parse().expect("numeric energy");
    assert!(
        (e1 - 5.0).abs() <= 1e-6,
        "two-agent total energy should be 5, got {e1}"
    );
}

#[test]
fn grid_positions_split_into_rendered_halves() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "grid.conf",
        "mode = swarm\ngraph = grid:30x30\np = 0.7\nsteps = 3\nseed = 0\n",
    );
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "out"],
    );
    let out = tmp.path().join("out");
    let positions = read(&out.join("positions.csv"));
    assert_eq!(
        data_rows(&positions).len(),
        1740,
        "doubled 30x30 grid should list every vertex"
    );
    run_ok(tmp.path(), &["plot-data", "--dir", out.to_str().unwrap()]);
    let pinned = read(&out.join("positions_pinned.csv"));
    let free = read(&out.join("positions_free.csv"));
    let pinned_rows = data_rows(&pinned);
    let free_rows = data_rows(&free);
    assert_eq!(pinned_rows.len(), 60, "two pinned columns of 30");
    assert_eq!(free_rows.len(), 840, "900 base vertices minus 60 pinned");
    for row in pinned_rows {
        let x: f64 = row.split(',').nth(2).expect("x field").parse().expect("numeric x");
        assert_eq!(x, 0.0, "pinned vertices must sit on the target plane: {row}");
    }
}

#[test]
fn flock_log_diameter_decays_after_the_last_switch() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(tmp.path(), "flock.conf", FLOCK_CONFIG);
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "out"],
    );
    let out = tmp.path().join("out");
    let summary = read(&out.join("summary.txt"));
    let t_stable: f64 = summary_value(&summary, "t_stable").parse().expect("numeric t");
    run_ok(tmp.path(), &["plot-data", "--dir", out.to_str().unwrap()]);
    let table = read(&out.join("diameter_vs_t.csv"));
    let mut last = f64::INFINITY;
    let mut rows_after = 0usize;
    for row in data_rows(&table) {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().expect("numeric field")).collect();
        let (t, log_diameter) = (fields[0], fields[2]);
        assert!(
            log_diameter.is_finite(),
            "log-diameter must be finite (zero rows are dropped): {row}"
        );
        if t >= t_stable {
            assert!(
                log_diameter <= last + 1e-12,
                "log-diameter should not grow after the last switch: {row}"
            );
            last = log_diameter;
            rows_after += 1;
        }
    }
    assert!(rows_after > 10, "decay tail should be observable, got {rows_after} rows");
}

#[test]
fn single_bird_run_yields_a_header_only_plot() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "one.conf",
        "mode = flock\nn = 1\nquiet_tail = 5\nseed = 0\n",
    );
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "out"],
    );
    let out = tmp.path().join("out");
    run_ok(tmp.path(), &["plot-data", "--dir", out.to_str().unwrap()]);
    assert_eq!(
        read(&out.join("diameter_vs_t.csv")),
        "t,diameter,log10_diameter\n",
        "a diameterless run should still emit the header"
    );
}

#[test]
fn usage_and_validation_errors_exit_one() {
    let tmp = TempDir::new().expect("tempdir");
    let bad = write_config(tmp.path(), "bad.conf", "mode = flock\nn = 0\n");
    let out = run_bin(tmp.path(), &["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "validation failure should exit 1");
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("key 'n'"),
        "error should name the offending key"
    );

    let out = run_bin(tmp.path(), &["--bogus"]);
    assert_eq!(out.status.code(), Some(1), "unknown flag should exit 1");

    let out = run_bin(tmp.path(), &["run", "--config", "missing.conf"]);
    assert_eq!(out.status.code(), Some(1), "missing config should exit 1");

    let out = run_bin(tmp.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0), "--help should exit 0");
}

#[test]
fn invariant_checks_pass_and_exit_zero() {
    let tmp = TempDir::new().expect("tempdir");
    let out = run_bin(tmp.path(), &["check", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "healthy library should pass its checks");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let suites: Vec<&str> = stdout.lines().filter(|l| !l.is_empty()).collect();
    assert!(suites.len() >= 5, "expected several suites, got:\n{stdout}");
    for line in &suites {
        assert!(line.starts_with("pass"), "every suite should pass: {line}");
    }
}

#[test]
fn replica_zero_matches_the_master_seed_run() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(tmp.path(), "flock.conf", FLOCK_CONFIG);
    run_ok(
        tmp.path(),
        &["run", "--config", config.to_str().unwrap(), "--out", "single"],
    );
    run_ok(
        tmp.path(),
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            "fan",
            "--replicas",
            "3",
        ],
    );
    let single = read(&tmp.path().join("single/trace.csv"));
    let r0 = read(&tmp.path().join("fan/trace_r000.csv"));
    let r1 = read(&tmp.path().join("fan/trace_r001.csv"));
    assert_eq!(single, r0, "replica 0 should reuse the master seed verbatim");
    assert_ne!(r0, r1, "distinct replicas should draw distinct trajectories");
}

#[test]
fn seed_flag_overrides_the_config() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(tmp.path(), "flock.conf", FLOCK_CONFIG);
    run_ok(
        tmp.path(),
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            "out",
            "--seed",
            "99",
        ],
    );
    let resolved = read(&tmp.path().join("out/config.resolved"));
    assert!(
        resolved.contains("seed = 99\n"),
        "resolved config should carry the overridden seed:\n{resolved}"
    );
}

#[test]
fn environment_variable_names_the_default_out_dir() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "one.conf",
        "mode = flock\nn = 1\nquiet_tail = 5\nseed = 0\n",
    );
    let env_out = tmp.path().join("env_out");
    let out = Command::new(BIN)
        .args(["run", "--config", config.to_str().unwrap()])
        .env("RAS_SIM_OUT", &env_out)
        .current_dir(tmp.path())
        .output()
        .expect("binary should spawn");
    assert!(out.status.success(), "run under RAS_SIM_OUT should succeed");
    assert!(
        env_out.join("trace.csv").exists(),
        "artifacts should land in the directory named by RAS_SIM_OUT"
    );
}

#[test]
fn sweep_tabulates_energies_across_agent_counts() {
    let tmp = TempDir::new().expect("tempdir");
    let config = write_config(
        tmp.path(),
        "sweep.conf",
        "mode = lower-bound\nn = 16\nm = 2\nrho = 0.1\ns_values = 0.5, 1\n\
         sweep_n = 8, 16\nseed = 0\n",
    );
    run_ok(
        tmp.path(),
        &["sweep", "--config", config.to_str().unwrap(), "--out", "out"],
    );
    let table = read(&tmp.path().join("out/sweep/s_energy_vs_n.csv"));
    let rows = data_rows(&table);
    assert_eq!(rows.len(), 4, "two agent counts times two exponents");
    let expected = [
        (8usize, 0.5f64, 795.821329625313f64),
        (8, 1.0, 79.921335430414),
        (16, 0.5, 4608.218769214168),
        (16, 1.0, 319.68127589300104),
    ];
    for ((n, s, energy), row) in expected.iter().zip(&rows) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().expect("n"), *n, "row {row}");
        assert_eq!(fields[1].parse::<f64>().expect("s"), *s, "row {row}");
        let measured: f64 = fields[2].parse().expect("energy");
        assert!(
            (measured - energy).abs() <= 1e-9 * energy,
            "schedule energies are deterministic; expected {energy}, got {measured}"
        );
    }
    assert!(
        tmp.path().join("out/sweep/n8/summary.txt").exists(),
        "per-count artifacts should be kept"
    );
}
