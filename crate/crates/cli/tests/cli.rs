use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use landau_cli::output::DIAGNOSTICS_HEADER;
use landau_cli::{RunConfig, Setup};
use landau_core::thermo::compute_invariants;

const QUICK: &str = include_str!("../../../configs/quick.toml");

fn landau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau"))
        .args(args)
        .output()
        .expect("spawn landau")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run_quick(dir: &Path, config_text: &str, out: &str) -> (Output, PathBuf) {
    let cfg = write_config(dir, "cfg.toml", config_text);
    let out_dir = dir.join(out);
    let o = landau(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    (o, out_dir)
}

fn rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_diagnostics_and_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, out) = run_quick(tmp.path(), QUICK, "out");
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = rows(&out.join("diagnostics.csv"));
    assert_eq!(header, DIAGNOSTICS_HEADER.join(","));
    assert_eq!(rows.len(), 6);
    for (k, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), 11);
        assert_eq!(r[0], k as f64);
        for col in [2, 5] {
            assert!((r[col] - rows[0][col]).abs() <= 1e-12 * rows[0][col].abs());
        }
        for col in [3, 4] {
            assert!((r[col] - rows[0][col]).abs() <= 1e-12 * rows[0][2] * 5.0);
        }
        if k > 0 {
            assert!(r[6] >= rows[k - 1][6], "entropy fell at step {k}");
            assert!(r[10] <= 1e-12);
        }
    }
    for step in 0..=5 {
        let snap = std::fs::read_to_string(out.join(format!("snapshot_{step}.csv"))).unwrap();
        let mut lines = snap.lines();
        assert_eq!(lines.next(), Some("v1,v2,f"));
        // 6x6 cells of degree 2.
        assert_eq!(lines.count(), 13 * 13);
    }
}

#[test]
fn rerunning_gives_identical_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, out_a) = run_quick(tmp.path(), QUICK, "a");
    let (b, out_b) = run_quick(tmp.path(), QUICK, "b");
    assert!(a.status.success() && b.status.success());
    let da = std::fs::read(out_a.join("diagnostics.csv")).unwrap();
    let db = std::fs::read(out_b.join("diagnostics.csv")).unwrap();
    assert_eq!(da, db);
}

#[test]
fn invalid_config_exits_nonzero_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let text = QUICK.replace("[integrator]\n", "[integrator]\ndt = -1.0\n");
    let (o, out) = run_quick(tmp.path(), &text, "never");
    assert!(!o.status.success());
    assert!(stderr(&o).contains("integrator.dt"), "{}", stderr(&o));
    assert!(!out.exists());

    let (o, out) = run_quick(tmp.path(), &format!("colour = 3\n{QUICK}"), "never");
    assert!(!o.status.success());
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn stepper_failure_keeps_partial_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let text = QUICK.replace(
        "[integrator]\n",
        "[integrator]\npicard_max_iters = 1\nnewton_fallback = false\n",
    );
    let (o, out) = run_quick(tmp.path(), &text, "out");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step 1 failed"), "{}", stderr(&o));
    let (_, rows) = rows(&out.join("diagnostics.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn output_dir_defaults_to_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from_config");
    let text = QUICK.replace(
        "directory = \"output/quick\"",
        &format!("directory = {:?}", target.to_str().unwrap()),
    );
    let text = text.replace("n_steps = 5", "n_steps = 1");
    let cfg = write_config(tmp.path(), "cfg.toml", &text);
    let o = landau(&["run", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(target.join("diagnostics.csv").exists());
}

#[test]
fn check_passes_on_the_quick_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "cfg.toml", QUICK);
    let o = landau(&["check", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn check_reports_missing_energy_capability() {
    let tmp = tempfile::tempdir().unwrap();
    let text = QUICK.replace("[mesh]\n", "[mesh]\ndegree = 1\n");
    let cfg = write_config(tmp.path(), "cfg.toml", &text);
    let o = landau(&["check", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("unsupported capability"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn definiteness_is_conditional_without_the_clamp() {
    let tmp = tempfile::tempdir().unwrap();
    let lobes = "[mesh]\nn_cells = 6\n\n[[initial_condition]]\nweight = 1.0\ncenter = [-2.0, 0.0]\ntemperature = 0.5\n";
    let clamped =
        format!("[thermo]\nclamp_mobility = true\n[integrator]\npath = \"dense\"\n{lobes}");
    let cfg = write_config(tmp.path(), "clamped.toml", &clamped);
    let o = landau(&["check", cfg.to_str().unwrap()]);
    let line = |o: &Output| {
        stdout(o)
            .lines()
            .find(|l| l.contains("negative_semidefinite"))
            .unwrap()
            .to_string()
    };
    assert!(line(&o).starts_with("PASS"), "{}", stdout(&o));
    assert!(stdout(&o).contains("SKIP"));

    let cfg = write_config(tmp.path(), "unclamped.toml", lobes);
    let o = landau(&["check", cfg.to_str().unwrap()]);
    assert!(line(&o).starts_with("CONDITIONAL"), "{}", stdout(&o));
}

fn key_values(path: &Path) -> std::collections::HashMap<String, f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn equilibrium_reproduces_the_initial_moments() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[mesh]\nn_cells = 6\n\n[[initial_condition]]\nweight = 1.0\ncenter = [0.0, 0.0]\ntemperature = 1.0\n";
    let cfg = write_config(tmp.path(), "cfg.toml", text);
    let out = tmp.path().join("eq");
    let o = landau(&[
        "equilibrium",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let kv = key_values(&out.join("equilibrium.csv"));
    assert!(kv["residual_norm"] <= 1e-10);
    assert!(kv["lambda_momentum_x"].abs() < 1e-10 && kv["lambda_momentum_y"].abs() < 1e-10);
    assert!(kv["lambda_energy"] < 0.0);

    // Compare with the invariants of the configured initial condition.
    let setup = Setup::new(&RunConfig::from_toml_str(text, Path::new("inline")).unwrap()).unwrap();
    let inv = compute_invariants(&setup.disc, &setup.initial.coeffs, &setup.model, 0.0);
    assert!((kv["mass"] - inv.mass).abs() <= 1e-10 * inv.mass);
    assert!((kv["energy"] - inv.energy).abs() <= 1e-10 * inv.energy);
    assert!((kv["momentum_x"] - inv.momentum[0]).abs() <= 1e-10 * inv.mass);
    assert!(out.join("snapshot_equilibrium.csv").exists());
}

#[test]
fn over_energetic_targets_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[mesh]\nn_cells = 4\n\n[[initial_condition]]\nweight = 1.0\ncenter = [0.0, 0.0]\ntemperature = 1.0\n\n[[initial_condition]]\nweight = 1.0\ncenter = [4.9, 4.9]\ntemperature = 0.05\n\n[[initial_condition]]\nweight = 1.0\ncenter = [-4.9, -4.9]\ntemperature = 0.05\n";
    let cfg = write_config(tmp.path(), "cfg.toml", text);
    let out = tmp.path().join("eq");
    let o = landau(&[
        "equilibrium",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not realizable"), "{}", stderr(&o));
    assert!(!out.exists());
}
