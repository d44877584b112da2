use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_competition");

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn same_config_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("kappa_one");
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let out = run(&[
            "classify",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap(),
            "--workers",
            workers,
            "--set",
            "experiment.runs=6",
            "--set",
            "experiment.jumps=20000",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let (fa, fb) = (read_dir(a.path()), read_dir(b.path()));
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa[0].1.clone()).unwrap();
    assert!(text.starts_with("# competition "));
    assert!(text.contains("# runs = 6"));
    assert!(text.contains("kappa_observed_counts"));
}

#[test]
fn diagnostics_prints_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "diagnostics",
        "--config",
        &config("linear_supercritical"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for needle in ["r = 0.618", "rho_tilde = 5", "y0 = ", "k = ", "l = "] {
        assert!(stdout.contains(needle), "missing {needle}");
    }
}

#[test]
fn invalid_model_names_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "diagnostics",
        "--config",
        &config("linear_supercritical"),
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "model.lambda1=0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("λ₁>0 required"));
    assert!(read_dir(dir.path()).is_empty());
}

#[test]
fn typo_rejected() {
    let out = run(&[
        "series",
        "--config",
        &config("reuter_immigration_death"),
        "--set",
        "experiment.seris_k=10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_certificate_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // a scan window that ends below the threshold cannot certify
    let out = run(&[
        "lyapunov",
        "--config",
        &config("lotka_volterra"),
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "experiment.x_hi=100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified = false"));
    assert_eq!(read_dir(dir.path()).len(), 1);
}
