use std::fs;
use std::path::Path;
use std::process::Command;

use metasnell::cli::{exit_code, run, RunOptions};

fn opts(dir: &Path, sets: &[&str]) -> RunOptions {
    RunOptions {
        out: Some(dir.to_path_buf()),
        overrides: sets.iter().map(|s| s.to_string()).collect(),
        ..RunOptions::default()
    }
}

fn column(csv_text: &str, name: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn trace_fan_reproduces_classical_snell() {
    let dir = tempfile::tempdir().unwrap();
    let o = opts(
        dir.path(),
        &["trace.theta_min_deg=30.0", "trace.theta_max_deg=30.0", "trace.count=3", "media.upper.index=1.5"],
    );
    let r = run("trace", &o);
    assert_eq!(exit_code(&r), 0);
    let text = fs::read_to_string(dir.path().join("rays.csv")).unwrap();
    let sines = column(&text, "sin_theta_t");
    assert_eq!(sines.len(), 3);
    for s in sines {
        assert!((s.parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn weakcheck_small_suite_passes_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sets = ["weakcheck.cases=3"];
    assert_eq!(exit_code(&run("weakcheck", &opts(a.path(), &sets))), 0);
    assert_eq!(exit_code(&run("weakcheck", &opts(b.path(), &sets))), 0);
    let ra = fs::read_to_string(a.path().join("report.json")).unwrap();
    let rb = fs::read_to_string(b.path().join("report.json")).unwrap();
    // The output directory is part of the echoed config.
    let strip = |s: &str, d: &Path| s.replace(&d.display().to_string(), "OUT");
    assert_eq!(strip(&ra, a.path()), strip(&rb, b.path()));
}

#[test]
fn admit_reports_ohmic_incompatibility_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let o = opts(
        dir.path(),
        &["phase.kind=quadratic", "phase.params.q=[[0.4,0.0,0.0],[0.0,0.0,0.0],[0.0,0.0,0.0]]"],
    );
    let r = run("admit", &o);
    assert_eq!(exit_code(&r), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["results"]["ohmic"]["compatible"], false);
    assert_eq!(report["results"]["admissible"], true);
}

#[test]
fn audit_and_design_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exit_code(&run("audit", &opts(dir.path(), &["audit.samples_per_axis=1"]))), 0);
    assert!(dir.path().join("jumps.csv").exists());
    assert_eq!(exit_code(&run("design", &opts(dir.path(), &["design.grid=32"]))), 0);
    let phase = fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    assert_eq!(phase.lines().count(), 1 + 32 * 32);
}

#[test]
fn exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exit_code(&run("plot", &opts(dir.path(), &[]))), 1);
    assert_eq!(exit_code(&run("trace", &opts(dir.path(), &["surface.kind=torus"]))), 1);
    let missing = RunOptions {
        config: Some(dir.path().join("nope.toml")),
        ..opts(dir.path(), &[])
    };
    assert_eq!(exit_code(&run("trace", &missing)), 1);
    // A scaled transmitted amplitude leaves a tangential jump.
    assert_eq!(exit_code(&run("audit", &opts(dir.path(), &["audit.amplitude_scale=2.0"]))), 2);
}

#[test]
fn binary_reads_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        r#"
seed = 7

[surface]
kind = "paraboloid"
a = 0.3
b = -0.2

[media]
upper = { index = 1.4 }

[phase]
kind = "linear"
params = { a = [1.0, 0.5, 0.0] }

[trace]
mode = "parallel"
count = 4
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = Command::new(env!("CARGO_BIN_EXE_metasnell"))
        .args(["trace", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stdout).contains("trace: pass"));
    let rays = fs::read_to_string(out.join("rays.csv")).unwrap();
    assert_eq!(rays.lines().count(), 1 + 16);
    for args in [&["bogus"][..], &["trace", "--no-such-flag"][..]] {
        let run = Command::new(env!("CARGO_BIN_EXE_metasnell")).args(args).output().unwrap();
        assert_eq!(run.status.code(), Some(1));
    }
}

#[test]
fn shipped_lens_config_passes_trace_and_design() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/lens.toml");
    for sub in ["trace", "design"] {
        let dir = tempfile::tempdir().unwrap();
        let o = RunOptions { config: Some(config.clone()), ..opts(dir.path(), &[]) };
        assert_eq!(exit_code(&run(sub, &o)), 0, "{sub}");
    }
}
