use std::path::Path;
use std::process::{Command, Output};

use heunband_cli::RunConfig;
use serde_json::Value;

const KRAWTCHOUK: &str =
    r#"{"name":"kraw","pipeline":"discrete","family":{"kind":"krawtchouk","p":0.3},"n":20,"j1":7,"j2":11}"#;
const BILINEAR: &str = r#"{"name":"bil","pipeline":"antikraw","n":8,"n1":3,"n2":5,"ansatz":"bilinear"}"#;

fn heunband(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_heunband"));
    cmd.args(args).env_remove("HEUNBAND_THREADS");
    if let Some(t) = threads {
        cmd.env("HEUNBAND_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn krawtchouk_run_passes_with_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KRAWTCHOUK);
    let out = dir.path().join("out");
    let o = heunband(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let report = read_json(&out.join("kraw.json"));
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["config_echo", "residuals", "spectra", "verdict"]);
    assert_eq!(report["verdict"]["passed"], true);
    let tols = &report["config_echo"]["tolerances"];
    for (name, v) in report["residuals"].as_object().unwrap() {
        let (v, t) = (v.as_f64().unwrap(), tols[name].as_f64().unwrap());
        if name == "restricted_gap_ratio" {
            assert!(v > t, "{name}");
        } else {
            assert!(v < t, "{name} = {v}");
        }
    }
    // The echoed configuration is itself a valid configuration.
    let echo: RunConfig = serde_json::from_value(report["config_echo"].clone()).unwrap();
    assert_eq!(echo.j1, Some(7));

    let plot = std::fs::read_to_string(out.join("kraw.concentration.dat")).unwrap();
    let rows: Vec<(usize, f64)> = plot
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace();
            let i = it.next().unwrap().parse().unwrap();
            let v = it.next().unwrap().parse().unwrap();
            assert!(it.next().is_none());
            (i, v)
        })
        .collect();
    assert_eq!(rows.len(), 8);
    for (k, &(i, v)) in rows.iter().enumerate() {
        assert_eq!(i, k);
        assert!((-1e-12..=1.0 + 1e-12).contains(&v));
    }
}

#[test]
fn bilinear_antikraw_fails_with_degeneracy_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), BILINEAR);
    let o = heunband(&["run", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("degenerate restricted spectrum"), "{err}");
    assert!(err.contains("gap_ratio_e"), "{err}");
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["verdict"]["passed"], false);
}

#[test]
fn verify_all_prints_every_criterion() {
    let o = heunband(&["verify-all"], Some("2"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    for id in 1..=8 {
        assert!(text.contains(&format!("criterion {id}: PASS")), "{text}");
    }
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let batch = format!(
        r#"[{KRAWTCHOUK},
            {{"name":"jac","pipeline":"contdisc","family":{{"kind":"jacobi","alpha":0,"beta":0}},"n":10,"w":0.3}},
            {{"name":"penta","pipeline":"antikraw","n":8,"n1":3,"n2":5}},
            {{"name":"pro","pipeline":"symbolic","identity":"prolate","t":1.5,"w":0.7}}]"#
    );
    let cfg = write_config(dir.path(), &batch);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = heunband(&["run", "--config", &cfg, "--out", a.to_str().unwrap()], Some("1"));
    let ob = heunband(&["run", "--config", &cfg, "--out", b.to_str().unwrap()], Some("4"));
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0));
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap()
        );
    }
}

#[test]
fn floats_are_written_with_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KRAWTCHOUK);
    let o = heunband(&["run", "--config", &cfg], None);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut floats = 0;
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.parse::<f64>().is_ok() && token.contains('.') {
            let mantissa = token.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{token}");
            floats += 1;
        }
    }
    assert!(floats > 20);
}

#[test]
fn config_errors_exit_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"pipeline":"discrete","family":{"kind":"hermite"},"n":5,"w":0.2}"#,
            "is not used",
        ),
        (r#"{"pipeline":"discrete","bogus":1}"#, "bogus"),
        (
            r#"{"pipeline":"contdisc","family":{"kind":"jacobi","alpha":0,"beta":0},"n":4,"w":2}"#,
            "support",
        ),
        (r#"{"pipeline":"antikraw","n":7,"n1":2,"n2":3}"#, "even"),
        ("{not json", "invalid JSON"),
        ("[]", "empty"),
    ];
    for (text, needle) in cases {
        let cfg = write_config(dir.path(), text);
        let o = heunband(&["run", "--config", &cfg], None);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(needle), "{text}: {}", stderr(&o));
    }
    let o = heunband(&["run", "--config", "/nonexistent/config.json"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KRAWTCHOUK);
    assert_eq!(heunband(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(heunband(&["run"], None).status.code(), Some(2));
    assert_eq!(
        heunband(&["run", "--config", &cfg, "--format", "xml"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        heunband(&["run", "--config", &cfg, "--tol", "m_pi1"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        heunband(&["run", "--config", &cfg, "--tol", "nope=1"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(heunband(&["run", "--config", &cfg], Some("0")).status.code(), Some(2));
    assert_eq!(heunband(&["export", "--config", &cfg], None).status.code(), Some(2));
}

#[test]
fn tightened_tolerance_names_the_failing_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KRAWTCHOUK);
    let o = heunband(&["run", "--config", &cfg, "--tol", "restricted_gap_ratio=0.5"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("failing residual `restricted_gap_ratio`"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn csv_reports_and_matrix_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), KRAWTCHOUK);
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    assert_eq!(
        heunband(&["run", "--config", &cfg, "--out", out_s, "--format", "csv"], None)
            .status
            .code(),
        Some(0)
    );
    let residuals = std::fs::read_to_string(out.join("kraw.residuals.csv")).unwrap();
    assert!(residuals.starts_with("run,name,value,tolerance,bound,passed\n"));
    assert_eq!(residuals.lines().count(), 10);
    let spectra = std::fs::read_to_string(out.join("kraw.spectra.csv")).unwrap();
    assert!(spectra.lines().any(|l| l.starts_with("kraw,concentration,7,")));

    assert_eq!(
        heunband(&["export", "--config", &cfg, "--out", out_s], None)
            .status
            .code(),
        Some(0)
    );
    let kernel = std::fs::read_to_string(out.join("kraw.kernel.csv")).unwrap();
    let rows: Vec<Vec<f64>> = kernel
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 8);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, rows[j][i]);
        }
    }
    let v1 = std::fs::read_to_string(out.join("kraw.v1.csv")).unwrap();
    assert_eq!(v1.lines().count(), 21);
}

#[test]
fn families_lists_every_kind() {
    let o = heunband(&["families", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let list: Value = serde_json::from_slice(&o.stdout).unwrap();
    let kinds: Vec<&str> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["kind"].as_str().unwrap())
        .collect();
    assert_eq!(
        kinds,
        ["krawtchouk", "hahn", "anti-krawtchouk", "hermite", "laguerre", "jacobi"]
    );
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let configs = heunband_cli::config::load_configs(&path).unwrap();
        heunband_cli::config::validate_batch(configs, &Default::default()).unwrap();
        seen += 1;
    }
    assert_eq!(seen, 3);
}
