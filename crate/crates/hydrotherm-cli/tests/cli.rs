//! End-to-end tests of the `hydrotherm` binary: exit codes, output bundle
//! layout, format round-trips and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hydrotherm::scenarios::{build_ates_benchmark, AtesPreset, GeometrySpec, ScenarioConfig};
use hydrotherm::sim::{OutputSink, State};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hydrotherm"))
}

fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// A two-step, low-resolution variant of the injection benchmark that a
/// debug build runs in well under a second.
fn tiny_ates() -> ScenarioConfig {
    let mut cfg = build_ates_benchmark(AtesPreset::Coarse);
    if let GeometrySpec::Wedge(w) = &mut cfg.geometry {
        w.n_r = 24;
        w.n_z = 15;
    }
    cfg.time.t_end_s = 2.0 * cfg.time.step_s;
    cfg.time.snapshot_every = 1;
    cfg
}

fn write_tiny_ates(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.json");
    std::fs::write(&path, tiny_ates().to_json_pretty()).unwrap();
    path
}

#[test]
fn scenario_emits_parseable_configs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ates", "pile-desk", "pile-full"] {
        let out = dir.path().join(format!("{name}.json"));
        let result = run_bin(&["scenario", name, "--emit", out.to_str().unwrap()]);
        assert!(result.status.success(), "{name}: {result:?}");
        let text = std::fs::read_to_string(&out).unwrap();
        ScenarioConfig::from_json_str(&text).unwrap();
    }
}

#[test]
fn unknown_scenario_name_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let result = run_bin(&["scenario", "volcano", "--emit", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("volcano"));
}

#[test]
fn unknown_subcommand_exits_one_with_usage() {
    let result = run_bin(&["frobnicate"]);
    assert_eq!(result.status.code(), Some(1));
    let err = String::from_utf8_lossy(&result.stderr);
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");
}

#[test]
fn missing_config_is_an_io_error_and_bad_json_a_config_error() {
    let result = run_bin(&["run", "/nonexistent/config.json"]);
    assert_eq!(result.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let result = run_bin(&["run", bad.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("scenario config"));
}

struct FinalState(Option<State>);

impl OutputSink for FinalState {
    fn on_snapshot(&mut self, _mesh: &hydrotherm::mesh::Mesh, state: &State) -> hydrotherm::Result<()> {
        self.0 = Some(state.clone());
        Ok(())
    }
}

/// Minimal legacy-VTK reader used as an independent oracle for the writer.
fn parse_vtk_fields(text: &str) -> (usize, Vec<f64>, Vec<f64>) {
    let mut lines = text.lines().peekable();
    let mut points = 0usize;
    let mut temperature = Vec::new();
    let mut pressure = Vec::new();
    while let Some(line) = lines.next() {
        if let Some(rest) = line.strip_prefix("POINTS ") {
            points = rest.split_whitespace().next().unwrap().parse().unwrap();
        } else if line.starts_with("SCALARS temperature_K") {
            assert_eq!(lines.next().unwrap(), "LOOKUP_TABLE default");
            for _ in 0..points {
                temperature.push(lines.next().unwrap().trim().parse().unwrap());
            }
        } else if line.starts_with("SCALARS pressure_Pa") {
            assert_eq!(lines.next().unwrap(), "LOOKUP_TABLE default");
            for _ in 0..points {
                pressure.push(lines.next().unwrap().trim().parse().unwrap());
            }
        }
    }
    (points, temperature, pressure)
}

#[test]
fn run_produces_a_complete_bundle_matching_the_engine() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_ates(dir.path());
    let out = dir.path().join("run1");
    let result = run_bin(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");

    // Bundle layout.
    for file in ["manifest.json", "observations.csv", "perf.json", "fields_000001.vtk", "fields_000002.vtk"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let listed: Vec<String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(listed.contains(&"fields_000002.vtk".to_string()));
    assert_eq!(manifest["workers"], 1);

    // The observation CSV starts with the exact header and reproduces the
    // initial linear temperature profile along the vertical line.
    let csv = std::fs::read_to_string(out.join("observations.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time_s,line_name,arc_length_m,x,y,z,temperature_K,pressure_Pa"
    );
    let mut checked = 0;
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let time: f64 = cols[0].parse().unwrap();
        if time != 0.0 || cols[1] != "wellbore-vertical" {
            continue;
        }
        let z: f64 = cols[5].parse().unwrap();
        let t: f64 = cols[6].parse().unwrap();
        let expected = 278.15 + 0.05 * (300.0 - z);
        assert!(
            (t - expected).abs() < 1e-6,
            "initial profile at z = {z}: {t} vs {expected}"
        );
        checked += 1;
    }
    assert!(checked > 100, "vertical line rows found: {checked}");

    // Independent VTK read-back against an in-process run of the same
    // config.
    let text = std::fs::read_to_string(out.join("fields_000002.vtk")).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    let (points, temperature, pressure) = parse_vtk_fields(&text);
    let sim = tiny_ates().to_simulation(1).unwrap();
    let mut last = FinalState(None);
    sim.run(&mut [&mut last]).unwrap();
    let state = last.0.unwrap();
    assert_eq!(state.step, 2);
    assert_eq!(points, sim.mesh.node_count());
    assert_eq!(temperature.len(), points);
    // Half-ulp bound of the 9-significant-digit ASCII format: 5e-9 relative
    // in the worst case (mantissa near 1).
    for (read, exact) in temperature.iter().zip(&state.temperature) {
        assert!((read - exact).abs() <= 5e-9 * exact.abs().max(1.0));
    }
    for (read, exact) in pressure.iter().zip(&state.pressure) {
        assert!((read - exact).abs() <= 5e-9 * exact.abs().max(1.0));
    }
}

#[test]
fn reruns_are_byte_identical_and_env_workers_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_ates(dir.path());
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let result = bin()
            .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("HYDROTHERM_WORKERS", "2")
            .output()
            .unwrap();
        assert!(result.status.success(), "{result:?}");
    }
    for file in ["observations.csv", "fields_000001.vtk", "fields_000002.vtk", "manifest.json"] {
        let a = std::fs::read(out1.join(file)).unwrap();
        let b = std::fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between reruns");
    }
    // Perf reports agree on everything except the timers.
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("perf.json")).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out2.join("perf.json")).unwrap()).unwrap();
    assert_eq!(a["workers"], 2, "HYDROTHERM_WORKERS was ignored");
    for doc in [&mut a, &mut b] {
        doc["phases"] = serde_json::Value::Null;
        doc["total_s"] = serde_json::Value::Null;
    }
    assert_eq!(a, b);
}

#[test]
fn bench_writes_a_speedup_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_ates(dir.path());
    let out = dir.path().join("bench");
    let result = run_bin(&[
        "bench",
        config.to_str().unwrap(),
        "--workers",
        "1,2",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("workers"), "table missing: {stdout}");
    let bench: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("bench.json")).unwrap()).unwrap();
    let entries = bench["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["workers"], 1);
    assert_eq!(entries[0]["speedup"], 1.0);
    assert_eq!(entries[1]["workers"], 2);
}

#[test]
fn verify_suite_passes_from_the_cli() {
    let result = run_bin(&["verify"]);
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(result.status.success(), "verify failed:\n{stdout}");
    assert!(stdout.matches("PASS").count() >= 6, "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}
