//! Command-line surface: exit codes, reproducibility, file formats.

use std::path::Path;
use std::process::Output;

fn trimon(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_trimon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_canonical_config(dir: &Path) -> std::path::PathBuf {
    let ec = trimon_core::circuit::ChargingEnergies {
        e_ca: 444.0e6,
        e_cb: 464.0e6,
        e_cc: 138.6e6,
    };
    let spec = trimon_core::circuit::DeviceSpec::from_charging_energies(8.7e9, &ec).unwrap();
    let config = serde_json::json!({
        "device": {
            "ej_ghz": spec.ej_hz / 1e9,
            "ca_ff": spec.c_a / 1e-15,
            "cb_ff": spec.c_b / 1e-15,
            "ccp_ff": spec.c_cp / 1e-15,
        },
        "cavity": { "omega_bare_ghz": 7.23, "g_mhz": 94.0, "kappa_mhz": 3.9 },
    });
    let path = dir.join("device.json");
    std::fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    path
}

#[test]
fn unknown_command_exits_with_usage_code() {
    let out = trimon(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = trimon(&["derive"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn nonexistent_config_is_a_config_error() {
    let out = trimon(&["derive", "--config", "/nonexistent/device.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = trimon(&["derive", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sampled_tomography_without_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "tomo",
        "--protocol",
        "bell",
        "--shots",
        "100",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tomography_is_bit_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut results = Vec::new();
    for run in ["a", "b", "c"] {
        let out_dir = dir.path().join(run);
        let seed = if run == "c" { "8" } else { "7" };
        let out = trimon(&[
            "tomo",
            "--protocol",
            "bell",
            "--shots",
            "500",
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        results.push(std::fs::read(out_dir.join("tomo_result.json")).unwrap());
    }
    assert_eq!(results[0], results[1], "same seed must give identical bytes");
    assert_ne!(results[0], results[2], "different seed must move the data");
}

#[test]
fn analytic_tomography_recovers_the_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "tomo",
        "--protocol",
        "bell",
        "--shots",
        "0",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("tomo_result.json")).unwrap())
            .unwrap();
    assert_eq!(report["analytic"].as_bool(), Some(true));
    assert!(report["fidelity"].as_f64().unwrap() >= 0.999);
}

#[test]
fn simulate_runs_a_circuit_file() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("circuit.json");
    std::fs::write(
        &circuit,
        r#"[
            {"op": "crot", "target": "B", "band": "upper", "phi_deg": 0.0, "theta_deg": 90.0},
            {"op": "cnot", "target": "A"}
        ]"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "simulate",
        "--circuit",
        circuit.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("simulate_result.json")).unwrap())
            .unwrap();
    assert!((report["fidelity_to_ideal"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // Bell state: |00⟩ and |11⟩ amplitudes at 1/√2
    let state = report["final_state"].as_array().unwrap();
    let amp = |k: usize| {
        let pair = state[k].as_array().unwrap();
        (pair[0].as_f64().unwrap().powi(2) + pair[1].as_f64().unwrap().powi(2)).sqrt()
    };
    assert!((amp(0) - 1.0 / 2.0f64.sqrt()).abs() < 1e-9);
    assert!((amp(3) - 1.0 / 2.0f64.sqrt()).abs() < 1e-9);
}

#[test]
fn simulate_empty_circuit_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("empty.json");
    std::fs::write(&circuit, "[]").unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "simulate",
        "--circuit",
        circuit.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("simulate_result.json")).unwrap())
            .unwrap();
    assert_eq!(report["fidelity_to_ideal"].as_f64().unwrap(), 1.0);
}

#[test]
fn malformed_circuit_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("bad.json");
    std::fs::write(&circuit, r#"[{"op": "warp", "target": "A"}]"#).unwrap();
    let out = trimon(&[
        "simulate",
        "--circuit",
        circuit.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fit_crossing_reads_csv_and_rejects_single_branch() {
    let dir = tempfile::tempdir().unwrap();
    // good file from the synthetic model
    let data = trimon_core::crossing::synthetic_dataset(
        38.8e6,
        5.5585e9,
        8.0e9,
        1.0,
        &(0..17).map(|i| 0.30 + 0.005 * i as f64).collect::<Vec<_>>(),
        0.0,
        1,
    );
    let mut rows = vec!["flux,freq_hz,branch".to_string()];
    for p in &data.points {
        let b = match p.branch {
            trimon_core::crossing::Branch::Plus => "+",
            trimon_core::crossing::Branch::Minus => "-",
        };
        rows.push(format!("{},{},{}", p.flux, p.freq_hz, b));
    }
    let csv = dir.path().join("crossing.csv");
    std::fs::write(&csv, rows.join("\n")).unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "fit-crossing",
        "--data",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("crossing_fit.json")).unwrap())
            .unwrap();
    assert!((report["j_pi_mhz"].as_f64().unwrap() - 77.6).abs() < 0.1);

    // single branch: underdetermined
    let single: Vec<String> = rows
        .iter()
        .filter(|r| !r.ends_with(",-"))
        .cloned()
        .collect();
    let bad = dir.path().join("single.csv");
    std::fs::write(&bad, single.join("\n")).unwrap();
    let out = trimon(&[
        "fit-crossing",
        "--data",
        bad.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spectrum_command_writes_comparison_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_canonical_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--n-max",
        "4",
        "--potential",
        "harmonic",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("spectrum.json")).unwrap())
            .unwrap();
    assert_eq!(report["n_max"].as_u64(), Some(4));
    assert!(report["levels"].as_array().unwrap().len() == 7);
    let csv = std::fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("level,exact_hz,perturbative_hz,relative_difference"));
}

#[test]
fn report_merges_previous_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_canonical_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "derive",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success());
    let out = trimon(&[
        "fit-crossing",
        "--demo",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success());
    let out = trimon(&[
        "report",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert!((report["couplings_pi_mhz"]["j_ab"].as_f64().unwrap() - 227.0).abs() < 0.5);
    assert!(!report["crossing"].is_null());
    assert!(report["tomography"].is_null());
    let qubits = report["qubits"].as_array().unwrap();
    assert_eq!(qubits.len(), 3);
    assert_eq!(qubits[0]["label"].as_str(), Some("A"));
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("qubit,omega_upper_ghz,alpha_2pi_mhz"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn pulse_level_simulation_exports_schedule_and_envelopes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = trimon(&[
        "simulate",
        "--protocol",
        "bell",
        "--level",
        "pulse",
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let schedule: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("schedule.json")).unwrap())
            .unwrap();
    let entries = schedule.as_array().unwrap();
    assert_eq!(entries.len(), 2, "two pulses in the Bell schedule");
    assert_eq!(entries[0]["qubit"].as_str(), Some("B"));
    assert!((entries[0]["total_ns"].as_f64().unwrap() - 281.0).abs() < 1e-9);
    assert_eq!(entries[1]["qubit"].as_str(), Some("A"));
    assert!((entries[1]["total_ns"].as_f64().unwrap() - 241.0).abs() < 1e-9);
    let env = std::fs::read_to_string(out_dir.join("envelopes.csv")).unwrap();
    assert!(env.starts_with("time_s,pulse,amplitude_hz"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("simulate_result.json")).unwrap())
            .unwrap();
    assert!(report["fidelity_to_ideal"].as_f64().unwrap() >= 0.99);
}
