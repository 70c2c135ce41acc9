use std::process::Command;

use approx::assert_relative_eq;
use gravicollapse::units::{convert_named, UnitSystem};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gravicollapse"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn reduce_summary() {
    let v: Value = serde_json::from_str(&run_ok(&[
        "reduce", "--mass", "2", "--sigma0", "1", "--units", "planck",
    ]))
    .unwrap();
    assert_relative_eq!(
        v["tau_width_formula"].as_f64().unwrap(),
        0.5f64.sqrt(),
        max_relative = 1e-15
    );
    assert_relative_eq!(
        v["tau_mass_formula"].as_f64().unwrap(),
        1.0 / 32.0,
        max_relative = 1e-15
    );
    // reference: scipy solve_ivp (DOP853, rtol 1e-12) on the same ODE
    assert_relative_eq!(
        v["fall_time_numeric"].as_f64().unwrap(),
        1.498573399427,
        max_relative = 1e-8
    );
    assert_eq!(v["mode"], "FrozenWidth");
    assert_eq!(v["units"], "planck");
    assert_eq!(v["validity_flag"], false);
    assert!(v["series"].as_array().unwrap().len() > 10);
}

#[test]
fn criterion_si_matches_planck_after_conversion() {
    let m_si = 1.67e-27;
    let m_pl = convert_named(m_si, "mass", UnitSystem::SI, UnitSystem::PLANCK).unwrap();
    let si: Value = serde_json::from_str(&run_ok(&[
        "criterion",
        "--mass",
        &m_si.to_string(),
        "--units",
        "si",
    ]))
    .unwrap();
    let pl: Value =
        serde_json::from_str(&run_ok(&["criterion", "--mass", &m_pl.to_string()])).unwrap();
    for (key, dim) in [
        ("sigma_canonical", "length"),
        ("sigma_force_balance", "length"),
        ("sigma_energy_min", "length"),
        ("tau_width_formula", "time"),
        ("tau_mass_formula", "time"),
    ] {
        let back = convert_named(
            si[key].as_f64().unwrap(),
            dim,
            UnitSystem::SI,
            UnitSystem::PLANCK,
        )
        .unwrap();
        assert_relative_eq!(back, pl[key].as_f64().unwrap(), max_relative = 1e-9);
    }
    assert_eq!(si["units"], "si");
}

#[test]
fn csv_reduce_writes_summary_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fall.csv");
    run_ok(&[
        "reduce",
        "--mass",
        "2",
        "--sigma0",
        "1",
        "--out-format",
        "csv",
        "--out-path",
        path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("t,r,u,sigma\n"));
    let summary: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("fall.summary.json")).unwrap(),
    )
    .unwrap();
    assert!(summary["fall_time_numeric"].is_number());
    assert!(summary.get("series").is_none());
}

#[test]
fn threads_env_does_not_change_output() {
    let args = [
        "sweep",
        "--masses",
        "1,2,3,4,5,6",
        "--sigma0",
        "1",
        "--out-format",
        "csv",
    ];
    let outputs: Vec<Vec<u8>> = ["1", "2", "8"]
        .iter()
        .map(|n| {
            let out = bin()
                .args(args)
                .env("GRAVICOLLAPSE_THREADS", n)
                .output()
                .unwrap();
            assert!(out.status.success());
            out.stdout
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn exit_codes() {
    // unknown flag and missing required value are argument errors
    assert_eq!(
        bin()
            .args(["reduce", "--bogus"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    let out = bin().args(["reduce", "--mass", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--sigma0"));
    let out = bin()
        .args(["reduce", "--mass", "2", "--sigma0", "1"])
        .env("GRAVICOLLAPSE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // a numerical failure carries the module's message
    let out = bin()
        .args(["reduce", "--mass", "2", "--sigma0", "1", "--t-max", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no fall"));
}

#[test]
fn regimes_grid() {
    let csv = run_ok(&[
        "regimes",
        "--masses",
        "0.5,1,2",
        "--sigma0s",
        "1",
        "--out-format",
        "csv",
    ]);
    let regimes: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert_eq!(
        regimes,
        ["QuantumDominant", "QuantumDominant", "GravityDominant"]
    );
}
