//! End-to-end tests of the `plateau` binary: output shape, determinism,
//! exit codes.

use std::process::{Command, Output};

fn plateau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plateau"))
        .args(args)
        .env_remove("PLATEAU_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows with the wall-time column dropped (timing is the one field that may
/// legitimately differ between identical runs).
fn stable_rows(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| {
            if l.starts_with('#') || l.starts_with("ansatz") {
                l.to_string()
            } else {
                l.rsplit_once(',').map(|(head, _ms)| head.to_string()).unwrap_or_default()
            }
        })
        .collect()
}

#[test]
fn variance_tn_known_value() {
    let out = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:3", "--param",
        "1,1", "--method", "tn",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "ansatz,n_qubits,observable,param_j,param_k,method,variance,stderr,samples,seed,ms"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("qmps,3,X:3,1,1,tn,0.03515625,0,0,0,"), "{row}");
}

#[test]
fn closed_and_grid_agree_with_tn() {
    for method in ["closed", "grid"] {
        let out = plateau(&[
            "variance", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:3",
            "--param", "1,1", "--method", method,
        ]);
        assert!(out.status.success());
        let text = stdout(&out);
        let value: f64 = text.lines().nth(1).unwrap().split(',').nth(6).unwrap().parse().unwrap();
        assert!((value - 0.03515625).abs() < 1e-12, "{method}: {value}");
    }
}

#[test]
fn out_of_range_param_is_usage_error() {
    let out = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "4", "--observable", "X:2", "--param",
        "9,1", "--method", "tn",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--param"), "{err}");
}

#[test]
fn bad_observable_is_usage_error() {
    let out = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "4", "--observable", "W:2", "--param",
        "1,1", "--method", "tn",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--observable"));
}

#[test]
fn mc_output_is_deterministic_for_fixed_seed() {
    let args = [
        "variance", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:2", "--param",
        "2,1", "--method", "mc", "--samples", "5000", "--seed", "42",
    ];
    let a = plateau(&args);
    let b = plateau(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stable_rows(&stdout(&a)), stable_rows(&stdout(&b)));
    // A different seed changes the estimate.
    let mut other = args;
    other[other.len() - 1] = "43";
    let c = plateau(&other);
    assert_ne!(stable_rows(&stdout(&a)), stable_rows(&stdout(&c)));
}

#[test]
fn plateau_seed_env_is_the_default() {
    let explicit = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "2", "--observable", "X:1", "--param",
        "1,1", "--method", "mc", "--samples", "2000", "--seed", "7",
    ]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_plateau"))
        .args([
            "variance", "--ansatz", "qmps", "--qubits", "2", "--observable", "X:1",
            "--param", "1,1", "--method", "mc", "--samples", "2000",
        ])
        .env("PLATEAU_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(stable_rows(&stdout(&explicit)), stable_rows(&stdout(&via_env)));
}

#[test]
fn json_format_is_an_array_of_records() {
    let out = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:3", "--param",
        "1,1", "--method", "tn", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["observable"], "X:3");
    assert_eq!(arr[0]["variance"], 0.03515625);
    assert_eq!(arr[0]["method"], "tn");
}

#[test]
fn hamiltonian_preset_expands_per_term() {
    let out = plateau(&[
        "variance", "--ansatz", "qmps", "--qubits", "3", "--observable", "heisenberg",
        "--param", "1,1", "--method", "tn",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // Two bonds × three Pauli pairs.
    assert_eq!(text.lines().count() - 1, 6);
    assert!(text.contains("X:1*X:2") && text.contains("Z:2*Z:3"));
}

#[test]
fn scan_qubits_range_matches_closed_form_decay() {
    let out = plateau(&[
        "scan", "--ansatz", "qmps", "--qubits-range", "2..6", "--observable", "X:N",
        "--param", "1,1", "--method", "tn",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for (row, n) in text.lines().skip(1).zip(2u32..) {
        let value: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        let want = 0.25 * 0.375f64.powi(n as i32 - 1);
        assert!((value - want).abs() < 1e-12, "N={n}: {value} vs {want}");
    }
}

#[test]
fn scan_fit_recovers_lower_cone_exponent() {
    let out = plateau(&[
        "scan", "--ansatz", "qmera", "--qubits-range", "4,8,16", "--observable", "X:N",
        "--param", "1,1", "--method", "tn", "--fit",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let fit_line = text.lines().find(|l| l.starts_with("# fit:")).unwrap();
    let exponent: f64 = fit_line
        .split_whitespace()
        .find_map(|t| t.strip_prefix("exponent="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((exponent + 2.7).abs() < 0.2, "exponent {exponent}");
}

#[test]
fn scan_all_params_reports_every_parameter() {
    let out = plateau(&[
        "scan", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:2", "--all-params",
        "--method", "tn",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // qMPS(3) has 14 parameters; out-of-cone ones must be exact zeros.
    assert_eq!(text.lines().count() - 1, 14);
    let zeros = text
        .lines()
        .skip(1)
        .filter(|r| r.split(',').nth(6).unwrap() == "0")
        .count();
    assert!(zeros > 0);
}

#[test]
fn scan_without_an_axis_is_a_usage_error() {
    let out = plateau(&[
        "scan", "--ansatz", "qmps", "--qubits", "3", "--observable", "X:2", "--method", "tn",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_fast_passes() {
    let out = plateau(&["verify", "--level", "fast"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().last().unwrap().contains("checks passed"));
}
