//! The installed binary: exit codes, headers and file output.

use std::process::Command;

fn lineshape(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_lineshape")).args(args).output().unwrap()
}

#[test]
fn spectrum_rows_and_header() {
    let out = lineshape(&["spectrum", "--omega-ratio", "10", "--envelope", "sine", "--grid", "-100", "100", "2001"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2001);
    // Δ = 50γ: both pulse lines below the Lorentzian
    let row = rows.iter().find(|r| r[0] == 50.0).unwrap();
    assert!(row[2] < row[1]);
}

#[test]
fn output_is_deterministic() {
    let a = lineshape(&["spectrum", "--envelope", "sine", "--grid", "-30", "30", "121"]);
    let b = lineshape(&["spectrum", "--envelope", "sine", "--grid", "-30", "30", "121"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn tabulated_envelope_file() {
    let dir = std::env::temp_dir().join(format!("lineshape-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("tri.txt");
    std::fs::write(&table, "-6.283185307179586 0\n-3.141592653589793 1\n0 0\n").unwrap();
    let csv = dir.join("out.csv");
    let out = lineshape(&[
        "spectrum",
        "--envelope",
        table.to_str().unwrap(),
        "--grid",
        "-5",
        "5",
        "11",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 12);

    std::fs::write(&table, "-1 1\n0 1\n").unwrap();
    let bad = lineshape(&["spectrum", "--envelope", table.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(lineshape(&["spectrum", "--grid", "0", "1", "1"]).status.code(), Some(2));
    assert_eq!(lineshape(&["spectrum", "--omega-ratio", "-3"]).status.code(), Some(2));
    assert_eq!(lineshape(&["bogus"]).status.code(), Some(2));
    let div = lineshape(&["moments", "--source", "lorentzian"]);
    assert_eq!(div.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&div.stderr).contains("divergent second moment"));
}

#[test]
fn moments_json() {
    let out = lineshape(&["moments", "--omega-ratio", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = v["dispersion_over_OmegaGamma"].as_f64().unwrap();
    assert!((c / 0.39 - 1.0).abs() < 0.05, "{c}");
}

#[test]
fn scenario_json_and_scaling() {
    let base: serde_json::Value = serde_json::from_slice(&lineshape(&["scenario"]).stdout).unwrap();
    let fast: serde_json::Value =
        serde_json::from_slice(&lineshape(&["scenario", "--omega-ratio", "20"]).stdout).unwrap();
    let (a, b) = (base["duration_s"].as_f64().unwrap(), fast["duration_s"].as_f64().unwrap());
    assert!((b / a - 0.5).abs() < 1e-14);
    let frac = base["lorentzian_tail_fraction"]["value"].as_f64().unwrap();
    assert!((frac - 0.0634510348611).abs() < 1e-10);
    let rate = base["dipole_rate"].as_f64().unwrap();
    assert!((rate / 1.3e7 - 1.0).abs() < 0.15);
    assert_eq!(lineshape(&["scenario", "--omega0", "0"]).status.code(), Some(2));
}

#[test]
fn decay_csv() {
    let out = lineshape(&["decay", "--source", "lorentzian", "--times", "0", "5", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma_t,phi"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] / (-v[0]).exp() - 1.0).abs() < 1e-4);
    }

    // rect source flattens at short times
    let out = lineshape(&["decay", "--omega-ratio", "100", "--times", "0", "0.001", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let phi: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(phi > (-0.001f64).exp());
}
