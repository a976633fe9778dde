use std::process::{Command, Output};

fn packetlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packetlab"))
        .args(args)
        .env("PACKETLAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn css_json_reports_moments() {
    let o = packetlab(&["css", "--S", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mc = v["moments"]["meanCos"].as_f64().unwrap();
    assert!((mc - 0.697_774_657_964).abs() < 1e-9, "{mc}");
}

#[test]
fn non_integer_ell_is_rejected() {
    let o = packetlab(&["css", "--ell", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("integer"));
}

#[test]
fn invalid_grid_and_unknown_flag_exit_two() {
    assert_eq!(packetlab(&["--grid", "300", "css"]).status.code(), Some(2));
    assert_eq!(packetlab(&["css", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        packetlab(&["--truncation", "0", "css"]).status.code(),
        Some(2)
    );
}

#[test]
fn scan_csv_flags_integers() {
    let o = packetlab(&[
        "--truncation",
        "24",
        "--output",
        "csv",
        "scan",
        "--alpha-min",
        "-1",
        "--alpha-max",
        "1",
        "--alpha-step",
        "0.25",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,minImagDistance,floor,flag"));
    let flagged: Vec<f64> = lines
        .filter(|l| l.ends_with(",true"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(flagged, vec![-1.0, 0.0, 1.0]);
}

#[test]
fn seeded_output_is_byte_identical() {
    let args = [
        "--truncation",
        "12",
        "--seed",
        "9",
        "--output",
        "csv",
        "relations",
        "--count",
        "3",
    ];
    let (a, b) = (packetlab(&args), packetlab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 3 * 5);
    let other = packetlab(&[
        "--truncation",
        "12",
        "--seed",
        "10",
        "--output",
        "csv",
        "relations",
        "--count",
        "3",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("packetlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("floor.csv");
    let o = packetlab(&[
        "--truncation",
        "8",
        "--output",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "floor",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,floor,vertexFloor"));
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[1] - 0.5).abs() < 1e-12 && (row[2] - 0.5).abs() < 1e-12);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn state_file_round_trips_through_moments() {
    let dir = std::env::temp_dir().join(format!("packetlab-state-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("state.json");
    let css = packetlab(&["--truncation", "32", "css", "--S", "2", "--ell", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&css)).unwrap();
    std::fs::write(&path, v["state"].to_string()).unwrap();
    let o = packetlab(&[
        "--truncation",
        "32",
        "--output",
        "csv",
        "moments",
        "--state",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[0] - 1.0).abs() < 1e-12);
    assert!((row[2] - v["moments"]["meanCos"].as_f64().unwrap()).abs() < 1e-12);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn pencil_and_phase_min_csv_headers() {
    let o = packetlab(&[
        "--truncation",
        "8",
        "--output",
        "csv",
        "pencil",
        "--alpha",
        "0.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("re,im,imagAxisDistance,tailMass,residual,physical\n"));
    let o = packetlab(&["--output", "csv", "phase-min", "--winding", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("winding,deltaL,meanL,deltaLLinear,fitResidual,firstIntegralDefect,converged")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let dl: f64 = row[1].parse().unwrap();
    assert!((dl - 0.5).abs() < 1e-9);
    assert_eq!(row[6], "true");
}

#[test]
fn f_scan_single_target() {
    let o = packetlab(&["--output", "csv", "f-scan", "--target-dphi", "1.0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("deltaPhiP,f,converged"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let f: f64 = row[1].parse().unwrap();
    assert!(f > 1.0 && f < 4.375);
    assert_eq!(row[2], "true");
}
