use std::path::Path;
use std::process::{Command, Output};

use nearres::resonance::{count_triads, TriadOrdering};
use nearres::solver::{fit_slope, normalized_initial, SimConfig};
use nearres::{BandwidthSpec, TorusGeometry};
use serde_json::Value;

fn nearres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearres")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn read_manifest(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn triads_zero_mode_smoke() {
    let out = stdout(&nearres(&["triads", "--n", "8,0,0", "--mode", "zero"]));
    let r = rows(&out);
    assert_eq!(r[0], ["n1", "n2", "n3", "norm", "count", "bound", "ratio"]);
    assert_eq!(r.len(), 2);
    let g = TorusGeometry::unit();
    let want = count_triads(&g.adjust([8, 0, 0]), &g, &BandwidthSpec::zero(), TriadOrdering::N0).unwrap();
    assert_eq!(r[1][4].parse::<u64>().unwrap(), want);
}

#[test]
fn simulate_at_zero_time_returns_the_initial_datum() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("u.txt");
    let out = stdout(&nearres(&[
        "simulate",
        "--system",
        "nr",
        "--omega",
        "0",
        "--t-end",
        "0",
        "--radius",
        "4",
        "--snapshot",
        snap.to_str().unwrap(),
    ]));
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert_eq!(r[1][0].parse::<f64>().unwrap(), 0.0);
    let cfg = SimConfig::new(4.0, 0.0, 0.01, BandwidthSpec::theorem(1.0), 0.0, 1e-3);
    let u0 = normalized_initial(cfg.table().unwrap(), 1.0, 1.0, 7).unwrap();
    assert_eq!(std::fs::read_to_string(&snap).unwrap(), u0.to_text());
    assert_eq!(r[1][1].parse::<f64>().unwrap(), u0.hs_norm_sq(0.0));
}

#[test]
fn error_scan_two_rows_with_slope() {
    let out = stdout(&nearres(&["error-scan", "--omegas", "50,500", "--radius", "3", "--t-end", "0.2"]));
    let r = rows(&out);
    assert_eq!(r[0], ["omega", "dt", "sup_error", "slope"]);
    assert_eq!(r.len(), 3);
    let pts: Vec<(f64, f64)> =
        r[1..].iter().map(|row| (row[0].parse::<f64>().unwrap().ln(), row[2].parse::<f64>().unwrap().ln())).collect();
    let slope: f64 = r[1][3].parse().unwrap();
    assert_eq!(r[1][3], r[2][3]);
    assert!((slope - fit_slope(&pts).unwrap()).abs() < 1e-12);
    assert!(slope < 0.0);
}

#[test]
fn identical_argv_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = nearres(&["volume", "--n", "3,-2,5", "--delta", "0.05", "--samples", "2e5", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        (std::fs::read(&p).unwrap(), read_manifest(&dir.path().join(format!("{name}.manifest.json"))))
    };
    let (a, ma) = run("a.csv");
    let (b, mb) = run("b.csv");
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
    let keys: Vec<&String> = ma.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["subcommand", "flags", "seed", "version", "geometry", "timestamp", "output"]);
    assert_eq!(ma["flags"]["samples"], 200000);
    assert_eq!(ma["subcommand"], mb["subcommand"]);
    assert_eq!(ma["seed"], 3);
}

#[test]
fn floats_round_trip_with_seventeen_digits() {
    let out = stdout(&nearres(&["triads", "--n", "5,1,3", "--mode", "constant", "--delta", "0.05"]));
    let norm = &rows(&out)[1][3];
    let mantissa = norm.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(norm.parse::<f64>().unwrap(), 35f64.sqrt());
}

#[test]
fn counts_do_not_depend_on_thread_count() {
    let args = |t: &'static str| ["triads", "--n", "12,4,3", "--n", "20,0,7", "--mode", "theorem", "--threads", t];
    let a = stdout(&nearres(&args("1")));
    let b = stdout(&nearres(&args("3")));
    assert_eq!(a, b);
}

#[test]
fn scientific_notation_is_accepted() {
    let a = stdout(&nearres(&["jordan-check", "--trials", "2e1", "--adversarial", "5"]));
    let b = stdout(&nearres(&["jordan-check", "--trials", "20", "--adversarial", "5"]));
    assert_eq!(a, b);
    assert_eq!(rows(&a).len(), 21);
    assert!(rows(&a)[1..].iter().all(|r| r[7] == "true"));
}

#[test]
fn config_file_mirrors_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n": ["6,2,1", "9,0,4"], "mode": "constant", "delta": 0.3}"#).unwrap();
    let via_config = stdout(&nearres(&["triads", "--config", cfg.to_str().unwrap(), "--delta", "0.02"]));
    let direct = stdout(&nearres(&["triads", "--n", "6,2,1", "--n", "9,0,4", "--mode", "constant", "--delta", "0.02"]));
    assert_eq!(via_config, direct);

    std::fs::write(&cfg, r#"{"omegas": [50, 500], "radius": 3, "t-end": 0.1}"#).unwrap();
    let scan = stdout(&nearres(&["error-scan", "--config", cfg.to_str().unwrap()]));
    assert_eq!(rows(&scan).len(), 3);

    std::fs::write(&cfg, r#"{"no-such-flag": 1}"#).unwrap();
    let o = nearres(&["triads", "--n", "4,0,0", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(nearres(&["triads", "--n", "4,0,0", "--bogus"]).status.code(), Some(1));
    assert_eq!(nearres(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nearres(&["simulate", "--dt", "-1"]).status.code(), Some(1));
    assert_eq!(nearres(&["triads", "--n", "0,0,0"]).status.code(), Some(1));
    assert_eq!(nearres(&["triads", "--n", "4,0", "--mode", "zero"]).status.code(), Some(1));
    assert_eq!(nearres(&["volume", "--n", "1,0,0", "--samples", "1.5"]).status.code(), Some(1));
    assert_eq!(nearres(&["triads", "--n", "4,0,0", "--l1", "abc"]).status.code(), Some(1));
    let blowup = nearres(&[
        "simulate", "--system", "full", "--energy", "1e12", "--mu", "0", "--omega", "0", "--radius", "3", "--dt", "0.1",
        "--t-end", "5",
    ]);
    assert_eq!(blowup.status.code(), Some(2));
    assert_eq!(nearres(&["--help"]).status.code(), Some(0));
}

#[test]
fn count_lower_formula_matches() {
    let out = stdout(&nearres(&["count-lower", "--variant", "slow-fast", "--n-max", "16", "--delta", "0.01"]));
    for r in &rows(&out)[1..] {
        assert_eq!(r[2], r[3]);
        assert_eq!(r[5], "0");
    }
    let ff = stdout(&nearres(&["count-lower", "--variant", "fast-fast", "--n-max", "10", "--delta", "0.05"]));
    assert_eq!(rows(&ff).len(), 4);
    assert!(rows(&ff)[1..].iter().all(|r| r[3].is_empty() && r[5] == "0"));
}

#[test]
fn anisotropic_geometry_flags() {
    let out = stdout(&nearres(&["triads", "--n", "3,0,2", "--mode", "zero", "--l1", "1.5", "--l2", "2e-1"]));
    let g = TorusGeometry::parse("1.5", "0.2").unwrap();
    let want = count_triads(&g.adjust([3, 0, 2]), &g, &BandwidthSpec::zero(), TriadOrdering::N0).unwrap();
    assert_eq!(rows(&out)[1][4].parse::<u64>().unwrap(), want);
}
