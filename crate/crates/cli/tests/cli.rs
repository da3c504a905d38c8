//! End-to-end runs of the `kleinian` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinian")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn periods_json_has_the_lattice() {
    let o = run(&["periods", "23.2.a.a", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["genus"], 2);
    for key in ["omega", "omega_prime", "Omega", "P", "elementary_divisors"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let p11: f64 = v["P"][0][0][0].as_str().unwrap().parse().unwrap();
    assert!((p11 - 3.741508).abs() < 1e-6);
}

#[test]
fn unknown_orbit_exits_2() {
    let o = run(&["periods", "9999.2.x.x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("OrbitNotFound"));
}

#[test]
fn level_27_coefficients_are_recognized() {
    let o = run(&["coeffs", "27.2.a.a", "--nmax", "17", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    let rationals: Vec<(i64, String)> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|e| Some((e["n"].as_i64()?, e["rational"].as_str()?.to_string())))
        .filter(|(_, r)| r != "0")
        .collect();
    let want = [(-1, "1"), (2, "1/2"), (5, "-701/5"), (8, "1407/4"), (11, "-40776/11"), (14, "37961/2"), (17, "-2125098/17")];
    let want: Vec<(i64, String)> = want.iter().map(|(n, r)| (*n, r.to_string())).collect();
    assert_eq!(rationals, want);
}

#[test]
fn atkin_lehner_target_prints_hauptmodul_ratios() {
    let o = run(&["coeffs", "23.2.a.a", "--target", "al", "23", "--nmax", "6", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for comp in v.as_array().unwrap() {
        let r: Vec<f64> = comp["ratios"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        for (got, want) in r[1..].iter().zip([4.0, 7.0, 13.0, 19.0, 33.0, 47.0]) {
            assert!((got - want).abs() < 1e-4);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let a = run(&["coeffs", "27.2.a.a", "--nmax", "8"]);
    let b = run(&["coeffs", "27.2.a.a", "--nmax", "8", "--sequential"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn bad_target_exits_2() {
    let o = run(&["coeffs", "23.2.a.a", "--target", "component", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_on_level_27() {
    let o = run(&["verify", "27.2.a.a"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn verify_rejects_a_corrupted_orbit_with_exit_4() {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("corrupt-27.json");
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/orbits/27.2.a.a.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["an"][6][0] = serde_json::json!(5);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("periods-27.json");
    let o = run(&["periods", "27.2.a.a", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["label"], "27.2.a.a");
}
