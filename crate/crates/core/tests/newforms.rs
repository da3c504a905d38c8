//! Orbit loading, validation and LMFDB record parsing on canned records.

use kleinian::newforms::{bundled_labels, eta_product, load_orbit, orbit_from_records};
use kleinian::Error;
use serde_json::json;

#[test]
fn bundled_orbits_load_and_validate() {
    for label in bundled_labels() {
        let o = load_orbit(label).unwrap();
        o.validate().unwrap();
        assert_eq!(o.label, label);
    }
}

#[test]
fn unknown_label_is_reported() {
    assert!(matches!(load_orbit("9999.2.x.x"), Err(Error::OrbitNotFound(_))));
}

#[test]
fn corrupted_orbit_fails_validation() {
    let mut o = load_orbit("23.2.a.a").unwrap();
    o.an[4][1] += 1;
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("corrupt-23.json");
    std::fs::write(&path, o.to_json().unwrap()).unwrap();
    assert!(load_orbit(path.to_str().unwrap()).is_err());
}

#[test]
fn rational_record_expands_to_the_eta_product() {
    // 11.2.a.a is eta(tau)^2 eta(11 tau)^2
    let eta = eta_product(&[(1, 2), (11, 2)], 80).unwrap();
    let traces: Vec<i64> = (1..=80).map(|n| eta.coeff(n) as i64).collect();
    let rec = json!({
        "label": "11.2.a.a", "level": 11, "weight": 2, "dim": 1,
        "atkin_lehner_eigenvals": [[11, -1]], "traces": traces,
    });
    let o = orbit_from_records(&rec, None, 60).unwrap();
    assert_eq!(o.al_sign(11), Some(-1));
    for n in 1..=60 {
        assert_eq!(o.an[n - 1], vec![eta.coeff(n as i64) as i64], "a_{n}");
    }
}

#[test]
fn hecke_field_record_reproduces_the_bundled_orbit() {
    let bundled = load_orbit("23.2.a.a").unwrap();
    let primes: Vec<usize> = (2..=100).filter(|&p| (2..p).all(|d| p % d != 0)).collect();
    let ap: Vec<&Vec<i64>> = primes.iter().map(|&p| &bundled.an[p - 1]).collect();
    let newform = json!({
        "label": "23.2.a.a", "level": 23, "weight": 2, "dim": 2,
        "atkin_lehner_eigenvals": [[23, -1]],
    });
    let hecke = json!({ "field_poly": bundled.field_poly, "ap": ap });
    let o = orbit_from_records(&newform, Some(&hecke), 100).unwrap();
    assert_eq!(o.field_poly, bundled.field_poly);
    assert_eq!(o.an[..100], bundled.an[..100]);
}

#[test]
fn higher_weight_records_are_unsupported() {
    let rec = json!({ "label": "11.4.a.a", "level": 11, "weight": 4, "dim": 1, "traces": [1, 2] });
    assert!(matches!(orbit_from_records(&rec, None, 2), Err(Error::UnsupportedOrbit(_))));
}
