use advbound_demo::{grover_progress, search_bounds_curve, young_census};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn curve_has_all_methods() {
    let v = parse(search_bounds_curve(16, 5));
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    assert!((pts[0]["additive"].as_f64().unwrap() - 15f64.sqrt()).abs() < 1e-9);
    let last = &pts[4];
    assert_eq!(last["additive"].as_f64().unwrap(), 0.0);
    assert!(last["hybrid"].as_f64().unwrap() > 0.0);
}

#[test]
fn census_totals_injections() {
    let v = parse(young_census(3, 5));
    assert_eq!(v["total"], "60");
    let bad = v["irreps"].as_array().unwrap().iter().filter(|e| e["bad"] == true).count();
    assert_eq!(bad, 3);
}

#[test]
fn grover_reaches_certainty_on_four() {
    let v = parse(grover_progress(4, 1));
    let s = v["success"].as_array().unwrap();
    assert!((s[1].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["pass"], true);
    assert_eq!(v["progress"].as_array().unwrap().len(), 3);
    assert_eq!(v["calls_per_iteration"], 2);
}

#[test]
fn errors_are_json() {
    let v = parse(search_bounds_curve(1, 5));
    assert!(v["error"].is_string());
    assert!(parse(young_census(4, 2))["error"].is_string());
}
