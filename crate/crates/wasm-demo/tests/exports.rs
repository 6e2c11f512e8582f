use serde_json::Value;
use trains_wasm_demo::{correct, map_json, parse, plan};

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn map_has_cities_and_tracks() {
    let m = json(&map_json());
    assert!(m["cities"]["DETROIT"]["x"].is_number());
    assert!(!m["tracks"].as_array().unwrap().is_empty());
}

#[test]
fn parse_reports_acts_and_skipped_words() {
    let seq = json(&parse("okay now I take the last train in go from Albany to is"));
    assert_eq!(seq["acts"].as_array().unwrap().len(), 3);
    assert_eq!(seq["skipped"], serde_json::json!([11, 12]));
}

#[test]
fn correct_restores_the_via_line() {
    assert_eq!(correct("GO B_X SYRACUSE AT BUFFALO"), "GO VIA SYRACUSE VIA BUFFALO");
}

#[test]
fn plan_returns_a_route_or_an_error() {
    let ok = json(&plan("Albany", "milwaukee", "Buffalo", 1));
    let path: Vec<&str> = ok["path"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(path.first(), Some(&"ALBANY"));
    assert_eq!(path.last(), Some(&"MILWAUKEE"));
    assert!(path.contains(&"BUFFALO"));
    assert!(ok["hours"].as_u64().unwrap() > 0);

    let far = json(&plan("Detroit", "Washington", "", 1));
    assert!(far["error"].as_str().unwrap().contains("hops"));
    assert!(json(&plan("Detroit", "Atlantis", "", 1))["error"].is_string());
}
