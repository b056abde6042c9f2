use serde_json::Value;

use termflow_web::{analyze, brute, example, normalize};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("bindings return JSON")
}

#[test]
fn diamond_analysis_is_laid_out_with_the_cut_on_the_outputs() {
    let v = parse(analyze(&example("diamond")));
    assert_eq!(v["exponent"], 4);
    assert_eq!(v["r"], 4);
    assert_eq!(v["full_rate"], true);
    assert_eq!(v["layers"], serde_json::json!([4, 4]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 8);
    assert!(v["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .all(|o| o["cut"] == true));
    assert!(v["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .all(|n| n["cut"] == false));
}

#[test]
fn shared_argument_is_cut_as_a_node() {
    let v = parse(analyze(&example("fg")));
    assert_eq!(v["exponent"], 1);
    let cut: Vec<&str> = v["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|n| n["cut"] == true)
        .map(|n| n["label"].as_str().unwrap())
        .collect();
    assert_eq!(cut, ["x"]);
}

#[test]
fn edges_point_from_argument_to_application() {
    let v = parse(analyze(&example("diamond")));
    let nodes = v["nodes"].as_array().unwrap();
    for e in v["edges"].as_array().unwrap() {
        let from = &nodes[e["from"].as_u64().unwrap() as usize];
        let to = &nodes[e["to"].as_u64().unwrap() as usize];
        assert!(from["layer"].as_u64() < to["layer"].as_u64());
    }
}

#[test]
fn brute_force_matches_known_values() {
    let v = parse(brute(&example("diamond"), 2));
    assert_eq!(v["value"], 10);
    assert_eq!(v["cut_bound"], 16);
    assert_eq!(v["witness"]["f"].as_array().unwrap().len(), 4);
}

#[test]
fn brute_force_refuses_large_spaces() {
    let v = parse(brute(&example("diamond"), 4));
    assert!(v["error"].as_str().unwrap().contains("budget"), "{v}");
}

#[test]
fn normalize_reports_merges_and_graph() {
    let v = parse(normalize(&example("collision")));
    assert_eq!(v["collisions"], 1);
    assert_eq!(v["classification"]["is_fnf"], true);
    assert!(v["dependency_graph"].is_object());
}

#[test]
fn errors_come_back_as_json() {
    let v = parse(analyze("dispersion {"));
    assert!(v["error"].is_string());
    let v = parse(normalize(&example("diamond")));
    assert!(v["error"].is_string());
}
