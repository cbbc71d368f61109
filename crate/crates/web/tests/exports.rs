use serde_json::Value;
use steiner_ladder_web::{ladder_json, orbit_json, solve_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn ladder_a0_reports_matching_lengths() {
    let v = parse(ladder_json("A0", 5.0, 0.5, 16, "", "upper").unwrap());
    let (c, m) = (v["closed_form"].as_f64().unwrap(), v["maxwell"].as_f64().unwrap());
    assert!((c - m).abs() < 1e-4);
    assert!(v["svg"].as_str().unwrap().starts_with("<?xml"));
    assert_eq!(v["class"], "full");
}

#[test]
fn ladder_a1_pads_short_words() {
    let v = parse(ladder_json("A1", 5.0, 0.5, 9, "1", "upper").unwrap());
    assert_eq!(v["blocks"].as_array().unwrap().len(), 4);
}

#[test]
fn ladder_rejects_bad_input() {
    assert!(ladder_json("A2", 5.0, 0.5, 9, "", "upper").is_err());
    assert!(ladder_json("A0", 30.0, 0.5, 9, "", "upper").is_err());
    assert!(ladder_json("A1", 5.0, 0.5, 9, "01x", "upper").is_err());
}

#[test]
fn orbit_period_two() {
    let v = parse(orbit_json(5.0, 0.5, 0.0, 5.0 / 6.0, 6).unwrap());
    let vals: Vec<f64> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(vals.len(), 6);
    assert!((vals[1] - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(v["status"]["kind"], "ok");
    assert!(v["svg"].is_string());
}

#[test]
fn orbit_escape_is_reported() {
    let v = parse(orbit_json(5.0, 0.5, 0.0, 0.9, 6).unwrap());
    assert_eq!(v["status"]["kind"], "escaped");
}

#[test]
fn solve_square_and_limits() {
    let v = parse(solve_json("[[0,0],[1,0],[1,1],[0,1]]").unwrap());
    assert!((v["length"].as_f64().unwrap() - (1.0 + 3f64.sqrt())).abs() < 1e-9);
    assert_eq!(v["co_optima"], 2);
    assert_eq!(parse(solve_json("[[0,0]]").unwrap())["length"], 0.0);
    assert!(solve_json("[[0,0],[1,1],[2,0],[3,1],[4,0],[5,1],[6,0],[7,1],[8,0]]").is_err());
    assert!(solve_json("not json").is_err());
}
