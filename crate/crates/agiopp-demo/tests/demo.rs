use agiopp_demo::*;

const HERMITIAN: &str = r#"{"field": {"p": 2, "k": 4},
  "code": {"kummer": {"n": 5, "coefficients": [0, 1, 0, 0, 1], "degree": 15}},
  "challenge_field": {"p": 2, "k": 96}}"#;

#[test]
fn plan_view_lists_levels() {
    let v = plan_view(HERMITIAN).unwrap();
    let shape: Vec<(usize, usize)> = v.levels.iter().map(|l| (l.n, l.k)).collect();
    assert_eq!(shape, vec![(60, 10), (12, 4), (6, 2), (3, 1)]);
    assert!(v.violations.is_empty());
    assert!(plan_view("{}").is_err());
}

#[test]
fn honest_trace_accepts_and_far_trace_rejects() {
    let honest = fold_trace(HERMITIAN, 1, 0, 20).unwrap();
    assert!(honest.accept);
    assert!(honest.rounds.iter().all(|r| r.disagreements == 0));
    assert_eq!(honest.rounds.len(), 4);
    let far = fold_trace(HERMITIAN, 1, 20, 200).unwrap();
    assert_eq!(far.rounds[0].disagreements, 20);
    assert!(!far.accept);
    assert!(fold_trace(HERMITIAN, 1, 61, 1).is_err());
}

#[test]
fn curve_has_a_feasible_region() {
    let c = soundness_curve(HERMITIAN, 20).unwrap();
    assert!(c.len() > 50);
    let best = c.iter().filter_map(|p| p.t).min().unwrap();
    assert!(best <= 400, "{best}");
    // err_commit shrinks as epsilon grows
    assert!(c.first().unwrap().log2_err_commit < c.last().unwrap().log2_err_commit);
}

#[test]
fn wasm_exports_return_json() {
    let s = plan_summary_js(HERMITIAN).unwrap();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["rounds"], 3);
}
