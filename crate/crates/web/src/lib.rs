//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exported: analyzing a program against a scenario,
//! producing sweep CSV, and exploring the refined metric for a single pair of
//! beliefs. Each has a plain Rust form returning `Result<String, String>` so
//! it can be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qif_core::dsl::{lint, parse_program};
use qif_core::extended::ExtendedReal;
use qif_core::metrics::{analyze, multiplier, q_double_bounds, q_double_value, q_prime_value, q_value, search_effort};
use qif_core::report::render_report;
use qif_core::scenario::Scenario;
use qif_core::sweep::{sweep_csv, SweepKind};

/// Runs `scenario` against the program `source`. The scenario's `program`
/// line may be omitted. Returns `{ "report": ..., "text": ..., "warnings": [...] }`.
pub fn analyze_json(source: &str, scenario: &str) -> Result<String, String> {
    let program = parse_program(source).map_err(|e| format!("program: {e}"))?;
    let text = if scenario.lines().any(|l| l.trim_start().starts_with("program")) {
        scenario.to_string()
    } else {
        format!("program = inline\n{scenario}")
    };
    let scenario = Scenario::parse(&text).map_err(|e| format!("scenario: {e}"))?;
    let warnings = lint(&program);
    let experiment = scenario.to_experiment(program).map_err(|e| format!("scenario: {e}"))?;
    let report = analyze(&experiment, scenario.observation_state().as_ref()).map_err(|e| e.to_string())?;
    let out = json!({ "text": render_report(&report), "report": report, "warnings": warnings });
    Ok(out.to_string())
}

pub fn sweep_text(kind: &str, steps: usize) -> Result<String, String> {
    let kind: SweepKind = kind.parse().map_err(|e: qif_core::sweep::SweepError| e.to_string())?;
    sweep_csv(kind, steps).map_err(|e| e.to_string())
}

/// Every metric that depends only on the beliefs in the true high state and
/// the secret size, plus the flow-to-likelihood inversion.
pub fn explore_json(pre: f64, post: f64, eta: f64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&pre) || !(0.0..=1.0).contains(&post) {
        return Err("beliefs must lie in [0, 1]".into());
    }
    let q = q_value(pre, post).ok();
    let qd = q_double_value(pre, post, eta).map_err(|e| e.to_string())?;
    let bounds = q_double_bounds(pre, eta).map_err(|e| e.to_string())?;
    let m = multiplier(qd, eta, pre).map_err(|e| e.to_string())?;
    let q_search = q.map(|q| search_effort(eta, q));
    let out = json!({
        "q": q,
        "q_prime": q_prime_value(pre, post),
        "q_double_prime": qd,
        "range_q_double": bounds,
        "range_q_hi": if pre == 0.0 { ExtendedReal::PosInf } else { ExtendedReal::Finite(-pre.log2()) },
        "post_from_flow": m.post_at_reality,
        "multiplier": m.fold_increase,
        "search_q_double": search_effort(eta, ExtendedReal::Finite(qd)),
        "search_q": q_search,
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn analyze_scenario(source: &str, scenario: &str) -> Result<String, JsValue> {
    analyze_json(source, scenario).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep(kind: &str, steps: usize) -> Result<String, JsValue> {
    sweep_text(kind, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explore(pre: f64, post: f64, eta: f64) -> Result<String, JsValue> {
    explore_json(pre, post, eta).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const PWC: &str = "high p in {A, B, C}; low g in {A, B, C}; output a in {0, 1};
        if p == g then a := 1 else a := 0 end";

    #[test]
    fn analyze_without_program_line() {
        let scenario = "reality = C\nlow.g = A\nbelief.A = 0.98\nbelief.B = 0.01\nbelief.C = 0.01\n";
        let v: Value = serde_json::from_str(&analyze_json(PWC, scenario).unwrap()).unwrap();
        assert!((v["report"]["q_double_prime"].as_f64().unwrap() - 0.9044).abs() < 5e-4);
        assert!(v["text"].as_str().unwrap().contains("NOT size-consistent"));
    }

    #[test]
    fn analyze_reports_errors() {
        assert!(analyze_json("high p in {A}; p := ", "reality = A\nbelief.A = 1\n")
            .unwrap_err()
            .starts_with("program"));
        assert!(analyze_json(PWC, "reality = Z\nlow.g = A\nbelief.A = 1\n").is_err());
    }

    #[test]
    fn explore_worked_example() {
        let v: Value = serde_json::from_str(&explore_json(0.01, 0.5, 3f64.log2()).unwrap()).unwrap();
        assert!((v["q"].as_f64().unwrap() - 5.6438).abs() < 5e-4);
        assert!((v["post_from_flow"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(v["search_q"]["status"], "undefined");
        assert_eq!(v["search_q_double"]["status"], "defined");
        assert!(explore_json(1.5, 0.5, 1.0).is_err());
        assert!(explore_json(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn sweep_matches_core() {
        assert!(sweep_text("metric", 11).unwrap().starts_with("post,Q,"));
        assert!(sweep_text("nope", 11).is_err());
    }
}
