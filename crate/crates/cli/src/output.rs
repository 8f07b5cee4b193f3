use std::io::Write;

use serde_json::{json, Value};

use spinduality::exact::SparsePoly;
use spinduality::report::Check;

/// Bumped whenever a JSON document changes shape.
pub const SCHEMA_VERSION: u32 = 1;

pub enum Outcome {
    Pass,
    Fail(Vec<String>),
}

impl Outcome {
    pub fn from_checks(checks: &[Check]) -> Outcome {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        if failed.is_empty() {
            Outcome::Pass
        } else {
            Outcome::Fail(failed)
        }
    }
}

pub fn emit(json: bool, command: &str, result: Value, text: &str) {
    let body = if json {
        let doc = json!({"schema_version": SCHEMA_VERSION, "command": command, "result": result});
        serde_json::to_string_pretty(&doc).expect("json values serialize")
    } else {
        text.to_string()
    };
    // a closed pipe (`| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", body);
}

pub fn checks_json(checks: &[Check]) -> Value {
    json!({
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks,
    })
}

/// Terms as `[coefficient, [exponents]]`, in the polynomial's sorted order.
pub fn poly_json(p: &SparsePoly) -> Value {
    let terms: Vec<Value> = p.terms().map(|(e, c)| json!([c.to_string(), e])).collect();
    json!({"nvars": p.nvars(), "terms": terms})
}
