use std::time::Duration;

use glulib::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Largest integer every JSON consumer represents exactly.
pub const MAX_SAFE_INT: u64 = 1 << 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Two independent computations disagreed.
    Mismatch,
    Error,
}

/// Envelope of every command's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub status: Status,
    pub input: Value,
    pub result: Value,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Value>,
    #[serde(skip)]
    pub text: String,
}

impl Report {
    pub fn new(command: &str, input: Value) -> Self {
        Report {
            tool: "glulib".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            status: Status::Ok,
            input,
            result: Value::Null,
            warnings: Vec::new(),
            timings_ms: None,
            text: String::new(),
        }
    }

    pub fn error(command: &str, input: Value, err: &Error) -> Self {
        let mut r = Report::new(command, input);
        r.status = Status::Error;
        r.result = serde_json::json!({
            "kind": error_kind(err),
            "message": err.to_string(),
        });
        r.text = format!("error: {err}\n");
        r
    }

    pub fn timing(&mut self, name: &str, d: Duration) {
        let t = self.timings_ms.get_or_insert_with(|| Value::Object(Default::default()));
        t[name] = Value::from(d.as_millis() as u64);
    }

    /// Pretty JSON with large integers as strings, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        stringify_large(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Argument(_) => "invalid_input",
        Error::Domain(_) => "invalid_input",
        Error::Unsupported(_) => "unsupported",
        Error::Resource { .. } => "resource",
        Error::Overflow(_) => "overflow",
        Error::Invariant(_) => "invariant",
    }
}

/// 0 success, 1 invalid input, 2 resource limits, 3 invariant failures.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Argument(_) | Error::Domain(_) | Error::Unsupported(_) => 1,
        Error::Resource { .. } | Error::Overflow(_) => 2,
        Error::Invariant(_) => 3,
    }
}

/// Replaces integers of magnitude above 2^53 by their decimal strings.
pub fn stringify_large(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let big = n.as_u64().map(|x| x > MAX_SAFE_INT).unwrap_or(false)
                || n.as_i64().map(|x| x.unsigned_abs() > MAX_SAFE_INT).unwrap_or(false);
            if big {
                *v = Value::String(n.to_string());
            }
        }
        Value::Array(a) => a.iter_mut().for_each(stringify_large),
        Value::Object(o) => o.values_mut().for_each(stringify_large),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn large_numbers_become_strings() {
        let mut v = json!({"a": [1u64, 1u64 << 60], "b": -(1i64 << 54), "c": 9007199254740992u64});
        stringify_large(&mut v);
        assert_eq!(v, json!({"a": [1, "1152921504606846976"], "b": "-18014398509481984", "c": 9007199254740992u64}));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Argument("x".into())), 1);
        assert_eq!(exit_code(&Error::Unsupported(vec![1])), 1);
        assert_eq!(
            exit_code(&Error::Resource {
                what: "x".into(),
                attempted: 2,
                limit: 1
            }),
            2
        );
        assert_eq!(exit_code(&Error::Invariant("x".into())), 3);
    }

    #[test]
    fn json_round_trips() {
        let mut r = Report::new("analyze", json!({"gens": [3, 5]}));
        r.result = json!({"frobenius": 7, "huge": u64::MAX});
        r.warnings.push("w".into());
        let s = r.to_json();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_json(), s);
        assert_eq!(back.result["huge"], json!(u64::MAX.to_string()));
    }
}
