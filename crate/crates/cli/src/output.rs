use std::path::Path;

use serde_json::{json, Value};

use predim::constructions::XCertificate;
use predim::{AlphaSpec, DimValue, ElemSet, Error, Structure};

pub const SCHEMA: u64 = 1;

pub struct Outcome {
    pub payload: Value,
    pub ok: bool,
}

impl Outcome {
    pub fn new(payload: Value, ok: bool) -> Self {
        Outcome { payload, ok }
    }

    pub fn ok(payload: Value) -> Self {
        Outcome::new(payload, true)
    }

    /// Embeds `s` in the payload and writes the requested files.
    pub fn with_structure(
        mut payload: Value,
        s: &Structure,
        outputs: &crate::Outputs,
        ok: bool,
    ) -> Result<Self, Failure> {
        payload["structure"] = predim::io::to_value(s);
        if let Some(path) = &outputs.out {
            write(path, &(predim::io::to_json(s) + "\n"))?;
        }
        if let Some(path) = &outputs.dot {
            write(path, &predim::io::to_dot(s)?)?;
        }
        Ok(Outcome::new(payload, ok))
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::BudgetExceeded(_) => (3, "budget"),
            Error::InsufficientPrecision { .. } => (4, "precision"),
            Error::Unachievable(_) | Error::NotStrong | Error::XRangeViolation(_) => (1, "verification"),
            _ => (2, "usage"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

/// `"p/q"` when α is exact, otherwise the affine form `p - q·α`.
pub fn dim_value(v: &DimValue, alpha: &AlphaSpec) -> Value {
    match v.value(alpha) {
        Some(r) => json!(predim::rational::format(&r)),
        None => json!({
            "p": predim::rational::format(&v.p),
            "q": predim::rational::format(&v.q),
            "text": v.to_string(),
        }),
    }
}

pub fn elems(s: &ElemSet) -> Value {
    json!(s.iter().collect::<Vec<_>>())
}

pub fn cert_json(x: &XCertificate, alpha: &AlphaSpec) -> Value {
    json!({
        "beta": dim_value(&x.beta, alpha),
        "beta_affine": x.beta,
        "size": x.size(),
        "a": x.pointed.a,
        "b": x.pointed.b,
        "e": x.pointed.e,
        "trace": x.trace,
        "membership": x.membership,
        "endpoints": x.endpoint_facts,
    })
}

/// Adds the `"schema"` version field.
pub fn with_schema(payload: Value) -> String {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(map) = payload {
        out.extend(map);
    } else {
        out.insert("result".into(), payload);
    }
    serde_json::to_string_pretty(&Value::Object(out)).expect("json")
}
