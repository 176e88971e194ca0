//! Canonical JSON exchange format and DOT export.
//!
//! ```json
//! {"signature":{"E":2},"elements":[0,1,2],"instances":{"E":[[0,1],[1,2]]}}
//! ```
//! Keys, ids and instance lists are sorted, so equal structures serialize to
//! identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{Elem, Signature, Structure};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    signature: BTreeMap<String, usize>,
    elements: Vec<Elem>,
    #[serde(default)]
    instances: BTreeMap<String, Vec<Vec<Elem>>>,
}

/// Canonical JSON value of a structure.
pub fn to_value(s: &Structure) -> serde_json::Value {
    let wire = Wire {
        signature: s.signature().symbols().map(|(k, a)| (k.to_string(), a)).collect(),
        elements: s.elements().iter().copied().collect(),
        instances: s
            .signature()
            .symbols()
            .map(|(k, _)| (k.to_string(), s.instances_of(k).map(<[Elem]>::to_vec).collect()))
            .collect(),
    };
    serde_json::to_value(wire).expect("structure serializes")
}

/// Canonical compact JSON text.
pub fn to_json(s: &Structure) -> String {
    to_value(s).to_string()
}

pub fn from_value(v: serde_json::Value) -> Result<Structure> {
    let wire: Wire = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    let sig = Signature::new(wire.signature.iter().map(|(k, &a)| (k.clone(), a)))?;
    let mut s = Structure::discrete(sig, wire.elements.iter().copied());
    if s.len() != wire.elements.len() {
        return Err(Error::Parse("duplicate element ids".into()));
    }
    for (sym, list) in &wire.instances {
        for t in list {
            s.add_instance(sym, t.iter().copied())?;
        }
    }
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Structure> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_value(v)
}

/// Graphviz rendering; every symbol must be binary. With several symbols
/// each edge is labelled by its symbol.
pub fn to_dot(s: &Structure) -> Result<String> {
    if s.signature().symbols().any(|(_, a)| a != 2) {
        return Err(Error::NotAGraph);
    }
    let labelled = s.signature().symbols().count() > 1;
    let mut out = String::from("graph G {\n");
    for e in s.elements() {
        let _ = writeln!(out, "  {e};");
    }
    for (sym, t) in s.instances() {
        if labelled {
            let _ = writeln!(out, "  {} -- {} [label=\"{sym}\"];", t[0], t[1]);
        } else {
            let _ = writeln!(out, "  {} -- {};", t[0], t[1]);
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_roundtrip() {
        let s = Structure::graph(4, &[(2, 1), (0, 3), (1, 0)]).unwrap();
        let text = to_json(&s);
        assert_eq!(
            text,
            r#"{"elements":[0,1,2,3],"instances":{"E":[[0,1],[0,3],[1,2]]},"signature":{"E":2}}"#
        );
        let back = from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(from_json("{"), Err(Error::Parse(_))));
        let unknown = r#"{"signature":{"E":2},"elements":[0,1],"instances":{"E":[[0,5]]}}"#;
        assert_eq!(from_json(unknown), Err(Error::UnknownElement(5)));
        let arity = r#"{"signature":{"E":2},"elements":[0,1,2],"instances":{"E":[[0,1,2]]}}"#;
        assert!(matches!(from_json(arity), Err(Error::ArityMismatch { .. })));
        let dup = r#"{"signature":{"E":2},"elements":[0,0]}"#;
        assert!(matches!(from_json(dup), Err(Error::Parse(_))));
    }

    #[test]
    fn dot_output() {
        let s = Structure::graph(2, &[(0, 1)]).unwrap();
        assert_eq!(to_dot(&s).unwrap(), "graph G {\n  0;\n  1;\n  0 -- 1;\n}\n");
        let sig = Signature::new([("R", 3)]).unwrap();
        assert_eq!(to_dot(&Structure::new(sig)), Err(Error::NotAGraph));
    }
}
