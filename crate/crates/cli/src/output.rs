//! State input and JSON output with an embedded run manifest.

use std::io::Read;
use std::time::Duration;

use entangle_core::tensor::io::state_from_json;
use entangle_core::{Error, PureState};
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &'static str, params: Value, seed: Option<u64>, elapsed: Duration) -> Self {
        Self {
            command,
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_seconds: elapsed.as_secs_f64(),
        }
    }
}

/// `payload` as an object with `manifest` added. Non-object payloads go
/// under `result`.
pub fn with_manifest(payload: Value, manifest: RunManifest) -> Value {
    let mut obj = match payload {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert(
        "manifest".into(),
        serde_json::to_value(manifest).expect("manifest serializes"),
    );
    Value::Object(obj)
}

pub fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    }
    .expect("json renders")
}

/// Reads a state from a path or `-` for standard input. Besides a bare state
/// file this accepts any output of this tool that carries a `state` field,
/// and ignores an embedded `manifest`.
pub fn read_state(path: &str) -> Result<PureState, Error> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?
    };
    parse_state(&text)
}

pub fn parse_state(text: &str) -> Result<PureState, Error> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut value = match value {
        Value::Object(mut m) => {
            m.remove("manifest");
            match m.remove("state") {
                Some(inner) => inner,
                None => Value::Object(m),
            }
        }
        other => other,
    };
    if let Value::Object(m) = &mut value {
        m.remove("manifest");
    }
    state_from_json(&value.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_wrapped_states() {
        let bare = r#"{"dims":[2],"amps":[[1,0],[0,0]]}"#;
        let wrapped = r#"{"manifest":{"command":"catalog"},"dims":[2],"amps":[[1,0],[0,0]]}"#;
        let nested = r#"{"overlap":1.0,"state":{"dims":[2],"amps":[[1,0],[0,0]]}}"#;
        let a = parse_state(bare).unwrap();
        assert_eq!(parse_state(wrapped).unwrap(), a);
        assert_eq!(parse_state(nested).unwrap(), a);
        assert!(parse_state(r#"{"dims":[2],"amps":[[1,0]]}"#).is_err());
        assert!(parse_state(r#"{"dims":[2],"amps":[[1,0],[0,0]],"x":1}"#).is_err());
    }
}
