//! Report envelopes, content digests and the report schema.
//!
//! Field order in every envelope is fixed by the struct definitions. The
//! content digest is SHA-256 over the compact JSON of the envelope with its
//! keys sorted and `command_echo`, `timing_ms` and `content_digest` removed,
//! so it depends only on what was computed.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::verify::{Extreme, ScanParameters, TheoremId, VerificationReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const DIGEST_EXCLUDED: [&str; 3] = ["command_echo", "timing_ms", "content_digest"];

/// SHA-256 (hex) of a serialized envelope, ignoring the excluded fields.
pub fn content_digest<T: Serialize>(envelope: &T) -> String {
    let mut value = serde_json::to_value(envelope).expect("reports serialize");
    if let Value::Object(map) = &mut value {
        for key in DIGEST_EXCLUDED {
            map.remove(key);
        }
    }
    // serde_json's default map is ordered by key.
    let bytes = serde_json::to_vec(&value).expect("reports serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// The `verify` report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEnvelope {
    pub tool_version: String,
    pub command_echo: String,
    pub theorem: TheoremId,
    pub parameters: ScanParameters,
    pub seed: Option<u64>,
    pub instances_checked: u64,
    pub violations: Vec<String>,
    pub extremes: Option<Extreme>,
    pub ok: bool,
    pub timing_ms: Option<u64>,
    pub content_digest: String,
}

impl VerifyEnvelope {
    pub fn new(report: VerificationReport, command_echo: String, timing_ms: Option<u64>) -> Self {
        let mut env = VerifyEnvelope {
            tool_version: TOOL_VERSION.to_string(),
            command_echo,
            theorem: report.theorem,
            seed: report.parameters.seed,
            parameters: report.parameters,
            instances_checked: report.instances_checked,
            violations: report.violations,
            extremes: report.extremes,
            ok: report.ok,
            timing_ms,
            content_digest: String::new(),
        };
        env.content_digest = content_digest(&env);
        env
    }

    pub fn recomputed_digest(&self) -> String {
        content_digest(self)
    }
}

/// Envelope for every other subcommand's JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool_version: String,
    pub command_echo: String,
    pub kind: &'static str,
    pub result: T,
    pub timing_ms: Option<u64>,
    pub content_digest: String,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(
        kind: &'static str,
        result: T,
        command_echo: String,
        timing_ms: Option<u64>,
    ) -> Self {
        let mut env = Envelope {
            tool_version: TOOL_VERSION.to_string(),
            command_echo,
            kind,
            result,
            timing_ms,
            content_digest: String::new(),
        };
        env.content_digest = content_digest(&env);
        env
    }
}

/// JSON Schema for [`VerifyEnvelope`].
pub fn report_schema() -> Value {
    let nullable_u64 = json!({"type": ["integer", "null"], "minimum": 0});
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "sumset-vc verification report",
        "version": TOOL_VERSION,
        "type": "object",
        "additionalProperties": false,
        "required": [
            "tool_version", "command_echo", "theorem", "parameters", "seed",
            "instances_checked", "violations", "extremes", "ok", "timing_ms",
            "content_digest"
        ],
        "properties": {
            "tool_version": {"type": "string", "const": TOOL_VERSION},
            "command_echo": {"type": "string"},
            "theorem": {
                "type": "string",
                "enum": TheoremId::ALL.iter().map(|t| t.name()).collect::<Vec<_>>()
            },
            "parameters": {
                "type": "object",
                "additionalProperties": false,
                "required": ["n", "p", "mode", "seed", "samples"],
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "p": nullable_u64,
                    "mode": {"type": "string", "enum": ["exhaustive", "random", "instance"]},
                    "seed": nullable_u64,
                    "samples": nullable_u64
                }
            },
            "seed": nullable_u64,
            "instances_checked": {"type": "integer", "minimum": 1},
            "violations": {"type": "array", "items": {"type": "string"}},
            "extremes": {
                "type": ["object", "null"],
                "additionalProperties": false,
                "required": ["instance", "lhs", "rhs"],
                "properties": {
                    "instance": {"type": "string"},
                    "lhs": {"type": "integer", "minimum": 0},
                    "rhs": {"type": "integer", "minimum": 0}
                }
            },
            "ok": {"type": "boolean"},
            "timing_ms": nullable_u64,
            "content_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"}
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::exhaustive_scan;

    #[test]
    fn digest_ignores_echo_and_timing() {
        let r = exhaustive_scan(TheoremId::Sauer, 2, None).unwrap();
        let a = VerifyEnvelope::new(r.clone(), "verify a".into(), None);
        let b = VerifyEnvelope::new(r, "verify b".into(), Some(12));
        assert_eq!(a.content_digest, b.content_digest);
        assert_eq!(a.recomputed_digest(), a.content_digest);
        let mut c = a.clone();
        c.instances_checked += 1;
        assert_ne!(c.recomputed_digest(), a.content_digest);
    }

    #[test]
    fn schema_requires_violations_array() {
        let s = report_schema();
        let required = s["required"].as_array().unwrap();
        assert!(required.iter().any(|v| v == "violations"));
        assert_eq!(s["properties"]["violations"]["type"], "array");
        assert_eq!(s["version"], TOOL_VERSION);
    }
}
