//! The report emitted by every subcommand, in text or JSON form.
//!
//! The JSON layout is versioned: the `schema` field names the layout, and
//! the shipped schema document (`schema/report-v1.json`) describes it. The
//! layout only gains fields within a version; renames or removals bump it.

use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "campo.report.v1";

/// A structured result: echoed inputs, named verdicts, optional certificate
/// payloads, and free-form diagnostics.
pub struct Report {
    pub command: &'static str,
    inputs: Vec<(String, String)>,
    verdicts: Vec<(String, Value)>,
    certificates: Option<Value>,
    diagnostics: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            inputs: Vec::new(),
            verdicts: Vec::new(),
            certificates: None,
            diagnostics: Vec::new(),
        }
    }

    /// Echo an input in canonical printed form.
    pub fn input(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.inputs.push((name.to_string(), value.to_string()));
        self
    }

    pub fn verdict_bool(&mut self, name: &str, value: bool) -> &mut Self {
        self.verdicts.push((name.to_string(), Value::Bool(value)));
        self
    }

    /// A verdict carrying an exact value in canonical printed form.
    pub fn verdict_exact(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.verdicts
            .push((name.to_string(), Value::String(value.to_string())));
        self
    }

    pub fn certificates(&mut self, payload: Value) -> &mut Self {
        self.certificates = Some(payload);
        self
    }

    pub fn diagnostic(&mut self, msg: impl ToString) -> &mut Self {
        self.diagnostics.push(msg.to_string());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut inputs = Map::new();
        for (k, v) in &self.inputs {
            inputs.insert(k.clone(), Value::String(v.clone()));
        }
        let mut verdicts = Vec::new();
        for (name, value) in &self.verdicts {
            verdicts.push(json!({ "name": name, "value": value }));
        }
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": Value::Object(inputs),
            "verdicts": Value::Array(verdicts),
            "certificates": self.certificates.clone().unwrap_or(Value::Null),
            "diagnostics": self.diagnostics,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("campo {}\n", self.command);
        for (k, v) in &self.inputs {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        for (name, value) in &self.verdicts {
            let shown = match value {
                Value::Bool(b) => b.to_string(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("verdict {name}: {shown}\n"));
        }
        if let Some(cert) = &self.certificates {
            out.push_str("certificates:\n");
            render_value(&mut out, cert, 1);
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                match inner {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(out, inner, depth + 1);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", plain(inner))),
                }
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                match inner {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render_value(out, inner, depth + 1);
                    }
                    _ => out.push_str(&format!("{pad}[{i}] {}\n", plain(inner))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", plain(v))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
