//! Reports and their text / JSON Lines renderings.

use serde_json::{json, Value as Json};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Canonical result of one statement: human text plus a structured twin.
#[derive(Clone, Debug, PartialEq)]
pub struct Payload {
    pub text: String,
    pub json: Json,
}

impl Payload {
    pub fn new(text: impl Into<String>, json: Json) -> Self {
        Self { text: text.into(), json }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok(Payload),
    Error(CliError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub line: usize,
    pub echo: String,
    pub status: Status,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        matches!(self.status, Status::Ok(_))
    }

    pub fn payload(&self) -> Option<&Payload> {
        match &self.status {
            Status::Ok(p) => Some(p),
            Status::Error(_) => None,
        }
    }

    pub fn to_json(&self) -> Json {
        let mut obj = json!({
            "line": self.line,
            "echo": self.echo,
            "diagnostics": self.diagnostics,
        });
        let map = obj.as_object_mut().expect("object");
        match &self.status {
            Status::Ok(p) => {
                map.insert("status".into(), json!("ok"));
                map.insert("text".into(), json!(p.text));
                map.insert("payload".into(), p.json.clone());
            }
            Status::Error(e) => {
                map.insert("status".into(), json!("error"));
                map.insert(
                    "error".into(),
                    json!({ "kind": e.kind.label(), "line": e.line, "col": e.col, "message": e.message }),
                );
            }
        }
        obj
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.echo.is_empty() {
            out.push_str("> ");
            out.push_str(&self.echo);
            out.push('\n');
        }
        for d in &self.diagnostics {
            out.push_str("note: ");
            out.push_str(d);
            out.push('\n');
        }
        match &self.status {
            Status::Ok(p) => {
                if !p.text.is_empty() {
                    out.push_str(&p.text);
                    out.push('\n');
                }
            }
            Status::Error(e) => {
                out.push_str("error: ");
                out.push_str(&e.to_string());
                out.push('\n');
            }
        }
        out
    }
}

pub fn render(reports: &[Report], format: Format) -> String {
    let mut out = String::new();
    for r in reports {
        match format {
            Format::Text => out.push_str(&r.to_text()),
            Format::Json => {
                out.push_str(&r.to_json().to_string());
                out.push('\n');
            }
        }
    }
    out
}
