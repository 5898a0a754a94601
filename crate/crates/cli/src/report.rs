use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One per invocation; printed as JSON with `--json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub result: serde_json::Value,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION"),
            seed: None,
            checks: Vec::new(),
            artifacts: Vec::new(),
            result: serde_json::Value::Null,
            text: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for l in &self.text {
            out.push_str(l);
            out.push('\n');
        }
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("{tag} {}\n", c.name));
            } else {
                out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
            }
        }
        for a in &self.artifacts {
            out.push_str(&format!("wrote {a}\n"));
        }
        out
    }
}
