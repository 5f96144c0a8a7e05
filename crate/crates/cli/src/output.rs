//! Output envelopes. Every artifact carries the operator digest and the full
//! parameter echo; nothing time- or host-dependent is written.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::OperatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Operator identity and parameters shared by all outputs of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Echo {
    pub command: String,
    pub operator: Option<OperatorSpec>,
    pub digest: Option<String>,
    pub params: Value,
}

impl Echo {
    pub fn json(&self, status: &str, body_key: &str, body: Value) -> String {
        let mut v = json!({
            "command": self.command,
            "digest": self.digest,
            "operator": self.operator,
            "params": self.params,
            "status": status,
        });
        v[body_key] = body;
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    /// `# key=value` preamble for CSV artifacts.
    pub fn csv_preamble(&self) -> String {
        format!(
            "# command={}\n# digest={}\n# params={}\n",
            self.command,
            self.digest.as_deref().unwrap_or("none"),
            serde_json::to_string(&self.params).expect("params serialize")
        )
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
