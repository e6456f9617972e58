//! Writing outputs with the run configuration embedded.
//!
//! Text and CSV outputs start with `# config <json>` (and, unless disabled,
//! `# generated_at_unix <secs>`); the readers skip `#` lines. JSON outputs
//! carry the same data under `config` and `generated_at_unix`.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub struct Emitter {
    config: Value,
    timestamp: Option<u64>,
}

impl Emitter {
    pub fn new(command: &str, timestamp: bool) -> Self {
        let mut config = Map::new();
        config.insert("command".into(), command.into());
        Emitter {
            config: Value::Object(config),
            timestamp: timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
            }),
        }
    }

    /// Records the subcommand name and its arguments.
    pub fn configure(&mut self, sub: &str, args: &impl Serialize) {
        let obj = self.config.as_object_mut().expect("config is an object");
        obj.insert("subcommand".into(), sub.into());
        obj.insert(
            "args".into(),
            serde_json::to_value(args).expect("arguments serialize"),
        );
    }

    pub fn comment_header(&self) -> String {
        let mut out = format!("# config {}\n", self.config);
        if let Some(t) = self.timestamp {
            out.push_str(&format!("# generated_at_unix {t}\n"));
        }
        out
    }

    /// `body` with the header prepended.
    pub fn text(&self, body: &str) -> String {
        let mut out = self.comment_header();
        out.push_str(body);
        out
    }

    /// A JSON object holding `config`, the timestamp, and `fields`.
    pub fn json(&self, fields: Map<String, Value>) -> String {
        let mut obj = Map::new();
        obj.insert("config".into(), self.config.clone());
        if let Some(t) = self.timestamp {
            obj.insert("generated_at_unix".into(), t.into());
        }
        obj.extend(fields);
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
        s.push('\n');
        s
    }
}

/// Writes to `path`, or stdout when absent.
pub fn write_out(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn fields(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
