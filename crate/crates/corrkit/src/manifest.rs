use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

/// Written next to every command's output. Timestamps live only here, so
/// the outputs themselves stay byte-reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub version: String,
    pub started_unix: u64,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, started: SystemTime, elapsed: Duration) -> Self {
        RunManifest {
            command: command.into(),
            config,
            seeds: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix: started
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
            duration_secs: elapsed.as_secs_f64(),
        }
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.into(), value);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")
    }
}
