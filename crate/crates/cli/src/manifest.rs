use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::{Cli, Command};

pub const TOOL: &str = "degen-dt";

/// Everything needed to reproduce a report.
///
/// The copy embedded in a report leaves out the wall-clock time and thread
/// count so that reruns are byte-identical; both appear in the sidecar
/// `<out>.manifest.json`, or on stderr when writing to stdout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: Value,
    pub master_seed: Option<u64>,
    pub discards: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunManifest {
    pub fn new(command: &Command, master_seed: Option<u64>, discards: Option<u64>) -> Result<Self, CliError> {
        let mut tagged = serde_json::to_value(command)?;
        let name = tagged["command"].as_str().unwrap_or_default().to_string();
        Ok(Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: name,
            parameters: tagged["parameters"].take(),
            master_seed,
            discards,
            wall_clock_seconds: None,
            threads: None,
        })
    }

    /// The recorded subcommand.
    pub fn command(&self) -> Result<Command, CliError> {
        let tagged = serde_json::json!({ "command": self.command, "parameters": self.parameters });
        Ok(serde_json::from_value(tagged)?)
    }

    /// Reads a manifest from a report envelope or from a sidecar file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)?;
        if let Some(inner) = value.get_mut("manifest") {
            value = inner.take();
        }
        Ok(serde_json::from_value(value)?)
    }
}

pub enum Payload {
    /// Wrapped in `{"manifest": ..., "report": ...}`.
    Json(Value),
    /// Written as is.
    Text(String),
}

pub struct Output {
    pub command: Command,
    pub master_seed: Option<u64>,
    pub discards: Option<u64>,
    pub payload: Payload,
    /// Reported after the output is written.
    pub failure: Option<CliError>,
}

impl Output {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            master_seed: None,
            discards: None,
            payload: Payload::Text(String::new()),
            failure: None,
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes the output and its manifest, then surfaces any deferred failure.
pub fn emit(cli: &Cli, output: Output, elapsed: Duration) -> Result<(), CliError> {
    let manifest = RunManifest::new(&output.command, output.master_seed, output.discards)?;
    let body = match output.payload {
        Payload::Json(report) => {
            let envelope = serde_json::json!({ "manifest": &manifest, "report": report });
            serde_json::to_string_pretty(&envelope)? + "\n"
        }
        Payload::Text(text) => text,
    };
    let full = RunManifest {
        wall_clock_seconds: Some(elapsed.as_secs_f64()),
        threads: Some(rayon::current_num_threads()),
        ..manifest
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            let side = sidecar_path(path);
            std::fs::write(&side, serde_json::to_string_pretty(&full)? + "\n")
                .map_err(|e| CliError::io(format!("{}: {e}", side.display())))?;
        }
        None => {
            std::io::stdout().lock().write_all(body.as_bytes())?;
            eprintln!("{}", serde_json::to_string(&full)?);
        }
    }
    match output.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
