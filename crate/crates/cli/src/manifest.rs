use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use hardedge::verify::CriterionReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// JSON record of one run. `parameters` holds the fully resolved arguments,
/// so passing the manifest back as `--config` repeats the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub command_line: Vec<String>,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<CriterionReport>>,
}

pub struct Recorder {
    command: String,
    out: PathBuf,
    started: Instant,
    started_unix: f64,
    outputs: Vec<String>,
}

impl Recorder {
    pub fn new(command: &str, out: &Path) -> Result<Self> {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        Ok(Recorder {
            command: command.into(),
            out: out.into(),
            started: Instant::now(),
            started_unix,
            outputs: vec![],
        })
    }

    /// Writes `name` under the output directory and records it.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn finish<P: Serialize>(
        self,
        parameters: &P,
        seed: Option<u64>,
        criteria: Option<Vec<CriterionReport>>,
    ) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: self.command.clone(),
            command_line: std::env::args().collect(),
            parameters: serde_json::to_value(parameters)?,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            outputs: self.outputs,
            started_unix: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            criteria,
        };
        let path = self.out.join(format!("{}.manifest.json", self.command));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}
