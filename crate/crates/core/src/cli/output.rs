use std::path::PathBuf;

use serde::Serialize;

use super::config::{CampaignConfig, OutputFormat};
use crate::error::{Error, Result};
use crate::VERSION;

/// CSV float with 17 significant digits, so doubles round-trip.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    /// The effective configuration, as INI text.
    config: &'a str,
    result: &'a T,
}

/// A rendered output file. Contents depend only on the configuration and
/// the results; no timestamps or host details.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub command: String,
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
    body: String,
}

impl Artifact {
    pub fn new<T: Serialize>(
        command: &str,
        config: &CampaignConfig,
        result: &T,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<Self> {
        let ini = config.to_ini();
        let body = match config.output_format {
            OutputFormat::Json => {
                let env = Envelope {
                    tool: "wrz",
                    version: VERSION,
                    command,
                    config: &ini,
                    result,
                };
                let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                s
            }
            OutputFormat::Csv => {
                let mut s = format!("# wrz {VERSION} {command}\n");
                for line in ini.lines().filter(|l| !l.is_empty()) {
                    s.push_str("# ");
                    s.push_str(line);
                    s.push('\n');
                }
                s.push_str(&header.join(","));
                s.push('\n');
                for row in rows {
                    let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                    s.push_str(&fields.join(","));
                    s.push('\n');
                }
                s
            }
        };
        Ok(Self {
            command: command.to_string(),
            format: config.output_format,
            path: config.output_path.clone(),
            body,
        })
    }

    pub fn render(&self) -> &str {
        &self.body
    }
}
