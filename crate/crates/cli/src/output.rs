//! CSV emission: a commented JSON header echoing the resolved configuration
//! and artifact version, then plain rows with full round-trip float
//! precision (17 significant digits).

use std::io::Write;

use crate::config::RunConfig;
use crate::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    sink: Box<dyn Write>,
}

impl CsvWriter {
    /// Opens the config's output path, or stdout when none is set.
    pub fn open(cfg: &RunConfig, command: &str) -> Result<Self, CliError> {
        let sink: Box<dyn Write> = match &cfg.out {
            Some(path) => Box::new(
                std::fs::File::create(path)
                    .map_err(|e| CliError::Config(format!("cannot create {path}: {e}")))?,
            ),
            None => Box::new(std::io::stdout()),
        };
        let mut writer = Self { sink };
        writer.header(cfg, command)?;
        Ok(writer)
    }

    fn header(&mut self, cfg: &RunConfig, command: &str) -> Result<(), CliError> {
        // The output path is not part of the scientific configuration and
        // would break byte-identity of repeated runs; drop it from the echo.
        let mut echo_cfg = cfg.clone();
        echo_cfg.out = None;
        let echo = serde_json::json!({
            "artifact": "pfaffwalk",
            "version": ARTIFACT_VERSION,
            "command": command,
            "config": echo_cfg,
        });
        writeln!(self.sink, "# {echo}").map_err(CliError::from_io)
    }

    pub fn columns(&mut self, names: &[&str]) -> Result<(), CliError> {
        writeln!(self.sink, "{}", names.join(",")).map_err(CliError::from_io)
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.sink, "{}", fields.join(",")).map_err(CliError::from_io)
    }
}
