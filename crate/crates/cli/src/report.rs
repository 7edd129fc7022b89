//! Report envelope shared by every subcommand: code version, the fully
//! resolved configuration, and the result. Serialization is field-order
//! stable, and nothing time- or host-dependent is embedded, so identical
//! configurations reproduce reports byte for byte (single-worker runs).

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub version: &'static str,
    pub config: C,
    pub result: R,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(config: C, result: R) -> Self {
        Report {
            version: VERSION,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize");
        s.push('\n');
        s
    }
}

/// Writes the JSON report to `out` when given; the rendered view (per
/// --format) always goes to stdout.
pub fn emit<C: Serialize, R: Serialize>(
    report: &Report<C, R>,
    rendered: String,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(path) = out {
        fs::write(path, report.to_json())
            .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
    }
    print!("{rendered}");
    Ok(())
}
