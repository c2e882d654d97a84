//! Library side of the `curvscan` command: metric files, subcommand
//! pipelines and report rendering.

pub mod commands;
pub mod error;
pub mod metric_file;

pub use commands::{cmd_catalog_export, cmd_catalog_list, cmd_classify, cmd_criterion, cmd_invariants, cmd_probe, Outcome};
pub use error::CliError;
pub use metric_file::MetricFile;

use std::path::Path;

pub fn load_metric_file(path: &Path) -> Result<MetricFile, CliError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    MetricFile::parse(&src).map_err(|e| match e {
        CliError::Parse { line, col, message } => CliError::Input(format!("{}:{line}:{col}: {message}", path.display())),
        other => other,
    })
}
