//! The `snapshot-plotdata` subcommand: net snapshot CSV to whitespace
//! separated columns that gnuplot and friends read directly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::formats::parse_net_csv;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub text: String,
    pub rows: usize,
    /// Set when coordinates beyond the second were dropped.
    pub warning: Option<String>,
}

/// Converts snapshot text. Up to three coordinates are kept as is; higher
/// dimensional nets keep `x0` and `x1` only.
pub fn plotdata(csv: &str) -> Result<PlotData> {
    let rows = parse_net_csv(csv)?;
    let dim = rows.first().map_or(0, |r| r.position.len());
    let keep = if dim > 3 { 2 } else { dim };
    let warning = (dim > 3).then(|| format!("net has {dim} dimensions; emitting x0 and x1 only"));

    let mut text = String::from("#");
    for name in ["x", "y", "z"].iter().take(keep) {
        let _ = write!(text, " {name}");
    }
    text.push_str(" f\n");
    for r in &rows {
        for v in &r.position[..keep] {
            let _ = write!(text, "{v} ");
        }
        let _ = writeln!(text, "{}", r.objective);
    }
    Ok(PlotData {
        text,
        rows: rows.len(),
        warning,
    })
}

pub fn cmd_snapshot_plotdata(path: &Path) -> Result<PlotData> {
    if path.as_os_str().is_empty() {
        return Err(CliError::Usage("snapshot path is empty".into()));
    }
    let csv = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    plotdata(&csv).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
