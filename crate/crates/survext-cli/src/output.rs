//! Output rendering: JSON envelopes and commented CSV, both embedding
//! the resolved configuration.

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::args::{Format, ResolvedConfig};
use crate::error::CliError;

/// Round-trip-safe numeric rendering (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Leading CSV comment block carrying the resolved configuration.
pub fn csv_preamble(command: &str, cfg: &ResolvedConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("# tool_version={}\n", cfg.tool_version));
    s.push_str(&format!("# command={command}\n"));
    s.push_str(&format!("# seed={}\n", cfg.seed));
    s.push_str(&format!("# relative_tolerance={}\n", cfg.relative_tolerance));
    s.push_str(&format!("# absolute_tolerance={}\n", cfg.absolute_tolerance));
    s.push_str(&format!(
        "# gompertz_parameterization={}\n",
        cfg.gompertz_parameterization
    ));
    s.push_str(&format!(
        "# cm_square_correction={}\n",
        cfg.cm_square_correction
    ));
    s
}

/// JSON envelope around a serializable result.
pub fn json_envelope<T: Serialize>(
    command: &str,
    cfg: &ResolvedConfig,
    result: &T,
) -> Result<String, CliError> {
    let value = json!({
        "tool_version": cfg.tool_version,
        "command": command,
        "config": cfg,
        "result": result,
    });
    serde_json::to_string_pretty(&value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numeric(e.to_string()))
}

/// Render either format from a serializable result and a CSV body.
pub fn render<T: Serialize>(
    command: &str,
    cfg: &ResolvedConfig,
    result: &T,
    csv_body: String,
) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => json_envelope(command, cfg, result),
        Format::Csv => Ok(format!("{}{csv_body}", csv_preamble(command, cfg))),
    }
}

/// Write the rendered output to the chosen sink.
pub fn emit(target: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match target {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Data(format!("cannot write `{}`: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
