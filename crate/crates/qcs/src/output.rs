//! Deterministic CSV/JSON rendering with a provenance header.

use serde::Serialize;

use crate::error::Result;

/// Recorded in every output file so a run can be replayed exactly.
#[derive(Clone, Debug, Serialize)]
pub struct OutputHeader {
    pub version: String,
    pub command: String,
    pub seed: u64,
}

impl OutputHeader {
    pub fn new(command: String, seed: u64) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            seed,
        }
    }
}

/// 17 significant digits; lossless round trip for f64.
pub fn float_repr(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with `#`-prefixed header lines, `.` decimal separator and
/// 17-significant-digit floats supplied by the caller.
pub fn render_csv(header: &OutputHeader, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# version={}\n", header.version));
    out.push_str(&format!("# command={}\n", header.command));
    out.push_str(&format!("# seed={}\n", header.seed));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    data: &'a T,
}

/// JSON document wrapping `data` with the provenance fields.
pub fn render_json<T: Serialize>(header: &OutputHeader, data: &T) -> Result<String> {
    let doc = JsonDocument {
        version: &header.version,
        command: &header.command,
        seed: header.seed,
        data,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}
