use crate::exterior::Vec8;
use crate::{Error, Result};

/// Parses a plane file: one row per line, 8 whitespace-separated decimals.
/// Blank lines and `#` comments are skipped.
pub fn parse_plane_text(text: &str) -> Result<Vec<Vec8>> {
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: n + 1, msg: e.to_string() })?;
        if values.len() != 8 {
            return Err(Error::Parse { line: n + 1, msg: format!("expected 8 values, found {}", values.len()) });
        }
        let row = Vec8::new(std::array::from_fn(|i| values[i]))
            .map_err(|_| Error::Parse { line: n + 1, msg: "non-finite value".into() })?;
        rows.push(row);
    }
    Ok(rows)
}
