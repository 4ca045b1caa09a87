//! Vector sources: inline JSON, a single-column CSV or newline file, or `-`
//! for standard input.

use std::fs;
use std::io::Read;

/// Reads a vector from `source`. A leading `[` means inline JSON; a lone
/// number is a one-element vector; anything else is a path.
pub fn read_vector(source: &str, stdin: &mut dyn Read) -> Result<Vec<f64>, String> {
    let trimmed = source.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed)
            .map_err(|e| format!("invalid JSON array {trimmed:?}: {e}"));
    }
    if let Ok(v) = trimmed.parse::<f64>() {
        return Ok(vec![v]);
    }
    let text = if trimmed == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| format!("reading standard input: {e}"))?;
        s
    } else {
        fs::read_to_string(trimmed).map_err(|e| format!("reading {trimmed}: {e}"))?
    };
    parse_column(&text).map_err(|e| format!("{trimmed}: {e}"))
}

/// Numbers separated by newlines or commas; a non-numeric first entry is
/// taken as a header.
pub fn parse_column(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    let mut first = true;
    for (line_no, line) in text.lines().enumerate() {
        for field in line.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match field.parse::<f64>() {
                Ok(v) => out.push(v),
                Err(_) if first => {}
                Err(_) => return Err(format!("line {}: not a number: {field:?}", line_no + 1)),
            }
            first = false;
        }
    }
    if out.is_empty() {
        return Err("no values".into());
    }
    Ok(out)
}
