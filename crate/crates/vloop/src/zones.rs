//! Zone configuration files.
//!
//! A zone file is a JSON list of objects:
//!
//! ```json
//! [
//!   { "id": "lane1", "polygon": [[10, 20], [74, 20], [74, 84], [10, 84]], "p_d": 0.2 }
//! ]
//! ```
//!
//! `p_d` is optional and defaults to 0.2. Vertices are pixel-corner
//! coordinates.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use vloop_core::zone::DEFAULT_SENSITIVITY;
use vloop_core::DetectionZone;

#[derive(Debug, Error)]
pub enum ZoneConfigError {
    #[error("cannot read zone file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: vloop_core::Error,
    },
    #[error("zone file defines no zones")]
    Empty,
}

impl ZoneConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ZoneConfigError::Syntax { line, .. } | ZoneConfigError::Invalid { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// One zone as written in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneEntry {
    pub id: String,
    pub polygon: Vec<[i32; 2]>,
    #[serde(default = "default_sensitivity")]
    pub p_d: f64,
}

fn default_sensitivity() -> f64 {
    DEFAULT_SENSITIVITY
}

impl ZoneEntry {
    pub fn rect(id: &str, x: i32, y: i32, w: i32, h: i32, p_d: f64) -> Self {
        ZoneEntry {
            id: id.into(),
            polygon: vec![[x, y], [x + w, y], [x + w, y + h], [x, y + h]],
            p_d,
        }
    }

    pub fn build(&self, width: usize, height: usize) -> Result<DetectionZone, vloop_core::Error> {
        let polygon = self.polygon.iter().map(|v| (v[0], v[1])).collect();
        DetectionZone::new(self.id.clone(), polygon, self.p_d, width, height)
    }
}

/// Line numbers (1-based) where each top-level list element starts.
fn element_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    let (mut depth, mut line) = (0usize, 1usize);
    let (mut in_string, mut escaped) = (false, false);
    for c in text.chars() {
        if c == '\n' {
            line += 1;
        }
        if in_string {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '[' | '{' => {
                if depth == 1 {
                    lines.push(line);
                }
                depth += 1;
            }
            ']' | '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    lines
}

/// Parses zone file contents and rasterises every zone for the frame size.
pub fn parse_zone_text(
    text: &str,
    width: usize,
    height: usize,
) -> Result<Vec<DetectionZone>, ZoneConfigError> {
    let entries: Vec<ZoneEntry> = serde_json::from_str(text).map_err(|e| ZoneConfigError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })?;
    if entries.is_empty() {
        return Err(ZoneConfigError::Empty);
    }
    let lines = element_lines(text);
    entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            entry.build(width, height).map_err(|source| ZoneConfigError::Invalid {
                line: lines.get(i).copied().unwrap_or(1),
                source,
            })
        })
        .collect()
}

/// Reads the entries of a zone file without rasterising them.
pub fn read_zone_entries(path: &Path) -> Result<Vec<ZoneEntry>, ZoneConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ZoneConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ZoneConfigError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Reads and validates a zone file.
pub fn parse_zone_config(
    path: &Path,
    width: usize,
    height: usize,
) -> Result<Vec<DetectionZone>, ZoneConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ZoneConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_zone_text(&text, width, height)
}

/// Serialises zone entries in the file format.
pub fn zone_file_text(entries: &[ZoneEntry]) -> String {
    let mut out = String::from("[\n");
    for (i, e) in entries.iter().enumerate() {
        let polygon: Vec<String> = e.polygon.iter().map(|v| format!("[{}, {}]", v[0], v[1])).collect();
        let id = serde_json::to_string(&e.id).unwrap_or_default();
        out.push_str(&format!(
            "  {{ \"id\": {id}, \"polygon\": [{}], \"p_d\": {} }}",
            polygon.join(", "),
            e.p_d
        ));
        out.push_str(if i + 1 < entries.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}
