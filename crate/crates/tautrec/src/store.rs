//! Persistent intersection-number tables.
//!
//! The file is JSON: `{"version": 1, "entries": [{"g": 1, "k": [1], "value": "1/24"}]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tautrec_core::exact_arith::{format_rational, parse_rational};
use tautrec_core::witten::{IntersectionTable, TABLE_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed table file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("table version {found} is not supported (expected {TABLE_VERSION})")]
    Version { found: u32 },
    #[error("invalid entry: {0}")]
    Entry(#[from] tautrec_core::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    version: u32,
    entries: Vec<EntryFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryFile {
    g: u32,
    k: Vec<u32>,
    value: String,
}

pub fn table_to_json(table: &IntersectionTable) -> String {
    let file = TableFile {
        version: table.version(),
        entries: table
            .entries()
            .map(|(g, k, v)| EntryFile {
                g,
                k: k.to_vec(),
                value: format_rational(v),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("table serializes");
    s.push('\n');
    s
}

pub fn table_from_json(text: &str) -> Result<IntersectionTable, StoreError> {
    let file: TableFile = serde_json::from_str(text)?;
    if file.version != TABLE_VERSION {
        return Err(StoreError::Version {
            found: file.version,
        });
    }
    let mut items = Vec::with_capacity(file.entries.len());
    for e in file.entries {
        items.push((e.g, e.k, parse_rational(&e.value)?));
    }
    Ok(IntersectionTable::from_entries(items)?)
}

pub fn save_table(table: &IntersectionTable, path: &Path) -> Result<(), StoreError> {
    fs::write(path, table_to_json(table)).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a table; a missing file yields the base values only.
pub fn load_table(path: &Path) -> Result<IntersectionTable, StoreError> {
    match fs::read_to_string(path) {
        Ok(text) => table_from_json(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(IntersectionTable::new()),
        Err(source) => Err(StoreError::Io {
            path: path.display().to_string(),
            source,
        }),
    }
}
