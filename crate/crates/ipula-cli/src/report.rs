//! Byte-stable artifact writers.
//!
//! CSV files declare their column schema in a leading `#` comment, then a
//! plain header row. Floats are written with Rust's shortest round-trip
//! `Display`, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub struct Csv {
    buf: String,
    columns: usize,
    cells_in_row: usize,
}

impl Csv {
    /// Start a file whose schema line and header row list `columns`.
    pub fn new(columns: &[&str]) -> Self {
        let header = columns.join(",");
        let mut buf = String::new();
        let _ = writeln!(buf, "# schema: {header}");
        let _ = writeln!(buf, "{header}");
        Csv { buf, columns: columns.len(), cells_in_row: 0 }
    }

    pub fn cell(&mut self, value: impl std::fmt::Display) -> &mut Self {
        assert!(self.cells_in_row < self.columns, "row has too many cells");
        if self.cells_in_row > 0 {
            self.buf.push(',');
        }
        let _ = write!(self.buf, "{value}");
        self.cells_in_row += 1;
        self
    }

    pub fn end_row(&mut self) {
        assert_eq!(self.cells_in_row, self.columns, "row has too few cells");
        self.buf.push('\n');
        self.cells_in_row = 0;
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        assert_eq!(self.cells_in_row, 0, "unterminated row");
        fs::write(path, self.buf.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Raw little-endian `f64` dump of a state vector.
pub fn write_state_binary(path: &Path, state: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(state.len() * 8);
    for v in state {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
