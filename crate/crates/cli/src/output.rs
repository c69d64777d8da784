//! CSV tables with `#` metadata lines.
//!
//! Values are written with 17 significant digits, enough for every `f64` to
//! parse back to the identical value.

use crate::error::{CliError, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Environment variable naming the directory for outputs without `--output`.
pub const OUTPUT_DIR_ENV: &str = "VOLTERRA_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, line: impl Into<String>) {
        self.metadata.push(line.into());
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for line in &self.metadata {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.write_all(b",")?;
                }
                first = false;
                write!(out, "{v:.16e}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        self.write_to(BufWriter::new(file)).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let bad = |msg: String| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
        let mut table = Table::default();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| CliError::io(path, e))?;
            if let Some(meta) = line.strip_prefix('#') {
                table.metadata.push(meta.trim_start().to_string());
            } else if table.columns.is_empty() {
                table.columns = line.split(',').map(str::to_string).collect();
            } else if !line.is_empty() {
                let row = line
                    .split(',')
                    .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad value '{v}'"))))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != table.columns.len() {
                    return Err(bad(format!("row has {} fields, header has {}", row.len(), table.columns.len())));
                }
                table.rows.push(row);
            }
        }
        Ok(table)
    }
}

/// `--output` if given, else `<dir>/<name>` with `dir` from the environment
/// (default: the working directory).
pub fn resolve_output(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(default_name)
        }
    }
}

/// `dir/stem_suffix.ext` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}
