use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{invalid, CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QECMETRO_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "qecmetro-out";

/// `--out-dir`, then the config file, then [`OUT_DIR_ENV`], then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(flag: Option<PathBuf>, config: Option<PathBuf>) -> PathBuf {
    flag.or(config)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// All files a command writes go through this, by bare file name.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes via a temp file in the same directory and renames it into place.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(invalid(format!("bad output file name {name:?}")));
        }
        let path = self.root.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(|e| CliError::io(&self.root, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

/// Scientific notation with 12 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn sci_opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Flags are `;`-separated so they stay in one CSV field.
pub fn join_flags(flags: &[String]) -> String {
    flags.join(";")
}

/// Builds a CSV table row by row; every row must match the header width.
pub struct Csv {
    width: usize,
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let fields: Vec<&str> = header.split(',').collect();
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&fields).expect("in-memory write");
        Self { width: fields.len(), writer }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "CSV row width");
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_string(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("CSV fields are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_has_twelve_significant_digits() {
        assert_eq!(sci(1.6384), "1.63840000000e0");
        assert_eq!(sci(-2.5e-7), "-2.50000000000e-7");
        assert_eq!(sci(1.0 / 3.0).parse::<f64>().unwrap(), 0.333333333333);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path().join("nested")).unwrap();
        out.write("a.txt", b"one").unwrap();
        out.write("a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("nested/a.txt")).unwrap(), b"two");
        let names: Vec<_> = std::fs::read_dir(out.root()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        assert!(out.write("../escape.txt", b"x").is_err());
    }

    #[test]
    fn csv_rows_are_plain() {
        let mut csv = Csv::new("a,b");
        csv.row(&["1".into(), "x;y".into()]);
        assert_eq!(csv.into_string(), "a,b\n1,x;y\n");
    }
}
