use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Seventeen significant digits, enough for a lossless round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes artifacts into one directory and remembers their names.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root,
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn subdir(&self, name: &str) -> Result<OutputDir, CliError> {
        OutputDir::create(self.root.join(name))
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.root.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_owned());
        }
        Ok(BufWriter::new(file))
    }

    /// Column-oriented CSV; all columns must have equal length.
    pub fn csv(&mut self, name: &str, headers: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut w = csv::Writer::from_writer(self.open(name)?);
        let io = |e: csv::Error| CliError::Input(format!("csv write failed: {e}"));
        w.write_record(headers).map_err(io)?;
        for i in 0..rows {
            w.write_record(columns.iter().map(|c| fmt_f64(c[i]))).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Input(format!("csv flush failed: {e}")))?;
        Ok(())
    }

    /// CSV with string cells, for tables that mix tags and numbers.
    pub fn csv_rows(&mut self, name: &str, headers: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.open(name)?);
        let io = |e: csv::Error| CliError::Input(format!("csv write failed: {e}"));
        w.write_record(headers).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Input(format!("csv flush failed: {e}")))?;
        Ok(())
    }

    /// Whitespace-separated columns with a `#` header, for plotting tools.
    pub fn dat(&mut self, name: &str, headers: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut w = self.open(name)?;
        let io = |e: std::io::Error| CliError::Input(format!("write failed: {e}"));
        writeln!(w, "# {}", headers.join(" ")).map_err(io)?;
        for i in 0..rows {
            let line: Vec<String> = columns.iter().map(|c| fmt_f64(c[i])).collect();
            writeln!(w, "{}", line.join(" ")).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(|e| CliError::Input(format!("json write failed: {e}")))?;
        writeln!(w).and_then(|_| w.flush())
            .map_err(|e| CliError::Input(format!("write failed: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, std::f64::consts::PI, 1e300] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }
}
