//! Deterministic CSV and JSON writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed-width scientific notation; `nan`/`inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.12e}")
    }
}

/// Output directory plus the provenance stamped on every file.
pub struct Sink {
    dir: PathBuf,
    prefix: String,
    header: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path, cfg: &ExperimentConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let tolerances = serde_json::to_string(&cfg.tolerances).expect("tolerances serialize");
        let header = vec![
            format!("adiakit {VERSION}"),
            format!("config_sha256 {}", cfg.hash()),
            format!("seed {}", cfg.seed),
            format!("tolerances {tolerances}"),
        ];
        Ok(Self { dir: dir.to_path_buf(), prefix: cfg.outputs.prefix.clone(), header })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{}{name}", self.prefix))
    }

    pub fn file_name(&self, name: &str) -> String {
        format!("{}{name}", self.prefix)
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn write_csv(&self, name: &str, columns: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut buf = Vec::new();
        for line in &self.header {
            buf.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns).map_err(csv_err)?;
            for row in rows {
                w.write_record(row).map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        self.write_bytes(name, &buf)
    }

    /// Pretty JSON with a `provenance` block in front of `body`.
    pub fn write_json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf, CliError> {
        #[derive(Serialize)]
        struct Stamped<'a, T> {
            provenance: &'a [String],
            #[serde(flatten)]
            body: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Stamped { provenance: &self.header, body })
            .map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(1.5), "1.500000000000e0");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(-2e-7), "-2.000000000000e-7");
    }
}
