//! CSV and JSON emission. Every CSV gets a `.meta.json` sidecar.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, fixed exponent notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    file: String,
    columns: &'a [&'a str],
    config: &'a ExperimentConfig,
}

pub struct OutputDir {
    root: PathBuf,
    command: String,
    config: ExperimentConfig,
}

impl OutputDir {
    pub fn create(root: &Path, command: &str, config: &ExperimentConfig) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            command: command.to_string(),
            config: config.clone(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv<I>(&self, name: &str, columns: &[&str], rows: I) -> CliResult<PathBuf>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(columns)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        let meta = Meta {
            command: &self.command,
            version: VERSION,
            file: name.to_string(),
            columns,
            config: &self.config,
        };
        self.write_json(&format!("{name}.meta.json"), &meta)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::to_writer_pretty(BufWriter::new(file), value)?;
        Ok(path)
    }
}
