use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub pretty: bool,
}

/// Failures of the command line layer.
#[derive(Debug)]
pub enum CliError {
    Lib(levycap::Error),
    /// Bad file, flag value or combination of flags.
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(levycap::Error::Unsupported(_)) => 3,
            CliError::Lib(levycap::Error::Invariant(_)) => 1,
            CliError::Lib(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<levycap::Error> for CliError {
    fn from(e: levycap::Error) -> Self {
        CliError::Lib(e)
    }
}

/// Formats an extended real the way the JSON documents do.
pub fn cell(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

impl Output {
    pub fn json<T: Serialize + ?Sized>(&self, value: &T) -> Result<(), CliError> {
        let mut text = levycap::json::to_string(value, self.pretty).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    pub fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.write(&bytes)
    }

    /// Emits `value` as JSON or the given table as CSV.
    pub fn emit<T: Serialize + ?Sized>(&self, value: &T, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
        match self.format {
            Format::Json => self.json(value),
            Format::Csv => self.csv(header, &rows),
        }
    }

    fn write(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Io(format!("stdout: {e}"))),
            Some(path) => {
                // write then rename so readers never see a partial document
                let tmp = path.with_extension("partial");
                std::fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
                std::fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            }
        }
    }
}
