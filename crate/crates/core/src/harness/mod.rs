//! Configuration loading, figure presets, parameter scans and CSV output.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::{NumericError, ParamError};

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod scan;

pub use config::{CdKind, Outputs, SystemConfig, SystemParams};
pub use presets::{run_preset, PresetOptions, PRESET_IDS};
pub use run::{run_config, AnyTrajectory, RunResult, Summary};
pub use scan::{run_scan, AxisName, ScanAxis, ScanResult, ScanSpec};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Validation(#[from] ParamError),
    #[error("cannot parse configuration: {0}")]
    Parse(serde_json::Error),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("CSV output failed: {0}")]
    Csv(String),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit status: 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numeric(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Csv(e.to_string())
    }
}
