//! Batch harness behind the `hfpquad` binary: run configurations, the four
//! study modes and their CSV output.

mod config;
mod fit;
mod output;
mod run;
mod samples;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::domain::Rule;
use crate::error::HfpError;

pub use config::{
    parse_f64_list, parse_n_list, DerivChoice, FunctionSpec, Mode, RawConfig, RunConfig,
};
pub use fit::{fit_window, least_squares_slope, FitStatus, SlopeFit, FIT_WINDOW};
pub use output::{format_num, RunOutput};
pub use run::{run, run_bounds, run_converge, run_exactness, run_identities, thread_pool};
pub use samples::load_samples;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error("rule {rule}: only {points} rows fall in the fit window, need at least 3")]
    InsufficientPoints { rule: Rule, points: usize },

    #[error("tau {tau:e} outside the admissible range ({lower:e}, {upper:e})")]
    TauOutOfRange { tau: f64, lower: f64, upper: f64 },

    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] HfpError),
}

impl HarnessError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }
}
