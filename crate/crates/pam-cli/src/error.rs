//! CLI-level errors, keyed to the process exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Failure classes the `pam` binary distinguishes in its exit status:
/// 2 for usage/configuration mistakes, 3 for malformed data files, 4 for
/// numerical or simulation failures. 0 is success; clap's own usage errors
/// also exit 2.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag combination or configuration file contents.
    #[error("{0}")]
    Config(String),

    /// A data file is corrupt, truncated, or of an unsupported version.
    #[error("{0}")]
    Format(String),

    /// The pipeline itself failed: solver breakdown, I/O on outputs, or a
    /// simulation that refused the drawn parameters.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Format(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

/// Core errors surfacing through a running pipeline are runtime failures;
/// parameter problems are classified as Config at the call sites that
/// validate user input.
impl From<pam_core::Error> for CliError {
    fn from(e: pam_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
