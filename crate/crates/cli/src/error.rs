//! Error categories with the exit-code contract: 1 usage, 2 numerical
//! failure, 3 I/O or format trouble — never mixed.

use std::fmt;
use std::path::Path;

use shiftdeconv_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters; exit 1.
    Usage(String),
    /// The method itself failed (divergence, singular matrix, ...); exit 2.
    Numeric(CoreError),
    /// Unreadable, unparsable or unwritable data; exit 3.
    Format { name: &'static str, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Format { .. } => 3,
        }
    }

    /// The `<Name>` of the diagnostic line `ERROR <Name>: <detail>`.
    pub fn name(&self) -> &str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Numeric(e) => e.name(),
            CliError::Format { name, .. } => name,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Format {
            name: "Io",
            detail: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Format { detail, .. } => write!(f, "{detail}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            // Malformed data, not a failed method.
            CoreError::NonFinite | CoreError::EmptySignal => CliError::Format {
                name: match e {
                    CoreError::NonFinite => "NonFinite",
                    _ => "EmptySignal",
                },
                detail: e.to_string(),
            },
            // Caller gave an impossible parameter.
            CoreError::BadNoiseLevel(_) | CoreError::EmptyWindow => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
