use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{module} error: {source}", module = .source.module())]
    Model {
        #[from]
        source: dqdot::Error,
    },

    #[error("input error: {0}")]
    Input(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(message: String) -> Self {
        CliError::Config(message)
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for bad configuration, 3 for solver failures, 4 for fit and
    /// calibration failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model { source: e } if e.is_input_error() => 2,
            CliError::Model { source: e } if e.is_fit_failure() => 4,
            CliError::Model { .. } => 3,
            CliError::Input(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}
