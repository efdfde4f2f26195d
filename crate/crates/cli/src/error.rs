use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error{}: {field}: {msg}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        field: String,
        msg: String,
    },
    #[error(transparent)]
    Numerical(#[from] sounderlab_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(line: Option<usize>, field: &str, msg: impl Into<String>) -> Self {
        CliError::Config {
            line,
            field: field.to_string(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}
