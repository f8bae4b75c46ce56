use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid field point (row {row}, x {x} m): {reason}")]
    InvalidPoint { row: usize, x: f64, reason: String },

    /// Malformed input file (yield grid, recorded spots, ...). `line` is
    /// 1-based when the error is tied to a specific line.
    #[error("input format error{}: {msg}", match line { Some(l) => format!(" at line {l}"), None => String::new() })]
    InputFormat { line: Option<usize>, msg: String },

    #[error("instance too large for the exact planner: {n} targets (max {max})")]
    TooManyTargets { n: usize, max: usize },

    #[error("agent misuse: {0}")]
    AgentMisuse(String),

    #[error("no service entry for visit at (row {row}, x {x} m)")]
    MissingService { row: usize, x: f64 },

    #[error("unknown agent profile '{0}'")]
    UnknownAgent(String),

    #[error("unknown field preset '{0}' (expected \"52x227\" or \"75x200\")")]
    UnknownPreset(String),

    #[error("percent difference undefined for baseline mean {0} s")]
    NonPositiveBaseline(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format_at(line: usize, msg: impl Into<String>) -> Self {
        Error::InputFormat {
            line: Some(line),
            msg: msg.into(),
        }
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::InputFormat {
            line: None,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
