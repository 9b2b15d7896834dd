use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unphysical noise: {0}")]
    UnphysicalNoise(String),

    #[error("degenerate field axis: the total field is zero")]
    DegenerateAxis,

    #[error("degenerate hypotheses: λmax − λmin of H1 − H0 is {gap:.3e} rad/s")]
    DegenerateHypotheses { gap: f64 },

    #[error("positivity violated at t = {t} s (min eigenvalue {min_eigenvalue:.3e})")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Positivity { .. } | Error::Numerical(_) | Error::DegenerateHypotheses { .. } | Error::DegenerateAxis
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
