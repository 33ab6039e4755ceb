use thiserror::Error;

/// Errors raised by the evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("zeta: pole at s = 1")]
    Pole,

    #[error("zeta: |Im s| = {im} exceeds the configured cap {cap}")]
    ImaginaryCap { im: f64, cap: f64 },

    #[error("{op}: did not converge ({detail})")]
    NonConvergence { op: &'static str, detail: String },

    #[error("branch tracking failed near x = {x}: phase jump {jump} rad")]
    BranchTracking { x: f64, jump: f64 },

    #[error("sample {index} (t = {t}) is zero; its argument is undefined")]
    ZeroSample { index: usize, t: f64 },

    #[error("phase track under-resolved at t = {t}: jump {jump} rad")]
    UnderResolved { index: usize, t: f64, jump: f64 },

    #[error("grid is not strictly ascending at index {index}")]
    NotAscending { index: usize },

    #[error("series needs {needed} terms, cap is {cap}")]
    TermCap { needed: u64, cap: u64 },

    #[error("phase tracks are sampled on different grids")]
    GridMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for errors caused by the caller's arguments rather than by
    /// the numerics (used by the CLI to pick an exit code).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Pole
                | Error::ImaginaryCap { .. }
                | Error::NotAscending { .. }
                | Error::GridMismatch
                | Error::InvalidConfig(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
