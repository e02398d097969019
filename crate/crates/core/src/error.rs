use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{field} must be {requirement}")]
    Validation { field: &'static str, requirement: &'static str },

    #[error("missing required parameter `{0}`")]
    MissingField(&'static str),

    #[error("config parse error: {0}")]
    Config(#[from] serde_json::Error),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("integrator accuracy violated at t = {time}: {reason}")]
    IntegratorAccuracy { time: f64, reason: String },

    #[error("recorded window is not an integer number of periods ({periods})")]
    Window { periods: f64 },

    #[error("pole hit: {0}")]
    Pole(String),

    #[error("uncancelled pole degeneracy: {0}")]
    Degeneracy(String),

    #[error("calibration convention mismatch: {0}")]
    Convention(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("need at least {needed} photons in mode A, got {got}")]
    InsufficientPhotons { needed: u32, got: u32 },

    #[error("linewidth {linewidth} does not resolve peaks separated by {separation}")]
    Resolution { linewidth: f64, separation: f64 },

    #[error("truncation tail estimate {estimate:e} exceeds bound {bound:e}")]
    Truncation { estimate: f64, bound: f64 },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::MissingField(_) | Error::Config(_) | Error::InsufficientPhotons { .. }
        )
    }
}
