use thiserror::Error;

/// Errors emitted by the physics and reconstruction layers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resonant denominator: {detuning} is zero within tolerance")]
    Resonance { detuning: String },

    #[error("basis truncation too small: top-layer ground-state population {leakage:.3e} exceeds 1e-6")]
    Truncation { leakage: f64 },

    #[error("time step too coarse: unitarity drift {drift:.3e} exceeds 1e-6")]
    StepSize { drift: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("fit did not converge: {0}")]
    FitNonConvergent(String),

    #[error("underdetermined fit: {0}")]
    Underdetermined(String),

    #[error("optimizer did not converge after restart budget (best objective {best:.3e})")]
    Convergence { best: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
