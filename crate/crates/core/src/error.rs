use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no potential minimum found: {0}")]
    NoMinimumFound(String),
    #[error("degenerate minimum (c2 = {c2:e})")]
    DegenerateMinimum { c2: f64 },
    #[error("root solve did not converge: {0}")]
    RootNotConverged(String),
    #[error("series not converged: last shell / value = {ratio:e} exceeds {tolerance:e}")]
    NotConverged { ratio: f64, tolerance: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("drive on resonance: omega_d = {omega_d}, omega0 = {omega0}")]
    OnResonance { omega_d: f64, omega0: f64 },
    #[error("detuning fixed point did not converge after {iterations} iterations (|delta|/omega0 = {residual:e})")]
    FixedPointDiverged { iterations: usize, residual: f64 },
    #[error("multiphoton resonance too close: delta_tilde = {delta_tilde:e}")]
    ResonanceTooClose { delta_tilde: f64 },
    #[error("dispersive regime violated: g/detuning = {ratio}")]
    DispersiveViolated { ratio: f64 },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("ill-conditioned extraction system (condition number {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("no feasible point in sweep")]
    NoFeasiblePoint,
}

pub type Result<T> = std::result::Result<T, Error>;
