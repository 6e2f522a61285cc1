use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("mode grid needs at least one mode")]
    ZeroModeCount,
    #[error("momentum must be positive, got {0}")]
    NonPositiveMomentum(f64),
    #[error("momenta must be strictly increasing")]
    UnsortedMomenta,
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("damping rate must be a finite nonnegative number, got {0}")]
    NegativeDamping(f64),
    #[error("schedule time constant must be positive, got {0}")]
    NonPositiveTimeConstant(f64),
    #[error("occupation of mode {mode} is {value}; occupations must be finite and >= 0")]
    NegativeOccupation { mode: usize, value: f64 },
    #[error("squeeze parameter of mode {mode} is {value}; must be finite and >= 0")]
    NegativeSqueeze { mode: usize, value: f64 },
    #[error("grid mismatch: expected {expected} modes, got {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("inverse temperature must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("zero damping has no finite lifetimes; use the analytic backend")]
    ZeroDampingFiniteLifetime,
    #[error("integration step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("integration horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
    #[error("time step must be positive, got {0}")]
    NonPositiveTimeStep(f64),
    #[error("memory {0} has been forgotten; its code can no longer be restored")]
    RefreshForgotten(String),
    #[error("clock regression: bank is at t={clock}, requested t={requested}")]
    ClockRegression { clock: f64, requested: f64 },
    #[error("unknown memory code {0}")]
    UnknownCode(String),
    #[error("a memory with code {0} is already recorded")]
    DuplicateCode(String),
    #[error("association start {0} has been forgotten")]
    StartForgotten(String),
    #[error("truncation too small: norm deficit {deficit:e} at dim {dim}")]
    TruncationTooSmall { dim: usize, deficit: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
}
