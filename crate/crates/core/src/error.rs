use thiserror::Error;

/// Errors surfaced by the library. Every variant carries enough context to
/// tell the caller which input or which instant in time was at fault.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("signals live on different grids ({0})")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The emission constraint on the atomic amplitude fails: the radicand of
    /// the pulse formula goes negative, so no real drive exists.
    #[error("target is not producible: radicand {radicand:.3e} < 0 at t = {t:.6}")]
    NotProducible { t: f64, radicand: f64 },

    #[error("division singularity at t = {t:.6}: drive vanishes while the amplitude still changes")]
    DivisionSingularity { t: f64 },

    #[error("step size underflow at t = {t:.6} (h = {h:.3e}); problem looks stiff")]
    Stiffness { t: f64, h: f64 },

    #[error("degenerate quantity: {0}")]
    Degenerate(String),

    #[error("expected trial count diverges: success probability per trial is {0:.3e}")]
    Divergence(f64),

    #[error("peak sits on the boundary of the sampled range")]
    PeakAtBoundary,

    #[error("data file: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
