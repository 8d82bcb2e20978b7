use thiserror::Error;

/// Errors produced by grid construction, field algebra and the stage solver.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Grid construction rejected the requested geometry.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields that must live on the same grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Model parameters outside their admissible range.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// Unsupported Runge-Kutta stage count.
    #[error("unsupported stage count {0}; Gauss tableaus are provided for s in {{1, 2, 3}}")]
    UnsupportedStages(usize),

    /// The fixed-point stage solve failed to reach the requested tolerance.
    /// `residual` is the last observed relative update (NaN if the iteration
    /// diverged to non-finite values).
    #[error("stage iteration did not converge after {iterations} sweeps (residual {residual:.3e}); retry with a smaller time step")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A requested plane-wave mode is not representable on the grid.
    #[error("wave index {index} along axis {axis} is not resolvable on {nodes} nodes (need |k| < nodes/2)")]
    UnresolvableWave {
        axis: usize,
        index: i64,
        nodes: usize,
    },

    /// Invalid input to the convergence-rate computation.
    #[error("invalid rate input: {0}")]
    InvalidRateInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
