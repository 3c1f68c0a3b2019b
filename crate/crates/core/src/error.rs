use alloc::string::String;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain of the operation")]
    Domain { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The defining coordinate block of the point is zero, so the nearest
    /// point on the manifold is not unique.
    #[error("projection onto the manifold is not unique")]
    AmbiguousProjection,

    #[error("point is not on the manifold (residual {residual:e})")]
    OffManifold { residual: f64 },

    /// The draw budget ran out before the minibatch filled. Usually the
    /// radius sits below the grouping phase transition for all of M.
    #[error("acceptance too low in stage {stage}: {accepted}/{requested} accepted after {draws} draws")]
    AcceptanceTooLow {
        /// 0 when collected outside a staged run.
        stage: u32,
        accepted: usize,
        requested: usize,
        draws: u64,
    },

    #[error("adaptive quadrature did not converge after {evaluations} evaluations")]
    QuadratureNonConvergence { evaluations: usize },

    #[error("special function evaluation did not converge at p = {p}, x = {x}")]
    SeriesNonConvergence { p: f64, x: f64 },

    #[error("x = {x} lies outside the envelope window [{lo}, {hi}]")]
    Window { x: f64, lo: f64, hi: f64 },

    #[error("stream noise level {stream} does not match configured sigma {config}")]
    SigmaMismatch { stream: f64, config: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64) -> Error {
    Error::Domain { name, value }
}
