use thiserror::Error;

/// Failures raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point {point:?} is outside the admissible region of `{field}`")]
    NotAdmissible { field: String, point: Vec<f64> },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("field `{0}` provides no analytic derivatives")]
    MissingDerivative(String),
    #[error("gradient below floor: |Df| = {norm:e} < {floor:e} (critical level)")]
    GradientBelowFloor { norm: f64, floor: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("step dt = {dt:e} violates the stability bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },
    #[error("profile self-intersects at t = {t}")]
    SelfIntersection { t: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl GeomError {
    pub fn domain(msg: impl Into<String>) -> Self {
        GeomError::Domain(msg.into())
    }

    pub fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        GeomError::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    /// True for failures caused by the numerics (critical levels, stability,
    /// non-convergence) rather than by invalid input.
    pub fn is_numeric_breakdown(&self) -> bool {
        matches!(
            self,
            GeomError::GradientBelowFloor { .. }
                | GeomError::NoConvergence { .. }
                | GeomError::Cfl { .. }
                | GeomError::SelfIntersection { .. }
                | GeomError::NonFinite(_)
                | GeomError::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
