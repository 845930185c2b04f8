use thiserror::Error;

/// Errors produced by design validation and the estimator machinery.
///
/// Offending values are carried as `f64` regardless of the working scalar so
/// the enum stays free of type parameters.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("design must contain at least one point")]
    EmptyDesign,

    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("duplicate abscissa {value}")]
    DuplicateAbscissa { value: f64 },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("derivative order q={q} must be less than the moment order p={p}")]
    DerivativeOrder { q: usize, p: usize },

    #[error("moment order p={p} outside the supported range 1..={max}")]
    MomentOrder { p: usize, max: usize },

    #[error("bandwidth must be positive and finite")]
    InvalidBandwidth,

    #[error("weight table: {reason}")]
    InvalidWeightTable { reason: String },

    #[error("singular moment system: only {supported} of the required {needed} points carry positive weight")]
    SingularSystem { supported: usize, needed: usize },

    #[error("singular moment system: pivot {pivot:e} below threshold {threshold:e} at elimination step {step}")]
    SingularPivot {
        pivot: f64,
        threshold: f64,
        step: usize,
    },

    #[error("kernel has {found} sign changes; a local fit of moment order {p} allows at most {max}")]
    NotRepresentable { found: usize, max: usize, p: usize },

    #[error("kernel fails the ({q},{p}) moment conditions: worst normalized residual {residual:e} at order {worst_order} exceeds {tol:e}")]
    NotTypeQp {
        q: usize,
        p: usize,
        worst_order: usize,
        residual: f64,
        tol: f64,
    },

    #[error("no sign choice makes all extracted weights non-negative")]
    InconsistentSigns,

    #[error("kernels disagree on design or estimation point")]
    MismatchedKernels,

    #[error("design is not symmetric about t={t}")]
    AsymmetricDesign { t: f64 },

    #[error("p - q must be even, got q={q}, p={p}")]
    OrderGapParity { q: usize, p: usize },

    #[error("scheme {scheme}: {source}")]
    SchemeFailure {
        scheme: String,
        #[source]
        source: Box<Error>,
    },

    #[error("grid must contain at least one point")]
    EmptyGrid,

    #[error("local fit failed at {} grid point(s), first at t={}", .points.len(), .points.first().copied().unwrap_or(f64::NAN))]
    CurveFailures { points: Vec<f64> },
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to input
    /// validation): singular systems, representability refusals, sign
    /// inconsistencies, and per-scheme or per-grid-point wrappers thereof.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularSystem { .. }
            | Error::SingularPivot { .. }
            | Error::NotRepresentable { .. }
            | Error::InconsistentSigns
            | Error::CurveFailures { .. } => true,
            Error::SchemeFailure { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
