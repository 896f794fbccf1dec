use thiserror::Error as ThisError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A domain or precondition violation (bad height, bad file, ...).
    Domain,
    /// A numerical verification or search failed to certify its result.
    Verification,
}

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("t = {t} is below the supported minimum height {min}")]
    BelowMinimum { t: f64, min: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("t = {t} lies outside the spectral window [{base}, {end}]; admissible V <= {v_max}")]
    WindowViolation { t: f64, base: f64, end: f64, v_max: f64 },

    #[error("t = {t} is beyond the verified height {verified_to}; scan the zeros up to at least {t}")]
    BeyondWatermark { t: f64, verified_to: f64 },

    #[error("zero scan could not be reconciled on the subinterval [{lo}, {hi}]")]
    ScanUnreconciled { lo: f64, hi: f64 },

    #[error("line {line}: {msg}")]
    Ingestion { line: usize, msg: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("node {node} is too close to a zero (|Z| = {modulus:e})")]
    NodeTooClose { node: f64, modulus: f64 },

    #[error("segments overlap at this height: g(T) = {gap} <= H = {width}")]
    SegmentsOverlap { gap: f64, width: f64 },

    #[error("mean value not attained at scan resolution on ({lo}, {hi})")]
    MeanNotAttained { lo: f64, hi: f64 },

    #[error("no configuration within tolerance: best residual {:e}", best.residual)]
    NoConfiguration {
        best: Box<crate::ladder::LadderConfiguration>,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ScanUnreconciled { .. } | Error::NoConfiguration { .. } | Error::Verification(_) => {
                ErrorKind::Verification
            }
            _ => ErrorKind::Domain,
        }
    }
}
