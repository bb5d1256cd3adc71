//! Crate-wide error type.

/// Errors reported by the numerical operations.
///
/// `token()` returns a short machine-readable identifier that the CLI layer
/// embeds in its structured output.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the supported domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Evaluation requested too close to a pole.
    #[error("pole proximity in {op}: {detail}")]
    Pole { op: &'static str, detail: String },

    /// A routine could not meet the requested tolerance.
    #[error("{op} did not reach tolerance {requested:.3e} (achieved ~{achieved:.3e}, regime {regime})")]
    AccuracyNotReached {
        op: &'static str,
        regime: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// Integer input too large for exact factorization.
    #[error("factorization overflow: {n} exceeds the supported bound 10^12")]
    FactorOverflow { n: u64 },

    /// The Fourier truncation length exceeded the hard cap.
    #[error("truncation length {needed} exceeds cap {cap} (y too small for this T/tol)")]
    TruncationTooLong { needed: u64, cap: u64 },

    /// Hecke eigenvalue missing from user-supplied cusp-form data.
    #[error("missing Hecke eigenvalue lambda_p for p = {p}")]
    MissingEigenvalue { p: u64 },
}

impl Error {
    /// Short machine-readable token for structured CLI output.
    pub fn token(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain-error",
            Error::Pole { .. } => "pole-error",
            Error::AccuracyNotReached { .. } => "accuracy-error",
            Error::FactorOverflow { .. } => "overflow-error",
            Error::TruncationTooLong { .. } => "truncation-error",
            Error::MissingEigenvalue { .. } => "missing-eigenvalue",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
