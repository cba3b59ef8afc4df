//! Crate-wide error type.
//!
//! Numerical operations report *why* they could not deliver a value: domain
//! violations, unmet accuracy targets (with the partial value and an error
//! bound attached), singular linear algebra, iteration failures and parser
//! diagnostics all carry their payload.

use thiserror::Error;

/// Where in the source text a parse problem sits (0-based byte offset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub offset: usize,
    pub message: String,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.offset)
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Accuracy target not met. `partial` is the best value computed so far
    /// (flattened row-major for matrices), `bound` the estimated error.
    #[error("accuracy error in {what}: estimated error {bound:.3e} exceeds target (partial value available)")]
    Accuracy {
        what: String,
        partial: Vec<f64>,
        bound: f64,
    },

    #[error("singular matrix in {what}: condition estimate {cond:.3e}")]
    Singular { what: String, cond: f64 },

    #[error("insufficient grid resolution: {0}")]
    Resolution(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parse error: {0}")]
    Parse(ParseDiagnostic),

    #[error("evaluation error in `{subexpr}`: {message}")]
    Eval { subexpr: String, message: String },

    #[error("iteration did not converge within {} steps (last residual {:.3e})",
            residuals.len(), residuals.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { residuals: Vec<f64> },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Problem validation collects every violation, not just the first.
    #[error("invalid problem specification:\n{}", issues.join("\n"))]
    Semantic { issues: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;
