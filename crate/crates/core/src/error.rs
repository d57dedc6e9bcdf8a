use alloc::string::String;

/// Errors raised by the numerical core.
///
/// Every variant names the operation that rejected its input so that a
/// driver can report which computation failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A structural parameter (sizes, windows, schedules) is unusable.
    #[error("{op}: invalid configuration: {detail}")]
    Config { op: &'static str, detail: String },

    /// Cross-section formula queried at or below its threshold.
    #[error("{op}: below threshold: v^2 = {v_sq} must exceed {threshold}")]
    BelowThreshold {
        op: &'static str,
        v_sq: f64,
        threshold: f64,
    },

    /// The scattering system has no positive-frequency solution.
    #[error("{op}: kinematically invalid: {detail}")]
    KinematicallyInvalid { op: &'static str, detail: String },

    /// A sampled spectrum carries weight at the Nyquist edge.
    #[error("{op}: under-resolved spectrum: edge weight fraction {edge_fraction:e}")]
    Resolution { op: &'static str, edge_fraction: f64 },

    /// Goodness of fit requested for an empty histogram or an all-zero curve.
    #[error("{op}: fit undefined: {detail}")]
    UndefinedFit { op: &'static str, detail: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Config {
            op,
            detail: detail.into(),
        }
    }

    /// Name of the operation that produced the error.
    pub fn op(&self) -> &'static str {
        match self {
            Error::Domain { op, .. }
            | Error::Config { op, .. }
            | Error::BelowThreshold { op, .. }
            | Error::KinematicallyInvalid { op, .. }
            | Error::Resolution { op, .. }
            | Error::UndefinedFit { op, .. } => op,
        }
    }

    /// True for errors caused by unusable setup rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
