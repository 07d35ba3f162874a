use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A perturbative denominator vanished (within the pole tolerance).
    #[error("pole in `{term}`: denominator {value:.6e} rad/s is within tolerance of zero")]
    Pole { term: &'static str, value: f64 },

    /// A computational eigenstate could not be reliably identified with its bare label.
    #[error("state {label} is hybridized (max overlap {overlap:.4}); ζ readout unreliable")]
    Hybridized {
        label: String,
        overlap: f64,
        /// Overlaps of all four computational states, in the order |0000⟩, |1000⟩, |0100⟩, |1100⟩.
        diagnostics: Vec<(String, f64)>,
    },

    /// Decay fit did not produce a decaying exponential.
    #[error("decay fit failed: {reason}")]
    Fit { reason: String, lengths: Vec<usize>, curve: Vec<f64> },

    /// A matrix that must be inverted is singular or badly conditioned.
    #[error("matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    /// A quantum state or channel output violated a physical invariant.
    #[error("non-physical {what}: {detail}")]
    NonPhysical { what: &'static str, detail: String },

    /// Invalid parameter value, naming the offending field.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("failed to parse device file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
