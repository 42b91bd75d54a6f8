use alloc::string::String;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Angular-momentum arguments outside their domain (negative j, |m| > j,
    /// mismatched integer / half-integer character).
    #[error("angular momentum domain error: {0}")]
    Domain(String),
    /// Inputs that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Basis, matrix or state dimensions that do not fit together.
    #[error("structural mismatch: {0}")]
    Structure(String),
    /// Operation requires a different molecular species kind.
    #[error("species kind mismatch: {0}")]
    Kind(String),
    /// Label or state lookup failed.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    /// Adiabatic tracking lost a state between two field points.
    #[error(
        "tracking lost `{label}` at point {point} (E = {e_field} kV/cm, B = {b_field} G): \
         best overlap {overlap:.3} (candidates {first} and {second}); halve the sweep step"
    )]
    Tracking {
        label: String,
        point: usize,
        e_field: f64,
        b_field: f64,
        overlap: f64,
        first: usize,
        second: usize,
    },
    /// A minimisation bracket did not contain an interior minimum.
    #[error("no interior minimum in bracket [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
    /// A protocol is undefined for the supplied parameters.
    #[error("degenerate protocol: {0}")]
    Degenerate(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for numerical failures (tracking loss, bracketing) as opposed to
    /// invalid inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Tracking { .. } | Error::Bracketing { .. })
    }
}
