use thiserror::Error;

/// Errors raised by the constructors and analyses in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("divisibility violated: {0} does not divide {1}")]
    Divisibility(String, String),

    #[error("invalid value: {0}")]
    Value(String),

    #[error("odometer points belong to different frequency sets")]
    ParentMismatch,

    #[error("residues are not compatible across levels: {0}")]
    Incompatible(String),

    #[error("depth {requested} out of range 1..={available}")]
    Depth { requested: usize, available: usize },

    #[error("condition A fails: {0}")]
    ConditionA(String),

    #[error("growth condition n_k^3 <= n_(k+1) <= n_k^(3m) violated between {0} and {1}")]
    GrowthCondition(String, String),

    #[error("series terms do not form a divisibility chain: {0}")]
    Series(String),

    #[error("precision of {precision_bits} bits cannot resolve a bound whose inverse needs {bound_inverse_bits} bits")]
    Precision {
        precision_bits: u32,
        bound_inverse_bits: u64,
    },

    #[error("band edge pairing inconsistent at tolerance {tol}: {detail}")]
    Tolerance { tol: f64, detail: String },

    #[error("energy {energy} is not strictly inside a band (|discriminant| = {discriminant})")]
    BandEdge { energy: f64, discriminant: f64 },

    #[error("quadrature did not reach relative tolerance {rel_tol} (estimate {estimate}, error {error})")]
    Quadrature {
        rel_tol: f64,
        estimate: f64,
        error: f64,
    },

    #[error("no perturbation t in 1..={tried} opens all gaps at tolerance {tol}")]
    Exhausted { tried: usize, tol: f64 },

    #[error("cantor iteration failed at stage {stage}: {reason}")]
    Stage { stage: usize, reason: String },

    #[error("block partition invalid: {0}")]
    Partition(String),

    #[error("matrix determinant {0} is not 1")]
    Det(f64),
}

impl Error {
    /// `true` for failures of numerical tolerance rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Precision { .. }
                | Error::Tolerance { .. }
                | Error::BandEdge { .. }
                | Error::Quadrature { .. }
                | Error::Exhausted { .. }
                | Error::Stage { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
