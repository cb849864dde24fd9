use thiserror::Error;

/// Errors produced by the solvers and diagnostics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid multiplicity vector: {0}")]
    InvalidMultiplicity(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("insufficient measurements for requested decimation")]
    InsufficientForDecimation,

    #[error("decimation aliased two nodes together")]
    AliasedNodes,

    #[error("not enough measurements: need at least {needed}, got {got}")]
    NotEnoughMeasurements { needed: usize, got: usize },

    #[error("need at least R = d+s decimated measurements (R = {needed}, got {got})")]
    TooFewDecimated { needed: usize, got: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("system is not square-solvable")]
    NotSquareSolvable,

    #[error("no solutions found")]
    NoSolutions,

    #[error("refinement at singular point")]
    SingularRefinement,

    #[error("leading coefficient vanishes; degree structure inconsistent")]
    LeadingCoefficientVanishes,

    #[error("degenerate node configuration")]
    DegenerateNodes,

    #[error("no circle-adjacent root; model mismatch")]
    NoCircleAdjacentRoot,

    #[error("singular-subspace extraction failure: {0}")]
    SubspaceFailure(String),

    #[error("Jacobian rank-deficient at data point")]
    RankDeficientJacobian,

    #[error("decimation destroyed identifiability (aliasing)")]
    DecimatedSingular,

    #[error("no torus-adjacent solutions")]
    NoTorusAdjacent,

    #[error("initial approximation inconsistent with candidates (eta too small?)")]
    InitInconsistent,

    #[error("I/O error at {path}: {message}")]
    Io { path: String, message: String },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed or inconsistent input rather than
    /// by a solver failing on valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidMultiplicity(_)
                | Error::InvalidParameters(_)
                | Error::InvalidOptions(_)
                | Error::InsufficientForDecimation
                | Error::NotEnoughMeasurements { .. }
                | Error::TooFewDecimated { .. }
                | Error::InsufficientData(_)
                | Error::Io { .. }
                | Error::Serialization(_)
        )
    }
}
