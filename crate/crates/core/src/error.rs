//! Error types for every stage of the pipeline.

use thiserror::Error;

/// Errors from matrix-level operations (decomposition, frames, matching).
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix is not normal: relative defect {defect:.3e} exceeds {tol:.3e}")]
    NotNormal { defect: f64, tol: f64 },
    #[error("eigenvalue multiplicity collision: gap {gap:.3e} below {tol:.3e}")]
    MultiplicityCollision { gap: f64, tol: f64 },
    #[error("dimension {n} exceeds the brute-force cap {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("projection matching not unique: best max distance {maxdist:.4} is not below 1/2")]
    NoUniqueMatch { maxdist: f64 },
    #[error("frames do not share projections and pairing: defect {defect:.3e}")]
    FrameMismatch { defect: f64 },
    #[error("frame invariant violated: {0}")]
    InvalidFrame(String),
    #[error("spectral data invariant violated: {0}")]
    InvalidSpectralData(String),
}

/// Errors from simplicial-complex construction and I/O.
#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("invalid builder parameters: {0}")]
    InvalidParams(String),
    #[error("complex is not connected")]
    Disconnected,
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("complex file format error: {0}")]
    Format(String),
}

/// Errors from field registry and evaluation.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("unknown builtin field: {0}")]
    UnknownBuiltin(String),
    #[error("bad field spec `{spec}`: {reason}")]
    BadSpec { spec: String, reason: String },
    #[error("chart domain error: field `{field}` cannot evaluate {got}")]
    ChartDomain { field: String, got: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Errors from eigenvalue transport and the local system.
#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error("edge refinement exceeded 2^{doublings} steps (last max step distance {maxdist:.4})")]
    RefinementExceeded { doublings: u32, maxdist: f64 },
    #[error("inconsistent local system: 2-cell {cell} has non-identity boundary composite")]
    InconsistentSystem { cell: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors from the twisted cochain complex and integer linear algebra.
#[derive(Debug, Error)]
pub enum CohomologyError {
    #[error("invalid coefficient system: {0}")]
    InvalidSystem(String),
    #[error("cochain is not a cocycle: δθ has a nonzero entry at block {0}")]
    NotACocycle(usize),
    #[error("cochain shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("integer overflow converting solution entry: {0}")]
    Overflow(String),
}

/// Errors from the obstruction pipeline.
#[derive(Debug, Error)]
pub enum ObstructionError {
    #[error("pair is inadmissible: {0}")]
    Inadmissible(String),
    #[error("fields do not share a characteristic polynomial (max eigenvalue mismatch {0:.3e})")]
    CharPolyMismatch(f64),
    #[error("local systems built from the two fields disagree on edge {0}")]
    SystemMismatch(usize),
    #[error(
        "winding residual {residual:.4} cycles on cell {cell} reached the {max:.2} limit \
         after {retries} subdivision retries"
    )]
    ResidualTooLarge { cell: usize, residual: f64, max: f64, retries: u32 },
    #[error("degenerate overlap {overlap:.4} during link transport on edge {edge}")]
    DegenerateOverlap { edge: usize, overlap: f64 },
    #[error("no primitive available: the obstruction class does not vanish")]
    NoPrimitive,
    #[error("field is not globally split; eigenbundle Chern numbers are undefined")]
    NotSplit,
    #[error("complex is not a closed oriented surface; no fundamental cycle")]
    NoFundamentalCycle,
    #[error("boundary index bookkeeping aborted on cell {0}: loop composite is not the identity")]
    LoopComposite(usize),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Top-level error for CLI dispatch.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error("unknown example: {0}")]
    UnknownExample(String),
    #[error("{0}")]
    Other(String),
}

impl Error {
    /// Exit code contract: 0 = computed, 2 = inadmissible input,
    /// 3 = refinement exceeded. Verdicts never influence the code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Obstruction(ObstructionError::Inadmissible(_))
            | Error::Obstruction(ObstructionError::CharPolyMismatch(_))
            | Error::Matrix(MatrixError::MultiplicityCollision { .. })
            | Error::Matrix(MatrixError::NotNormal { .. })
            | Error::Field(_)
            | Error::Complex(_) => 2,
            Error::Obstruction(ObstructionError::ResidualTooLarge { .. })
            | Error::Obstruction(ObstructionError::DegenerateOverlap { .. })
            | Error::Obstruction(ObstructionError::Monodromy(
                MonodromyError::RefinementExceeded { .. },
            ))
            | Error::Monodromy(MonodromyError::RefinementExceeded { .. }) => 3,
            Error::Obstruction(ObstructionError::Matrix(MatrixError::NotNormal { .. }))
            | Error::Obstruction(ObstructionError::Matrix(
                MatrixError::MultiplicityCollision { .. },
            ))
            | Error::Obstruction(ObstructionError::Field(_)) => 2,
            Error::Obstruction(ObstructionError::Monodromy(MonodromyError::Matrix(
                MatrixError::MultiplicityCollision { .. },
            ))) => 2,
            _ => 1,
        }
    }
}
