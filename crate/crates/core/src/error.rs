use thiserror::Error;

/// Errors raised by the geometric, projection and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("half-space intersection is unbounded")]
    UnboundedRegion,
    #[error("half-space intersection is empty")]
    EmptyRegion,
    #[error("invalid polyhedron: {0}")]
    InvalidPolyhedron(String),
    #[error("clearance unsatisfiable: {0}")]
    ClearanceUnsatisfiable(String),
    #[error("merge degenerate: gap rotondity {min_rotondity:.4} below floor {floor:.4}")]
    MergeDegenerate { min_rotondity: f64, floor: f64 },
    #[error("period {period} on axis {axis} is not a multiple of stride {stride}")]
    PeriodMismatch { axis: usize, period: f64, stride: f64 },
    #[error("radial projection center coincides with the projected point")]
    CenterHit,
    #[error("no admissible projection center among {candidates} candidates")]
    NoCenterFound { candidates: usize },
    #[error("subdivision exceeded depth {depth} before the image measure settled")]
    SubdivisionLimit { depth: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("initial skeleton is not admissible for the constraint oracle")]
    InitInadmissible,
    #[error("input set leaves the complex (measure {measure:.3e} outside)")]
    OutsideComplex { measure: f64 },
    #[error("minimizing sequence did not converge after {strides} strides")]
    NotConverged { strides: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
