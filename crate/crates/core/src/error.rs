use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid norm spec: {0}")]
    InvalidSpec(String),
    #[error("transform matrix is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("point {0} is not on the unit sphere")]
    NotOnSphere(String),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("adaptive quadrature did not reach tolerance on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("r(s) and r'±(s) are numerically dependent at s = {s} (|det| = {det:e})")]
    DegenerateBasis { s: f64, det: f64 },
    #[error("the curve is not differentiable at b = {0}")]
    NotDifferentiableAtB(f64),
    #[error("chord endpoints coincide")]
    CoincidentPoints,
    #[error("parameter 0 is not a corner (derivative gap {gap:e})")]
    NotACorner { gap: f64 },
    #[error("recovery system is singular (determinant {det:e})")]
    SingularSystem { det: f64 },
    #[error("chord is not aligned with e1 (misalignment {0:e})")]
    BadChordAlignment(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("point lies on the supporting set of the direction")]
    OnPerpSet,
    #[error("point is outside the component determined by the direction")]
    OutsideComponent,
    #[error("no sample points in the component")]
    DegenerateComponent,
    #[error("direction pair is singular")]
    SingularPair,
    #[error("no sign change of the angular defect ({0})")]
    NoBracket(String),
    #[error("map is not isometric: deviation {deviation:e} at stage '{stage}'")]
    NotIsometric { stage: &'static str, deviation: f64 },
    #[error("expected exactly 2 non-smooth points, found {0}")]
    WrongCornerCount(usize),
    #[error("half-lengths differ: {source_len} vs {target_len}")]
    HalfLengthMismatch { source_len: f64, target_len: f64 },
    #[error("corner jumps differ by {0:e}")]
    JumpMismatch(f64),
    #[error("verification failed at stage '{stage}': deviation {deviation:e}")]
    VerificationFailure { stage: &'static str, deviation: f64 },
    #[error("point is not on the upper half-sphere")]
    NotOnHalfSphere,
    #[error("parse error at line {line}, key '{key}': {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
