use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree overflow: {left} + {right} > 8")]
    DegreeOverflow { left: usize, right: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("interior product of a 0-form")]
    InteriorOfScalar,

    #[error("arity mismatch: a {degree}-form was given {given} vectors")]
    Arity { degree: usize, given: usize },

    #[error("invalid multi-index {0:?}: indices must be strictly increasing in 1..=8")]
    InvalidIndex(Vec<u8>),

    #[error("form is not supported on indices 1..=7 (key {0})")]
    NotSevenDimensional(String),

    #[error("non-finite vector component")]
    NonFinite,

    #[error("degenerate span: gram volume {0:e}")]
    Degenerate(f64),

    #[error("vectors are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),

    #[error("normal frame is not orthogonal to the plane (residual {0:e})")]
    NotNormal(f64),

    #[error("z has component {0:e} along tau(u, v, w); the quadruple would not be an L-plane")]
    NotLPlane(f64),

    #[error("frame fails the orthonormal L-frame checks: {0}")]
    InvalidFrame(String),

    #[error("sampling failed after {0} attempts")]
    SamplingExhausted(usize),

    #[error("degenerate immersion at gridpoint {index:?} (gram det {det:e})")]
    DegenerateImmersion { index: [usize; 4], det: f64 },

    #[error("singular tangent-to-normal map at gridpoint {index:?} (det {det:e})")]
    SingularNormalMap { index: [usize; 4], det: f64 },

    #[error("displacement too large: t * max|V| = {0} > 0.5")]
    DisplacementTooLarge(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
