use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable sets differ: [{0}] vs [{1}]")]
    VariableMismatch(String, String),
    #[error("u-exponent {exp} outside window [-{max}, {max}]")]
    UWindowOverflow { exp: i32, max: i32 },
    #[error("truncation parameters differ: {0}")]
    TruncationMismatch(String),
    #[error("W is not an isolated singularity: {0}")]
    NonIsolated(String),
    #[error("W is not invariant under group element {0}")]
    NotInvariant(String),
    #[error("degenerate sector quotient for {0}")]
    DegenerateSector(String),
    #[error("cochain is not G-invariant: {0}")]
    NonInvariantCochain(String),
    #[error("closed form and composition disagree on {word}: {detail}")]
    ClosedFormMismatch { word: String, detail: String },
    #[error("linear system inconsistent: {0}")]
    Inconsistent(String),
    #[error("side condition `{condition}` fails on piece {piece}")]
    SideCondition { condition: String, piece: String },
    #[error("perturbation series did not terminate within {0} iterations")]
    SeriesDiverged(usize),
    #[error("stabilization failure: {0}")]
    Stabilization(String),
    #[error("unknown direction `{0}`")]
    UnknownDirection(String),
    #[error("chain is not a cycle modulo caps: {0}")]
    NotACycle(String),
    #[error("cap mismatch: {0}")]
    CapMismatch(String),
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("field does not contain the root of unity of order {0}")]
    MissingRootOfUnity(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
