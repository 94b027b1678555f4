use thiserror::Error;

/// Crate-wide error type.  Structural misuse (degree mismatches, foreign
/// colours, unsorted words, ...) is reported here; *semantic* findings such
/// as Coxeter violations or equivariance failures are returned as data by
/// the respective validation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("images do not describe a bijection of 0..{degree}: {detail}")]
    NotABijection { degree: usize, detail: String },

    #[error("word not sorted at position {position} (1-based)")]
    UnsortedWord { position: usize },

    #[error("colour index {colour} outside colour set of size {size}")]
    ForeignColour { colour: usize, size: usize },

    #[error("invalid colour name `{name}`: {reason}")]
    BadColourName { name: String, reason: String },

    #[error("duplicate colour name `{name}`")]
    DuplicateColour { name: String },

    #[error("invalid element name `{name}`: {reason}")]
    BadElementName { name: String, reason: String },

    #[error("duplicate element name `{name}` at the same support point")]
    DuplicateElement { name: String },

    #[error("unknown element `{name}`")]
    UnknownElement { name: String },

    #[error("unknown colour `{name}`")]
    UnknownColour { name: String },

    #[error("element index {index} out of range (point has {size} elements)")]
    ElementOutOfRange { index: usize, size: usize },

    #[error("generator position {position} is not a stabilizer generator of the base word")]
    NotAYoungGenerator { position: usize },

    #[error("permutation does not stabilize the base word")]
    NotInStabilizer,

    #[error("group action invalid: {0}")]
    InvalidAction(String),

    #[error("a move maps a raw configuration outside the given raw set")]
    MoveOutsideRaws,

    #[error("a move is not injective on its domain")]
    MoveNotInjective,

    #[error("colour sets do not match: {context}")]
    ColourSetMismatch { context: String },

    #[error("sequences not composable: {context}")]
    NotComposable { context: String },

    #[error("morphism is malformed: {context}")]
    MalformedMorphism { context: String },

    #[error("not an isomorphism: {context}")]
    NotIso { context: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),

    #[error("{0}")]
    Invalid(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
