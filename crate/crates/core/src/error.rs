use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("presentation does not terminate within word length {bound}")]
    NonTerminatingPresentation { bound: usize },
    #[error("invalid relation `{0}`")]
    InvalidRelation(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("unknown element `{element}` at object `{object}`")]
    UnknownElement { object: String, element: String },
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("map is not a monomorphism: {0}")]
    NotMono(String),
    #[error("dimension budget exceeded: {0}")]
    DimensionBudgetExceeded(String),
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error("postcondition failure: {0}")]
    PostconditionFailure(String),
    #[error("no filler: {0}")]
    NoFiller(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
