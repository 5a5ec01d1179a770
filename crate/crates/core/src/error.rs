use thiserror::Error;

use crate::simplex::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a simplex needs at least one vertex")]
    InvalidSimplex,
    #[error("dimension {dim} is out of range for a simplex of dimension {max}")]
    InvalidDimension { dim: isize, max: usize },
    #[error("vertex {0} is not part of the complex")]
    UnknownVertex(VertexId),
    #[error("simplex {0} is not present in the complex")]
    SimplexNotPresent(String),
    #[error("slice {got} applied out of order (expected {expected})")]
    SliceOrderViolation { expected: usize, got: usize },
    #[error("vertex {0} already belongs to the simplex")]
    VertexAlreadyMember(VertexId),
    #[error("candidate vertex {0} lies outside the k-ball of the simplex")]
    CandidateOutsideBall(VertexId),
    #[error("feature vectors have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("label slice {0} is missing from the filtration")]
    LabelSliceMissing(usize),
    #[error("no observations within the kernel support (global base rate {fallback:.6})")]
    InsufficientData { fallback: f64 },
    #[error("at least {needed} slices are required, got {got}")]
    InsufficientSlices { needed: usize, got: usize },
    #[error("malformed dataset: {0}")]
    MalformedDataset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot split {arrivals} arrivals into {slices} slices")]
    TooManySlices { slices: usize, arrivals: usize },
    #[error("only {available} positive samples available, {requested} requested")]
    InsufficientPositives { available: usize, requested: usize },
    #[error("only {available} negative samples available, {requested} requested")]
    InsufficientNegatives { available: usize, requested: usize },
    #[error("AUC needs both positive and negative labels")]
    DegenerateLabels,
    #[error("the beta grid is empty")]
    EmptyGrid,
    #[error("the starting snapshot has no {0}-simplices")]
    DegenerateStart(usize),
    #[error("the sample has zero variance")]
    DegenerateDistribution,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
