use thiserror::Error;

/// Errors shared across the crate. Construction errors are raised eagerly so
/// that a value that exists is always valid.
#[derive(Debug, Error)]
pub enum Error {
    #[error("facet list contains an empty facet")]
    EmptyFacet,

    #[error("vertex id {id} out of range (vertex count {count})")]
    VertexOutOfRange { id: usize, count: usize },

    #[error("complex would exceed the size cap of {cap} simplices")]
    SizeCapExceeded { cap: usize },

    #[error("map enumeration exceeded the cap of {cap} maps")]
    EnumerationCapExceeded { cap: usize },

    #[error("circle complex needs at least 3 vertices, got {0}")]
    CircleTooSmall(usize),

    #[error("boundary of the {0}-simplex is not representable as a nonempty complex")]
    BoundaryTooSmall(usize),

    #[error("assignment length {got} does not match domain vertex count {want}")]
    AssignmentLength { got: usize, want: usize },

    #[error("label list length {got} does not match vertex count {want}")]
    LabelCount { got: usize, want: usize },

    #[error("geometric vertex weights must be positive and sum to 1")]
    BadWeights,

    #[error("geometric vertex support is not a simplex of the ancestor complex")]
    SupportNotSimplex,

    #[error("maps must share one domain and one codomain")]
    MixedComplexes,

    #[error("map is not simplicial: simplex {simplex:?} has non-simplex image")]
    NotSimplicial { simplex: Vec<usize> },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("filtration stages are not nested at stage {0}")]
    NotNested(usize),

    #[error("simplex not present in the refined complex")]
    UnknownSimplex,

    #[error("codomain is not the complex of the given Rips construction")]
    NotRipsCodomain,

    #[error("distance matrix is not symmetric with zero diagonal at ({i}, {j})")]
    BadMetric { i: usize, j: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("connecting map at stage {0} is not vertex-surjective")]
    NotVertexSurjective(usize),

    #[error("connecting map at stage {0} does not preserve the base vertex")]
    BaseNotPreserved(usize),

    #[error("closed-walk sampler found zero admissible walks")]
    NoWalks,

    #[error("vertex map is not listed in the mapping complex (check max_dim and based settings)")]
    MapNotInTable,

    #[error("stage range {lo}..={hi} out of bounds for {stages} stages")]
    BadStageRange { lo: usize, hi: usize, stages: usize },

    #[error("estimator requires a connected codomain 1-skeleton")]
    DisconnectedCodomain,

    #[error("invalid walk config: {0}")]
    BadConfig(&'static str),
}
