use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("unsupported generator `{0}` (only sphere-embeddable trivalent graphs are available)")]
    UnsupportedGenerator(String),
    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("edge set is not a simple cycle: {0}")]
    NotACycle(String),
    #[error("pfaffian requested for a matrix of odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("series inversion needs constant term 1")]
    NonUnitConstantTerm,
    #[error("cannot add radicals sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(String, String),
    #[error("exponent of variable {var} is not an integer after halving")]
    NonIntegerExponent { var: usize },
    #[error("grassmann element is not homogeneous of degree 2")]
    NotQuadratic,
    #[error("berezin order is not a permutation of all {0} generators")]
    IncompleteOrder(usize),
    #[error("graph has an odd number of vertices ({0})")]
    OddVertexCount(usize),
    #[error("coloring is not admissible at vertex {0}")]
    InadmissibleColoring(usize),
    #[error("coloring has the wrong length: expected {expected}, got {actual}")]
    ColoringLength { expected: usize, actual: usize },
    #[error("sign (-1)^(sum J_v / 2) is not real: sum of colors {0} is odd")]
    FractionalSign(u64),
    #[error("whitehead move undefined on edge {0}: {1}")]
    InvalidEdge(usize, String),
    #[error("angle-to-edge map divides by a zero coupling at angle {0}")]
    ZeroCouplingDivision(usize),
    #[error("edge coupling is not representable as rational times square root: {0}")]
    NotRepresentable(String),
    #[error("loop polynomial vanishes at the requested couplings (Fisher zero)")]
    SingularCoupling,
    #[error("distribution ratio |<j>/(1+<j>)| = {0} is not below 1")]
    DivergentTail(f64),
    #[error("path is not simple: {0}")]
    PathNotSimple(String),
    #[error("degenerate triangle with sides {0:?}")]
    DegenerateTriangle([f64; 3]),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
