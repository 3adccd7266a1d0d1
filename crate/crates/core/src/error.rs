use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // graph validation
    #[error("weight matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("non-finite weight at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("asymmetric weights: w({i},{j}) = {wij} but w({j},{i}) = {wji}")]
    AsymmetricWeights { i: usize, j: usize, wij: f64, wji: f64 },
    #[error("self-loop on node {node}{}", line_suffix(*.line))]
    SelfLoop { node: usize, line: Option<usize> },
    #[error("negative weight w({i},{j}) = {weight}")]
    NegativeWeight { i: usize, j: usize, weight: f64 },
    #[error("graph is disconnected: nodes {unreachable:?} are unreachable from node 0")]
    Disconnected { unreachable: Vec<usize> },

    // spectral
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("negative eigenvalue {0} (input is not a Laplacian)")]
    NegativeEigenvalue(f64),
    #[error("cannot symmetrize: degree of node {node} is {degree}")]
    NonSimilarizable { node: usize, degree: f64 },
    #[error("fractional exponent {0} outside (0, 1]")]
    InvalidAlpha(f64),

    // non-local constructions
    #[error("fractional weight w({i},{j}) = {weight} is not positive")]
    NonPositiveFractionalWeight { i: usize, j: usize, weight: f64 },
    #[error("zero distance between distinct nodes {i} and {j}")]
    ZeroDistance { i: usize, j: usize },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    // compatibility
    #[error("node count mismatch: base has {base}, supergraph has {sup}")]
    SizeMismatch { base: usize, sup: usize },
    #[error("base edge {{{i},{j}}} has no positive-weight image in the supergraph")]
    EdgeNotPreserved { i: usize, j: usize },
    #[error("invalid node mapping: {0}")]
    InvalidMapping(String),
    #[error("edge mask disconnects the graph: nodes {unreachable:?} unreachable")]
    MaskDisconnects { unreachable: Vec<usize> },
    #[error("node {0} has no edge in the mask")]
    EmptyRow(usize),

    // regularization
    #[error("non-local graph was built from {found}, expected {expected}")]
    OriginMismatch { expected: String, found: String },
    #[error("base graph is complete: no pair lies off its edge set")]
    BaseComplete,
    #[error("all off-edge non-local weights are zero; heuristic undefined")]
    ZeroOffEdgeWeight,
    #[error("regularization parameter beta must be positive and finite, got {0}")]
    InvalidBeta(f64),

    // dynamics & analytics
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("eigenvalue one of the walk operator has multiplicity {0}")]
    DegenerateEigenvalueOne(usize),
    #[error("first-step system for target {target} is singular")]
    SingularSystem { target: usize },

    // generators
    #[error("expected {expected} edge weights, got {got}")]
    BadWeightCount { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    // io
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate edge {{{i},{j}}} at line {line}")]
    DuplicateEdge { i: usize, j: usize, line: usize },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::TooFewNodes(_) => "TooFewNodes",
            Error::NonFinite { .. } => "NonFinite",
            Error::AsymmetricWeights { .. } => "AsymmetricWeights",
            Error::SelfLoop { .. } => "SelfLoop",
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::Disconnected { .. } => "Disconnected",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::NegativeEigenvalue(_) => "NegativeEigenvalue",
            Error::NonSimilarizable { .. } => "NonSimilarizable",
            Error::InvalidAlpha(_) => "InvalidAlpha",
            Error::NonPositiveFractionalWeight { .. } => "NonPositiveFractionalWeight",
            Error::ZeroDistance { .. } => "ZeroDistance",
            Error::InvalidKernel(_) => "InvalidKernel",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::EdgeNotPreserved { .. } => "EdgeNotPreserved",
            Error::InvalidMapping(_) => "InvalidMapping",
            Error::MaskDisconnects { .. } => "MaskDisconnects",
            Error::EmptyRow(_) => "EmptyRow",
            Error::OriginMismatch { .. } => "OriginMismatch",
            Error::BaseComplete => "BaseComplete",
            Error::ZeroOffEdgeWeight => "ZeroOffEdgeWeight",
            Error::InvalidBeta(_) => "InvalidBeta",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::DegenerateEigenvalueOne(_) => "DegenerateEigenvalueOne",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::BadWeightCount { .. } => "BadWeightCount",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Parse { .. } => "ParseError",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::Io(_) => "Io",
        }
    }
}
