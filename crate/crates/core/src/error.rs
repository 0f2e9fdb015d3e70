use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid format: {0}")]
    InvalidFormat(String),
    #[error("state space too large: {states} states (limit {limit})")]
    TooLarge { states: u128, limit: u128 },
    #[error("format mismatch: {0}")]
    FormatMismatch(String),
    #[error("player {player} has zero marginal for strategy {strategy}")]
    ZeroMarginal { player: usize, strategy: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex sets overlap: {0}")]
    OverlappingSets(String),
    #[error("not a cluster graph: component {component:?} is not a clique")]
    NotCluster { component: Vec<usize> },
    #[error("vertex {0} is isolated; the linear form is only defined for non-isolated players")]
    IsolatedVertex(usize),
    #[error("graph is not decomposable: {0}")]
    NotDecomposable(String),
    #[error("linear stage is singular")]
    SingularLinearStage,
    #[error("wrong shape for the two-stage solver: {0}")]
    WrongShape(String),
    #[error("unknown dialect: {0}")]
    UnknownDialect(String),
    #[error("unknown fixture: {0}")]
    UnknownFixture(String),
    #[error("parameter outside the family region: {0}")]
    ParameterOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
