use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population must have at least 2 agents, got {0}")]
    InvalidPopulation(usize),

    #[error("initial weight must be positive and finite, got {0}")]
    InvalidInitialWeight(f64),

    #[error("matrix is not square: expected {expected} columns in row {row}, found {found}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("diagonal entry ({0},{0}) must be zero")]
    NonzeroDiagonal(usize),

    #[error(
        "entry ({row},{col}) = {value} is negative; negative payoffs need the resistance rule"
    )]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("row {0} has no positive off-diagonal weight")]
    DegenerateRow(usize),

    #[error("resistance ({row},{col}) is zero; reciprocal undefined")]
    ZeroResistance { row: usize, col: usize },

    #[error("resistance rule only accepts non-positive payoffs, got {0}")]
    PositivePayoff(f64),

    #[error("row {row} of probability matrix sums to {sum}, not 1")]
    RowSum { row: usize, sum: f64 },

    #[error("entry ({row},{col}) = {value} is not a probability")]
    InvalidProbability { row: usize, col: usize, value: f64 },

    #[error("{name} = {value} is out of range ({range})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("agent index {index} out of range for population {n}")]
    AgentIndex { index: usize, n: usize },

    #[error("agent {0} cannot visit itself")]
    SelfVisit(usize),

    #[error("agent type {agent_type:?} is not valid for game {game:?}")]
    TypeMismatch {
        game: crate::state::GameName,
        agent_type: crate::state::AgentType,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("urn has no balls to move")]
    EmptyUrn,

    #[error("transfer rule is defined for exactly 3 agents, got {0}")]
    TransferPopulation(usize),

    #[error("transfer rule needs integer ball counts, found {0}")]
    FractionalBalls(f64),

    #[error("sample is empty")]
    EmptySample,

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::OutOfRange { name, value, range }
    }
}
