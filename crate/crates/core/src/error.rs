use thiserror::Error;

/// Everything that can go wrong while building graphs, evolving states or
/// running threshold searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph is not two-colorable: odd cycle through edge ({0}, {1})")]
    OddCycle(usize, usize),

    #[error("edge ({0}, {1}) listed more than once")]
    DuplicateEdge(usize, usize),

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("bad parameter {name} = {value}: {reason}")]
    BadParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Pauli probabilities {0:?} are not a distribution")]
    BadDistribution([f64; 4]),

    #[error("coefficient {index} is negative ({value:e})")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("post-selection succeeded with probability {0:e}")]
    ZeroSuccess(f64),

    #[error("no nontrivial fixed point: {0}")]
    NoFixedPoint(String),

    #[error("predicate does not change sign on [{lo}, {hi}] for {what}")]
    BracketError { what: String, lo: f64, hi: f64 },

    #[error("no fidelity gain anywhere at p = {0}")]
    EmptyRegion(f64),

    #[error("{qubits} qubits exceed the dense simulator limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::BadParam {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}
