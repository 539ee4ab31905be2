use crate::cycle::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("bias {0} outside [-1, 1]")]
    BiasOutOfRange(f64),

    #[error("bias {0} has no finite temperature")]
    InfiniteTemperature(f64),

    #[error("energy gap must be positive, got {0}")]
    NonPositiveGap(f64),

    #[error("norm {0} outside [0, 1]")]
    NormOutOfRange(f64),

    #[error("system gap {system} does not match virtual qubit gap {virtual_gap}")]
    GapMismatch { system: f64, virtual_gap: f64 },

    #[error("invalid cycle: {}", fmt_violations(.0))]
    InvalidCycle(Vec<Violation>),

    #[error("virtual qubit gap E_n - E_1 must be positive, got {0}")]
    VirtualGap(f64),

    #[error("invalid design parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate machine: {0}")]
    Degenerate(String),

    #[error("search grid: {0}")]
    Grid(String),

    #[error("coupling graph: {0}")]
    Graph(String),

    #[error("generator is reducible; the steady state is not unique")]
    Reducible,

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("system marginal has a zero population")]
    ZeroMarginal,
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
