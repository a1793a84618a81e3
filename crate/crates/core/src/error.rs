use thiserror::Error;

/// Errors raised by the walk engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("lattice must have at least one beam splitter per row (got L = {0})")]
    EmptyLattice(usize),

    #[error("matrix is not unitary: max |W^dagger W - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix rows must all have length {expected}, row {row} has {found}")]
    RaggedMatrix { row: usize, expected: usize, found: usize },

    #[error("mode {mode} is outside 1..={modes}")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("Pauli violation at mode {mode}: fermionic occupation {occupation} > 1")]
    PauliViolation { mode: usize, occupation: u32 },

    #[error("{particles} particles exceed the supported maximum of {max}")]
    TooManyParticles { particles: usize, max: usize },

    #[error("occupation vector has {found} modes but the evolution matrix has {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("correlator order m = {m} outside 1..={particles}")]
    OrderOutOfRange { m: usize, particles: usize },

    #[error("source multiset draws {drawn} particles from mode {mode} holding only {held}")]
    OverdrawnSource { mode: usize, drawn: usize, held: u32 },

    #[error("two-mode correlator needs distinct modes, got {0} twice")]
    RepeatedMode(usize),

    #[error("{0} particles are not handled by this engine")]
    UnsupportedSpecies(crate::Species),

    #[error("expected a {expected}-mode table, got arity {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("moment table: {0}")]
    MalformedMoments(String),

    #[error("normalization defect {defect:e} exceeds the health gate {gate:e}")]
    NormalizationDefect { defect: f64, gate: f64 },

    #[error("conditioning event k_i + k_j = {m} has zero probability")]
    ZeroProbabilityCondition { m: usize },

    #[error("no mode pair has nonzero probability for k_i + k_j = {m}")]
    NoContributingPairs { m: usize },

    #[error("at most {max} watched modes are supported, got {found}")]
    TooManyWatchedModes { max: usize, found: usize },

    #[error("oracle cap exceeded: {what} = {value} > {cap}")]
    OracleCap { what: &'static str, value: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;
