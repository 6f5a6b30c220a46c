use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain `{0}` has no elements")]
    EmptyDomain(String),

    #[error("state space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("state space has {size} states, above the table bound of {bound}")]
    SpaceTooLarge { size: u64, bound: u64 },

    #[error("value {value} is not in the domain of `{var}`")]
    OutOfDomain { var: String, value: i64 },

    #[error("merge conflict: both operands are defined and differ at state {state}")]
    MergeConflict { state: u32 },

    #[error("the second condition does not entail the first")]
    NotStronger,

    #[error("the first condition does not entail the second")]
    NotWeaker,

    #[error("state mapping is undefined at state {0}")]
    NonTotalPhi(u32),

    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("assignment has {rhs} right-hand values for {targets} targets")]
    Arity { targets: usize, rhs: usize },

    #[error("program `{0}` is not a while loop")]
    NotALoop(String),

    #[error("transform is undefined at source state {0}")]
    PartialT(u32),

    #[error("arrows are not composable: {0}")]
    NotComposable(String),

    #[error("arrow is not invertible: {0}")]
    NotInvertible(String),

    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn mismatch(what: impl Into<String>) -> Self {
        Error::SpaceMismatch(what.into())
    }
}
