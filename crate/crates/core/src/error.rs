use thiserror::Error;

/// Failure to read an Abbadingo sample.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input is empty")]
    Empty,
    #[error("malformed header: {0}")]
    Header(&'static str),
    #[error("line {line}: malformed integer")]
    BadInteger { line: usize },
    #[error("line {line}: missing type or length field")]
    MissingField { line: usize },
    #[error("line {line}: declared length {declared} but {found} symbols present")]
    LengthMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
    #[error("line {line}: symbol {symbol} is not below the alphabet size {alphabet_size}")]
    SymbolOutOfRange {
        line: usize,
        symbol: u32,
        alphabet_size: u32,
    },
    #[error("header declares {declared} traces but {found} are present")]
    CountMismatch { declared: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("state {0} has no occurrences; its distribution is undefined")]
    EmptyState(u32),
    #[error("probability lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("candidate probability at index {0} is zero or not finite")]
    ZeroProbability(usize),
    #[error("probability list is empty or sums to zero")]
    EmptyDistribution,
    #[error("degrees of freedom must be at least 1")]
    InvalidDegreesOfFreedom,
    #[error("undo log is not the most recently applied merge")]
    UndoOrder,
}
