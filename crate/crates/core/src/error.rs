use thiserror::Error;

use crate::words::Context;

/// Errors raised by the library. Domain errors only; usage errors live in the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid character {ch:?} in word")]
    InvalidChar { ch: char },

    #[error("generator {ch:?} is not available in the {ctx} context")]
    BaseNotAllowed { ch: char, ctx: Context },

    #[error("context mismatch: {left} vs {right}")]
    ContextMismatch { left: Context, right: Context },

    #[error("letter {0:?} has no P Gamma(2) matrix")]
    NoMatrix(char),

    #[error("cannot parse fraction {0:?}")]
    BadFraction(String),

    #[error("matrix is not in P Gamma(2): {0}")]
    NotInGamma2(String),

    #[error("matrix is not a non-trivial parabolic")]
    NotParabolic,

    #[error("word {0} is not in the subgroup H")]
    NotInH(String),

    #[error("exponent {0} is not divisible by 3")]
    ExponentNotCube(i64),

    #[error("iteration cap of {cap} exceeded")]
    CapExceeded { cap: usize },

    #[error("wreath degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("generator {0:?} has no image in this recursion")]
    UnknownGenerator(char),

    #[error("bad tree address {0:?}")]
    BadAddress(String),

    #[error("level {level} too large for degree {degree}")]
    LevelTooLarge { level: usize, degree: usize },

    #[error("recursion parse error on line {line}: {msg}")]
    RecursionParse { line: usize, msg: String },

    #[error("unknown built-in recursion {0:?}")]
    UnknownRecursion(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
