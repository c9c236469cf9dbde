//! Error type shared by every engine module.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("branch {branch}: defining polynomial does not vanish on the parametrization (order {order})")]
    BranchNotOnCurve { branch: usize, order: i64 },

    #[error("branches {first} and {second} cannot be told apart at precision {precision}")]
    NonReduced {
        first: usize,
        second: usize,
        precision: i64,
    },

    #[error("branch {branch}: parametrization is not primitive (exponent gcd {gcd})")]
    NonPrimitive { branch: usize, gcd: i64 },

    #[error("branch {branch}: {message}")]
    InvalidBranch { branch: usize, message: String },

    #[error("precision exhausted: {context} needs precision {needed}, cap is {cap}")]
    PrecisionExhausted {
        context: String,
        needed: i64,
        cap: i64,
    },

    #[error("conductor did not stabilize: {0}")]
    ConductorNotStabilized(String),

    #[error("ideal is not of finite colength below degree {degree_cap}")]
    NonIsolated { degree_cap: u32 },

    #[error("inclusion of fractional ideals could not be certified: {0}")]
    InclusionNotCertified(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle mismatch in {what}: formula {formula}, oracle {oracle}")]
    OracleMismatch {
        what: String,
        formula: i64,
        oracle: i64,
    },
}
