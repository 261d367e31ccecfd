use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse number `{0}`")]
pub struct ParseNumberError(pub String);

/// Errors raised by model construction and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The schedule does not fit the instance (unknown job or machine,
    /// wrong number of private completions). Distinct from feasibility.
    #[error("schedule does not match instance: {0}")]
    Structural(String),

    #[error("schedule is infeasible: {}", format_violations(.0))]
    Infeasible(Vec<Violation>),

    #[error("invalid synchronized schedule: {0}")]
    InvalidSynchronized(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// A solver declined the input (budget, instance class).
    #[error("refused: {0}")]
    Refused(String),

    #[error("linear program is {0}")]
    LpStatus(String),

    /// A structural transformation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A shift is outside the doable range of a modification step.
    #[error("shift not doable: {0}")]
    NotDoable(String),

    /// An identity that must hold exactly was broken.
    #[error("internal invariant breached: {0}")]
    Invariant(String),

    #[error(transparent)]
    Number(#[from] ParseNumberError),

    #[error("input error: {0}")]
    Input(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
