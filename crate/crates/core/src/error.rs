use std::fmt;

use thiserror::Error;

use crate::belief::ViewpointPath;
use crate::term::Term;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("contradiction at {path}: {attitude} conflicts with an existing belief")]
    Contradiction { path: ViewpointPath, attitude: String },
    #[error("viewpoint path {0} exceeds the nesting limit")]
    TooDeep(ViewpointPath),
    #[error("viewpoint path must not be empty")]
    EmptyPath,
    #[error("intention content {0} is not a registered action")]
    UnknownAction(Term),
    #[error("ascription target {to} must extend {from} by exactly one agent")]
    NotNested { from: ViewpointPath, to: ViewpointPath },
    #[error("{0} is not an attitude term")]
    NotAnAttitude(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActError {
    #[error("unknown act schema `{0}`")]
    UnknownSchema(String),
    #[error("malformed act {0}: expected act(speaker, hearer, content)")]
    Malformed(Term),
    #[error("speaker and hearer of {0} are the same agent")]
    SelfAddressed(Term),
    #[error("{0} has no matching question in the discourse")]
    MissingExpectation(Term),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("plan is incomplete: {0} open conditions")]
    Incomplete(usize),
    #[error("ordering constraints contain a cycle")]
    Cycle,
    #[error("step {index} ({action}) is missing precondition {missing}")]
    PreconditionFailed { index: usize, action: Term, missing: Term },
    #[error("operator {0}: effect variable ?{1} is not bound by any precondition")]
    UnboundEffectVar(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("undeclared agent `{0}`")]
    UndeclaredAgent(String),
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("turn {turn}: {speaker} speaks twice in a row")]
    TurnOrder { turn: usize, speaker: String },
    #[error(transparent)]
    Act(#[from] ActError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}
