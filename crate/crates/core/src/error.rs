use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} is outside the state space {space}")]
    DomainViolation { space: String, point: String },

    #[error("integration produced a non-finite state at {point}")]
    NonFiniteState { point: String },

    #[error("requested {requested} exceeds the configured limit of {limit} for {what}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("measures live on different spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error("parse error at position {position} in {input:?}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },

    #[error("point {point} does not close after period {period} (gap {gap:e})")]
    NonPeriodic {
        point: String,
        period: usize,
        gap: f64,
    },

    #[error("bump neighbourhoods of radius {radius} around the two orbits intersect")]
    Overlap { radius: f64 },

    #[error("parameters outside the supported regime: {0}")]
    ParameterRegime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown {kind} {name:?}; available: {available}")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("matrix product collapsed to zero at step {step} despite renormalization")]
    SingularCollapse { step: usize },

    #[error("potential {label} failed the subadditivity check (violation {violation:e})")]
    NotSubadditive { label: String, violation: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(input: &str, position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            position,
            message: message.into(),
        }
    }

    pub(crate) fn unknown<'a>(
        kind: &'static str,
        name: &str,
        available: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        Error::UnknownName {
            kind,
            name: name.to_string(),
            available: available.into_iter().collect::<Vec<_>>().join(", "),
        }
    }
}
