use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::model::{PlayerId, TeamId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("missing required column {0}")]
    MissingColumn(String),

    #[error("unknown team {team} in game {game_id}")]
    UnknownTeam { game_id: String, team: TeamId },

    #[error("mis-joined event {event_id}: {reason}")]
    MisJoined { event_id: i64, reason: String },

    #[error("{0}")]
    Empty(String),

    #[error("degenerate target")]
    DegenerateTarget,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("player {player}: {source}")]
    Player {
        player: PlayerId,
        #[source]
        source: Box<Error>,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Short stable identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::MissingColumn(_) => "missing_column",
            Error::UnknownTeam { .. } => "unknown_team",
            Error::MisJoined { .. } => "mis_joined",
            Error::Empty(_) => "empty",
            Error::DegenerateTarget => "degenerate_target",
            Error::Config(_) => "config",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Player { .. } => "player_model",
            Error::Verification(_) => "verification",
        }
    }
}

/// Counted, non-fatal problems met while processing data.
///
/// Parsers and pipeline stages skip bad records instead of failing; every skip
/// is tallied here under a short kind key and logged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Warnings {
    counts: BTreeMap<String, usize>,
    messages: Vec<String>,
}

impl Warnings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: &str, message: impl Into<String>) {
        let message = message.into();
        log::debug!("{kind}: {message}");
        *self.counts.entry(kind.to_string()).or_default() += 1;
        self.messages.push(format!("{kind}: {message}"));
    }

    pub fn count(&self, kind: &str) -> usize {
        self.counts.get(kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &BTreeMap<String, usize> {
        &self.counts
    }

    pub fn messages(&self) -> &[String] {
        &self.messages
    }

    pub fn merge(&mut self, other: Warnings) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.messages.extend(other.messages);
    }
}
