use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("malformed team: {0}")]
    MalformedTeam(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("episode is already done")]
    EpisodeDone,
    #[error("no action supplied for external slot {slot}")]
    MissingAction { slot: usize },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config serialize error: {0}")]
    Serialize(#[from] toml::ser::Error),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
