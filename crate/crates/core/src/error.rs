use crate::entities::Team;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no {team} robot with id {id} in frame")]
    RobotNotFound { team: Team, id: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid command: {0}")]
    Command(String),

    #[error("invalid action: {0}")]
    Action(String),

    #[error("invalid environment state: {0}")]
    State(String),

    #[error("environment setup failed: {0}")]
    Setup(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid render style: {0}")]
    Style(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown environment id {id:?}; registered ids: {}", known.join(", "))]
    UnknownEnv { id: String, known: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
