use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: gpregime::Error,
    },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn stage(stage: impl Into<String>) -> impl FnOnce(gpregime::Error) -> CliError {
        let stage = stage.into();
        move |source| CliError::Stage { stage, source }
    }

    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}
