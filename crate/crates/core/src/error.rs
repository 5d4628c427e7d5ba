use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: u32, found: u32 },

    #[error("no frames given")]
    EmptyFrames,

    #[error("missing ego pose for frame {0}")]
    MissingPose(u32),

    #[error("duplicate observation of track {track_id} in frame {frame}")]
    DuplicateObservation { frame: u32, track_id: i64 },

    #[error("velocity not set for state at frame {0}")]
    MissingVelocity(u32),

    #[error("unknown track id {0}")]
    UnknownTrack(u64),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
