//! Error types shared across the crate.

use thiserror::Error;

/// Planning, validation and I/O errors.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario failed a named validation check.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// A target-tree line cannot be made collision-free.
    #[error("target-tree model infeasible at fixed steer {steer_deg:.1} deg")]
    ModelInfeasible { steer_deg: f64 },

    /// Free-space sampling rejected too many points in a row.
    #[error("workspace appears fully blocked: {rejections} consecutive sample rejections")]
    WorkspaceFull { rejections: usize },

    /// The step budget ran out before the tree reached its target.
    #[error("no path found after {steps} steps (best squared configuration distance {best_distance})")]
    NoPathFound { steps: usize, best_distance: f64 },

    /// A path handed to the smoother replays into collision.
    #[error("input path replays into collision at primitive {index}")]
    PathInCollision { index: usize },

    /// Scenario or path file syntax problem.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidScenario(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, message: msg.into() }
    }
}

/// Returned by `point_pursuit` when no collision-free primitive exists in
/// either direction. The planner discards the growth attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocked;

impl std::fmt::Display for Blocked {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "no collision-free primitive in either direction")
    }
}

impl std::error::Error for Blocked {}
