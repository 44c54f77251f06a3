use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the chart domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("geodesic exceeded arclength cap {cap} without leaving the disk (trapping suspected)")]
    TrappingSuspected { cap: f64 },

    #[error("geodesic left the disk at arclength {exit} before reaching offset {offset}")]
    ExitBeforeOffset { exit: f64, offset: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("tiling rejected: {0}")]
    InvalidTiling(String),

    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),

    #[error("tangent line nearly parallel to a sector edge at angle {angle}")]
    NearInfiniteChord { angle: f64 },

    #[error("weight is not injective (margin {margin:e})")]
    NonInjectiveWeight { margin: f64 },

    #[error("ill-posed sampling: {0}")]
    IllPosedSampling(String),

    #[error("batch {batch}: no admissible data ({reason})")]
    Coverage { batch: usize, reason: String },

    #[error("batch {batch}: condition number {condition:e} exceeds {limit:e}")]
    IllPosedStep {
        batch: usize,
        condition: f64,
        limit: f64,
    },

    #[error("foliation function is not certified convex (margin {margin})")]
    NotConvex { margin: f64 },
}
