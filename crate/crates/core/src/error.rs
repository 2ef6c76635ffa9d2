use thiserror::Error;

use crate::rtrm::{ExcState, LifecycleEvent};

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    /// A value fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Observed series has zero variance; Nash-Sutcliffe is undefined.
    #[error("observed series is constant; Nash-Sutcliffe denominator is zero")]
    DegenerateObserved,

    #[error("quantile {0} outside [0, 1]")]
    QuantileOutOfRange(f64),

    /// Failure while computing one ensemble member.
    #[error("ensemble iteration {index}: {source}")]
    Iteration {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Failure inside one managed batch; the log keeps every batch that
    /// completed before it.
    #[error("managed batch {batch}: {source}")]
    ManagedBatch {
        batch: usize,
        completed: crate::rtrm::BatchLog,
        #[source]
        source: Box<Error>,
    },

    #[error("allocation of {cores} cores exceeds {managed} managed cores")]
    AllocationExceedsManaged { cores: u32, managed: u32 },

    #[error("frequency {freq_mhz} MHz is not a platform level")]
    UnknownFrequency { freq_mhz: u32 },

    #[error("system load {0} outside [0, 100]")]
    LoadOutOfRange(f64),

    #[error("invalid lifecycle transition: ({state:?}, {event:?})")]
    InvalidTransition {
        state: ExcState,
        event: LifecycleEvent,
    },

    #[error("recipe error: {0}")]
    Recipe(String),

    #[error("duplicate AWM id {0} in recipe")]
    DuplicateAwmId(u32),

    #[error("recipe contains no AWMs")]
    EmptyRecipe,

    #[error("empty grid axis: {0}")]
    EmptyAxis(&'static str),

    #[error("cannot emit a recipe from an empty Pareto front")]
    EmptyFront,

    #[error("worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
