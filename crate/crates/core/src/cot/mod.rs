//! Staged chain-of-thought pipeline.
//!
//! Every tick runs four perception stages (objects, traffic light, signs,
//! lane), then a decision stage and a waypoint stage. Each stage is prompted
//! with all earlier outputs of the same tick plus the serialized history of
//! the last few ticks, and every prompt/output pair is kept in a
//! [`TickTrace`].

mod history;
mod pipeline;
mod prompt;
mod types;

pub use history::{update_history, HistoryBuffer, HistoryEntry, DEFAULT_HISTORY_DEPTH};
pub use pipeline::{
    run_pipeline, Attachment, Observation, ObservationInput, PartialReports, PipelineFailure, Stage, StageContext,
    StageError, StageTrace, Staged, TickOutput, TickTrace,
};
pub use prompt::{render_prompts, PromptBundle};
pub use types::*;
