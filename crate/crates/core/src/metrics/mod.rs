//! Detection, waypoint and closed-loop metrics, and their table layouts.

mod closed_loop;
mod detection;
mod tables;
mod trajectory;

pub use closed_loop::{aggregate_suite, score_episode, score_episode_with, EpisodeOutcome, EpisodeResult, Penalties};
pub use detection::{detection_summary, iou3d, match_boxes, BoxMatching, DetectionSummary, IOU_THRESHOLD};
pub use tables::{
    closed_loop_cells, closed_loop_table, detection_cells, detection_row, detection_table, waypoint_cells,
    waypoint_row, waypoint_table, Table, CLOSED_LOOP_COLUMNS, DETECTION_COLUMNS, DETECTION_TITLE, WAYPOINT_COLUMNS,
};
pub use trajectory::{ade_fde, mean_trajectory, TrajectorySummary, ADE_HORIZONS};
