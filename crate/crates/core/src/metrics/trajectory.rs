use crate::cot::{WaypointPlan, PLAN_POINTS};
use serde::{Deserialize, Serialize};

/// Horizons reported for ADE, seconds.
pub const ADE_HORIZONS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectorySummary {
    /// ADE at each of [`ADE_HORIZONS`].
    pub ade: [f64; 4],
    pub fde: f64,
}

/// Displacement errors between two plans sharing the fixed time layout.
pub fn ade_fde(pred: &WaypointPlan, gt: &WaypointPlan) -> TrajectorySummary {
    let times = WaypointPlan::times();
    let err: [f64; PLAN_POINTS] = std::array::from_fn(|i| pred.points[i].dist(gt.points[i]));
    let ade = ADE_HORIZONS.map(|h| {
        let within: Vec<f64> = (0..PLAN_POINTS).filter(|&i| times[i] <= h + 1e-9).map(|i| err[i]).collect();
        within.iter().sum::<f64>() / within.len() as f64
    });
    TrajectorySummary { ade, fde: err[PLAN_POINTS - 1] }
}

/// Mean of per-sample summaries.
pub fn mean_trajectory(samples: &[TrajectorySummary]) -> TrajectorySummary {
    if samples.is_empty() {
        return TrajectorySummary::default();
    }
    let n = samples.len() as f64;
    TrajectorySummary {
        ade: std::array::from_fn(|k| samples.iter().map(|s| s.ade[k]).sum::<f64>() / n),
        fde: samples.iter().map(|s| s.fde).sum::<f64>() / n,
    }
}
