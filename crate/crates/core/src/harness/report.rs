use super::log::EpisodeLog;
use super::HarnessError;
use crate::metrics::{
    ade_fde, aggregate_suite, closed_loop_table, detection_summary, detection_table, match_boxes, mean_trajectory,
    waypoint_table, Table, IOU_THRESHOLD,
};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// The three result tables computed over a directory of episode logs.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub detection: Table,
    pub waypoints: Table,
    pub closed_loop: Table,
}

impl Report {
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n{}", self.detection.to_text(), self.waypoints.to_text(), self.closed_loop.to_text())
    }
}

/// Every `*.jsonl` episode log directly inside `dir`, by file name.
pub fn read_logs(dir: &Path) -> Result<Vec<EpisodeLog>, HarnessError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::NoLogs(dir.to_path_buf()));
    }
    paths.iter().map(|p| EpisodeLog::read(p).map_err(HarnessError::from)).collect()
}

/// Tables from logs. Policy outputs are scored against the ground-truth
/// policy's outputs recorded on the same ticks.
pub fn build_report(logs: &[EpisodeLog]) -> Report {
    let mut by_policy: BTreeMap<&str, Vec<&EpisodeLog>> = BTreeMap::new();
    for log in logs {
        by_policy.entry(log.header.policy.as_str()).or_default().push(log);
    }
    let mut det = Vec::new();
    let mut way = Vec::new();
    let mut closed = Vec::new();
    for (policy, logs) in &by_policy {
        let ticks = || logs.iter().flat_map(|l| l.ticks.iter());
        let matchings: Vec<_> = ticks()
            .filter_map(|t| t.reports.as_ref().map(|r| (r, &t.gt_objects)))
            .map(|(r, gt)| {
                let preds: Vec<_> = r.objects.objects.iter().map(|o| o.bbox).collect();
                match_boxes(&preds, gt, IOU_THRESHOLD)
            })
            .collect();
        det.push((policy.to_string(), detection_summary(&matchings)));
        let errors: Vec<_> = ticks().filter_map(|t| t.plan.as_ref().map(|p| ade_fde(p, &t.gt_plan))).collect();
        way.push((policy.to_string(), mean_trajectory(&errors)));
        let results: Vec<_> = logs.iter().map(|l| l.end.result.clone()).collect();
        let (ds, sr) = aggregate_suite(&results);
        closed.push((policy.to_string(), ds, sr));
    }
    Report { detection: detection_table(&det), waypoints: waypoint_table(&way), closed_loop: closed_loop_table(&closed) }
}

/// Reads the logs in `dir`, writes the tables (text and CSV) and one ego
/// trajectory CSV per episode next to them, and returns the tables.
pub fn report(dir: &Path) -> Result<Report, HarnessError> {
    let logs = read_logs(dir)?;
    let rep = build_report(&logs);
    for (stem, table) in [("detection", &rep.detection), ("waypoints", &rep.waypoints), ("closed_loop", &rep.closed_loop)]
    {
        std::fs::write(dir.join(format!("{stem}.txt")), table.to_text())?;
        std::fs::write(dir.join(format!("{stem}.csv")), table.to_csv())?;
    }
    for log in &logs {
        let name = format!("{}__{}.trajectory.csv", log.header.scenario, log.header.policy);
        std::fs::write(dir.join(name), log.trajectory_csv())?;
    }
    Ok(rep)
}
