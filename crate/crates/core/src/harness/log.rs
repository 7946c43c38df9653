use crate::cot::{Decision, StageReports, TemplateId, TickTrace, WaypointPlan};
use crate::metrics::EpisodeResult;
use crate::world::{Action, Box3, Infraction, NavigationCommand, Pose};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const LOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    Destination,
    Timeout,
    FatalCollision,
    PolicyFailure,
}

impl std::fmt::Display for TerminalCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TerminalCause::Destination => "destination",
            TerminalCause::Timeout => "timeout",
            TerminalCause::FatalCollision => "fatal_collision",
            TerminalCause::PolicyFailure => "policy_failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub v: u32,
    pub scenario: String,
    pub policy: String,
    pub seed: u64,
    pub dt: f64,
    pub range_m: f64,
    pub time_budget: f64,
    pub route_length: f64,
    pub success_speed_cap: Option<f64>,
}

/// Everything that happened on one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub v: u32,
    pub tick: u64,
    pub t: f64,
    pub ego: Pose,
    pub route_progress: f64,
    pub lateral_error: f64,
    pub nav: NavigationCommand,
    /// Short hash of what the policy was shown.
    pub obs_digest: String,
    /// Absent only on a failed tick.
    pub reports: Option<StageReports>,
    pub decision: Option<Decision>,
    pub plan: Option<WaypointPlan>,
    /// Reference outputs of the ground-truth policy on the same tick.
    pub gt_objects: Vec<Box3>,
    pub gt_template: TemplateId,
    pub gt_plan: WaypointPlan,
    pub action: Action,
    pub degraded: bool,
    pub error: Option<String>,
    /// Infractions first recorded on this tick.
    pub infractions: Vec<Infraction>,
    pub trace: TickTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEnd {
    pub v: u32,
    pub terminal: TerminalCause,
    pub t: f64,
    pub ticks: u64,
    pub route_completion: f64,
    pub max_speed: f64,
    pub degraded_ticks: u64,
    pub result: EpisodeResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Header(LogHeader),
    Tick(Box<TickRecord>),
    End(LogEnd),
}

/// A complete episode as read back from, or written to, a JSONL log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub ticks: Vec<TickRecord>,
    pub end: LogEnd,
}

impl EpisodeLog {
    pub fn file_name(scenario: &str, policy: &str) -> String {
        format!("{scenario}__{policy}.jsonl")
    }

    pub fn read(path: &Path) -> io::Result<EpisodeLog> {
        let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {m}", path.display()));
        let mut header = None;
        let mut ticks = Vec::new();
        let mut end = None;
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            match serde_json::from_str::<LogLine>(&line).map_err(|e| bad(format!("line {}: {e}", i + 1)))? {
                LogLine::Header(h) => header = Some(h),
                LogLine::Tick(t) => ticks.push(*t),
                LogLine::End(e) => end = Some(e),
            }
        }
        Ok(EpisodeLog {
            header: header.ok_or_else(|| bad("missing header line".into()))?,
            ticks,
            end: end.ok_or_else(|| bad("missing end line (episode incomplete)".into()))?,
        })
    }

    /// Ego trajectory as CSV.
    pub fn trajectory_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "x", "y", "heading", "speed", "steer", "throttle", "brake"]).expect("in-memory write");
        for r in &self.ticks {
            let row = [r.t, r.ego.x, r.ego.y, r.ego.heading, r.ego.speed, r.action.steer, r.action.throttle, r.action.brake];
            w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Appends log lines, flushing after each so a crash loses at most one line.
pub(crate) struct LogWriter {
    out: Option<BufWriter<File>>,
}

impl LogWriter {
    pub fn create(path: Option<&Path>) -> io::Result<Self> {
        let out = match path {
            Some(p) => {
                if let Some(dir) = p.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                Some(BufWriter::new(File::create(p)?))
            }
            None => None,
        };
        Ok(LogWriter { out })
    }

    pub fn write(&mut self, line: &LogLine) -> io::Result<()> {
        if let Some(out) = &mut self.out {
            serde_json::to_writer(&mut *out, line)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Ok(())
    }
}
