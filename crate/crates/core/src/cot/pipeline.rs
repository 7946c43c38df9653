use super::{render_prompts, Decision, LaneReport, LightReport, ObjectReport, PromptBundle, SignReport, StageReports, WaypointPlan};
use crate::policies::Policy;
use crate::world::{NavigationCommand, SceneTruth};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The reasoning stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Objects,
    Light,
    Signs,
    Lane,
    Decision,
    Waypoints,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Objects, Stage::Light, Stage::Signs, Stage::Lane, Stage::Decision, Stage::Waypoints];

    /// Wire name of the stage.
    pub fn name(self) -> &'static str {
        match self {
            Stage::Objects => "objects",
            Stage::Light => "light",
            Stage::Signs => "sign",
            Stage::Lane => "lane",
            Stage::Decision => "decision",
            Stage::Waypoints => "waypoints",
        }
    }

    pub fn from_name(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s)
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Opaque binary input (e.g. a camera frame) forwarded to remote policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub name: String,
    pub media_type: String,
    #[serde(skip)]
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservationInput {
    /// Simulator ground truth (oracle and ablation policies).
    Scene(SceneTruth),
    /// Sensor attachments (remote policies).
    Images(Vec<Attachment>),
}

/// What a policy sees on one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub t: f64,
    pub ego_speed: f64,
    pub nav_command: NavigationCommand,
    pub input: ObservationInput,
    /// History tokens, oldest first.
    pub history: Vec<String>,
}

impl Observation {
    pub fn scene(&self) -> Option<&SceneTruth> {
        match &self.input {
            ObservationInput::Scene(s) => Some(s),
            ObservationInput::Images(_) => None,
        }
    }
}

/// Outputs of the stages run so far on the current tick.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialReports {
    pub objects: Option<ObjectReport>,
    pub light: Option<LightReport>,
    pub signs: Option<SignReport>,
    pub lane: Option<LaneReport>,
    pub decision: Option<Decision>,
}

impl PartialReports {
    /// All four perception reports; panics if a stage has not run.
    pub fn complete(&self) -> StageReports {
        StageReports {
            objects: self.objects.clone().expect("objects stage ran"),
            light: self.light.expect("light stage ran"),
            signs: self.signs.clone().expect("sign stage ran"),
            lane: self.lane.clone().expect("lane stage ran"),
        }
    }
}

/// Everything a stage handler may read.
pub struct StageContext<'a> {
    pub obs: &'a Observation,
    pub prompt: &'a PromptBundle,
    pub prior: &'a PartialReports,
}

/// A stage result with the exact text the policy produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Staged<T> {
    pub value: T,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("stage {stage} failed: {message}")]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
    /// Raw payload received, if any.
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: Stage,
    /// Logical timestamp, strictly increasing within a tick.
    pub seq: u32,
    pub prompt: String,
    pub output: String,
}

/// Verbatim record of one tick's reasoning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickTrace {
    pub t: f64,
    pub history: Vec<String>,
    pub stages: Vec<StageTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub reports: StageReports,
    pub decision: Decision,
    pub plan: WaypointPlan,
    pub trace: TickTrace,
}

/// A tick aborted at some stage, with the trace up to and including it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct PipelineFailure {
    pub error: StageError,
    pub trace: TickTrace,
}

/// Runs objects → light → signs → lane → decision → waypoints. Each stage is
/// prompted with every earlier output of this tick plus the history tokens.
pub fn run_pipeline(policy: &mut dyn Policy, obs: &Observation) -> Result<TickOutput, PipelineFailure> {
    let mut prior = PartialReports::default();
    let mut trace = TickTrace { t: obs.t, history: obs.history.clone(), stages: Vec::new() };
    let mut plan = None;
    for (seq, stage) in Stage::ALL.into_iter().enumerate() {
        let prompt = render_prompts(obs, &prior, stage);
        let ctx = StageContext { obs, prompt: &prompt, prior: &prior };
        let result = match stage {
            Stage::Objects => policy.objects(&ctx).map(|s| (s.raw, Slot::Objects(s.value))),
            Stage::Light => policy.light(&ctx).map(|s| (s.raw, Slot::Light(s.value))),
            Stage::Signs => policy.signs(&ctx).map(|s| (s.raw, Slot::Signs(s.value))),
            Stage::Lane => policy.lane(&ctx).map(|s| (s.raw, Slot::Lane(s.value))),
            Stage::Decision => policy.decide(&ctx).map(|s| (s.raw, Slot::Decision(s.value))),
            Stage::Waypoints => policy.plan(&ctx).map(|s| (s.raw, Slot::Plan(s.value))),
        };
        let prompt_text = prompt.concat();
        match result {
            Ok((raw, slot)) => {
                trace.stages.push(StageTrace { stage, seq: seq as u32, prompt: prompt_text, output: raw });
                match slot {
                    Slot::Objects(v) => prior.objects = Some(v),
                    Slot::Light(v) => prior.light = Some(v),
                    Slot::Signs(v) => prior.signs = Some(v),
                    Slot::Lane(v) => prior.lane = Some(v),
                    Slot::Decision(v) => prior.decision = Some(v),
                    Slot::Plan(v) => plan = Some(v),
                }
            }
            Err(error) => {
                trace.stages.push(StageTrace { stage, seq: seq as u32, prompt: prompt_text, output: error.raw.clone() });
                return Err(PipelineFailure { error, trace });
            }
        }
    }
    Ok(TickOutput {
        reports: prior.complete(),
        decision: prior.decision.expect("decision stage ran"),
        plan: plan.expect("waypoint stage ran"),
        trace,
    })
}

enum Slot {
    Objects(ObjectReport),
    Light(LightReport),
    Signs(SignReport),
    Lane(LaneReport),
    Decision(Decision),
    Plan(WaypointPlan),
}
