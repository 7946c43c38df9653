use super::camera::render_bev;
use super::log::{EpisodeLog, LogEnd, LogHeader, LogLine, LogWriter, TerminalCause, TickRecord, LOG_SCHEMA_VERSION};
use super::HarnessError;
use crate::control::{compute_action_with, ControlGains};
use crate::cot::{run_pipeline, HistoryBuffer, HistoryEntry, Observation, ObservationInput, DEFAULT_HISTORY_DEPTH};
use crate::metrics::{score_episode, EpisodeOutcome};
use crate::policies::{AblationPolicy, Endpoint, InputKind, OraclePolicy, Policy, RemoteConfig, RemotePolicy};
use crate::scenario::{load_scenario, ScenarioSpec};
use crate::world::{Action, InfractionKind, DEFAULT_RANGE_M, DT};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::str::FromStr;

/// Consecutive failed ticks tolerated before the episode is abandoned.
pub const MAX_CONSECUTIVE_FAILURES: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Oracle,
    NoCot,
    Remote,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Oracle => "oracle",
            PolicyKind::NoCot => "no-cot",
            PolicyKind::Remote => "remote",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oracle" => Ok(PolicyKind::Oracle),
            "no-cot" | "ablation" => Ok(PolicyKind::NoCot),
            "remote" => Ok(PolicyKind::Remote),
            _ => Err(format!("unknown policy '{s}' (expected oracle, no-cot or remote)")),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Catalog name or path to a scenario file.
    pub scenario: String,
    pub policy: PolicyKind,
    pub endpoint: Option<Endpoint>,
    pub seed: u64,
    /// Where logs go; `None` keeps the episode in memory only.
    pub out_dir: Option<PathBuf>,
    pub dt: f64,
    pub ticks_max: Option<u64>,
    pub range_m: f64,
    pub history_depth: usize,
    pub remote_timeout_ms: u64,
    pub remote_retries: u32,
    pub gains: ControlGains,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>, policy: PolicyKind) -> Self {
        RunConfig {
            scenario: scenario.into(),
            policy,
            endpoint: None,
            seed: 0,
            out_dir: None,
            dt: DT,
            ticks_max: None,
            range_m: DEFAULT_RANGE_M,
            history_depth: DEFAULT_HISTORY_DEPTH,
            remote_timeout_ms: 2000,
            remote_retries: 1,
            gains: ControlGains::default(),
        }
    }

    fn make_policy(&self, scenario: &str) -> Result<Box<dyn Policy>, HarnessError> {
        Ok(match self.policy {
            PolicyKind::Oracle => Box::new(OraclePolicy::new()),
            PolicyKind::NoCot => Box::new(AblationPolicy::new()),
            PolicyKind::Remote => {
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| HarnessError::Usage("remote policy needs an endpoint".into()))?;
                let mut cfg = RemoteConfig::new(endpoint);
                cfg.timeout_ms = self.remote_timeout_ms;
                cfg.max_retries = self.remote_retries;
                cfg.session = format!("{scenario}-{}", self.seed);
                Box::new(RemotePolicy::new(cfg))
            }
        })
    }
}

fn digest(obs: &Observation) -> String {
    let mut h = Sha256::new();
    h.update(format!("{:?}|{:?}|{:?}|{:?}", obs.t, obs.ego_speed, obs.nav_command, obs.history));
    match &obs.input {
        ObservationInput::Scene(s) => h.update(serde_json::to_vec(s).expect("scene serializes")),
        ObservationInput::Images(imgs) => imgs.iter().for_each(|a| h.update(&a.bytes)),
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Runs one closed-loop episode on the scenario named in `cfg`.
pub fn run_episode(cfg: &RunConfig) -> Result<EpisodeLog, HarnessError> {
    let spec = load_scenario(&cfg.scenario)?;
    run_spec(cfg, &spec)
}

/// Runs one closed-loop episode on an already loaded scenario.
pub fn run_spec(cfg: &RunConfig, spec: &ScenarioSpec) -> Result<EpisodeLog, HarnessError> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(HarnessError::Usage(format!("dt must be positive, got {}", cfg.dt)));
    }
    let mut world = spec.world()?;
    let mut policy = cfg.make_policy(&spec.name)?;
    let mut reference = OraclePolicy::new();
    let mut history = HistoryBuffer::new(cfg.history_depth);
    let path = cfg.out_dir.as_ref().map(|d| d.join(EpisodeLog::file_name(&spec.name, cfg.policy.as_str())));
    let mut writer = LogWriter::create(path.as_deref())?;

    let header = LogHeader {
        v: LOG_SCHEMA_VERSION,
        scenario: spec.name.clone(),
        policy: cfg.policy.as_str().into(),
        seed: cfg.seed,
        dt: cfg.dt,
        range_m: cfg.range_m,
        time_budget: spec.time_budget,
        route_length: world.route_length(),
        success_speed_cap: spec.success_speed_cap,
    };
    writer.write(&LogLine::Header(header.clone()))?;

    let mut ticks = Vec::new();
    let mut failures = 0u32;
    let mut degraded_ticks = 0u64;
    let mut max_speed = world.ego.speed;
    let terminal = loop {
        if world.ledger.has_collision() {
            break TerminalCause::FatalCollision;
        }
        if world.at_destination() {
            break TerminalCause::Destination;
        }
        if failures > MAX_CONSECUTIVE_FAILURES {
            break TerminalCause::PolicyFailure;
        }
        if world.t >= spec.time_budget - 1e-9 || cfg.ticks_max.is_some_and(|m| world.tick >= m) {
            world.ledger.record(world.t, InfractionKind::Timeout, None);
            break TerminalCause::Timeout;
        }

        let scene = world.ground_truth_scene(cfg.range_m);
        let nav = world.active_command();
        let reference_obs = Observation {
            t: world.t,
            ego_speed: world.ego.speed,
            nav_command: nav,
            input: ObservationInput::Scene(scene.clone()),
            history: history.tokens(),
        };
        let obs = match policy.input_kind() {
            InputKind::Scene => reference_obs.clone(),
            InputKind::Images => Observation { input: ObservationInput::Images(vec![render_bev(&scene)]), ..reference_obs.clone() },
        };
        let gt = run_pipeline(&mut reference, &reference_obs).expect("ground-truth policy never fails on scene input");

        let (action, record_parts) = match run_pipeline(policy.as_mut(), &obs) {
            Ok(out) => {
                failures = 0;
                let action = compute_action_with(&out.plan, &out.decision, world.ego.speed, &cfg.gains);
                history.push(HistoryEntry::from_tick(world.t, &out.reports, &out.decision));
                (action, (Some(out.reports), Some(out.decision), Some(out.plan), None, out.trace))
            }
            Err(f) => {
                failures += 1;
                degraded_ticks += 1;
                (Action::full_brake(), (None, None, None, Some(f.error.to_string()), f.trace))
            }
        };
        let next = world.step(action, cfg.dt)?;
        max_speed = max_speed.max(next.ego.speed);
        let (reports, decision, plan, error, trace) = record_parts;
        let record = TickRecord {
            v: LOG_SCHEMA_VERSION,
            tick: world.tick,
            t: world.t,
            ego: world.ego,
            route_progress: world.route_progress(),
            lateral_error: world.lateral_error,
            nav,
            obs_digest: digest(&obs),
            reports,
            decision,
            plan,
            gt_objects: gt.reports.objects.objects.iter().map(|o| o.bbox).collect(),
            gt_template: gt.decision.template_id,
            gt_plan: gt.plan,
            action,
            degraded: error.is_some(),
            error,
            infractions: next.ledger.events[world.ledger.events.len()..].to_vec(),
            trace,
        };
        writer.write(&LogLine::Tick(Box::new(record.clone())))?;
        ticks.push(record);
        world = next;
    };

    let outcome = EpisodeOutcome {
        route_completion: world.route_progress(),
        infractions: world.ledger.events.clone(),
        elapsed_s: world.t,
        time_budget_s: spec.time_budget,
    };
    let mut result = score_episode(&outcome);
    if spec.success_speed_cap.is_some_and(|cap| max_speed > cap + 1e-9) {
        result.success = false;
    }
    let end = LogEnd {
        v: LOG_SCHEMA_VERSION,
        terminal,
        t: world.t,
        ticks: world.tick,
        route_completion: outcome.route_completion,
        max_speed,
        degraded_ticks,
        result,
    };
    writer.write(&LogLine::End(end.clone()))?;
    Ok(EpisodeLog { header, ticks, end })
}
