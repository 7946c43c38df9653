//! Scenario documents and the built-in catalog.
//!
//! A scenario is a sectioned, line-oriented text file:
//!
//! ```text
//! [meta]
//! name=pedestrian_crossing time_budget=60 ego_speed=8
//!
//! [lanes]
//! L1 width=3.5 left=solid right=solid special=none left_nb=- right_nb=- pts=0,0;200,0
//!
//! [route]
//! lanes=L1
//! cmd at=0 kind=follow
//!
//! [actors]
//! P1 kind=pedestrian dims=0.5,0.5,1.8 script=0,60,-4;6.5,60,5.75 trigger=25
//!
//! [lights]
//! TL1 pos=62,5 stop_s=60 red=20 green=30 yellow=3 offset=0
//!
//! [signs]
//! S1 kind=speed_limit:5 pos=75,-6 from=75
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Within a record,
//! fields are whitespace-separated `key=value` pairs in any order; lists use
//! `;` between points and `,` between coordinates. Script times are seconds
//! since the actor's trigger fired; `trigger=D` fires when the script's first
//! point is at most `D` meters ahead of the ego (`trigger=D@x,y` names
//! another point).

mod format;

pub use format::{parse_scenario, serialize_scenario};

use crate::world::{ActorState, LaneGraph, Route, TrafficLightState, TrafficSign, WorldError, WorldState};
use thiserror::Error;

pub const DEFAULT_TIME_BUDGET_S: f64 = 120.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
    #[error("unknown scenario '{0}'")]
    NotFound(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub lane_graph: LaneGraph,
    pub route: Route,
    pub actors: Vec<ActorState>,
    pub lights: Vec<TrafficLightState>,
    pub signs: Vec<TrafficSign>,
    pub time_budget: f64,
    /// Success additionally requires the ego never to exceed this speed.
    pub success_speed_cap: Option<f64>,
    pub ego_speed: f64,
    pub ego_start_s: f64,
}

impl ScenarioSpec {
    /// Fresh world at the scenario's start state.
    pub fn world(&self) -> Result<WorldState, WorldError> {
        WorldState::new(
            self.lane_graph.clone(),
            self.route.clone(),
            self.actors.clone(),
            self.lights.clone(),
            self.signs.clone(),
            self.ego_start_s,
            self.ego_speed,
        )
    }
}

macro_rules! catalog_files {
    ($($name:literal),* $(,)?) => {
        const CATALOG: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../scenarios/", $name, ".scn")))),*
        ];
    };
}

catalog_files!(
    "red_light_approach",
    "red_light_stationary",
    "green_light_turn",
    "pedestrian_crossing",
    "lead_vehicle_20m",
    "junction_turn",
    "lead_vehicle_lane_change",
    "ego_lane_change",
    "exit_ramp",
    "default_driving",
);

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|(n, _)| *n).collect()
}

/// Source text of a catalog scenario.
pub fn catalog_source(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn catalog_scenario(name: &str) -> Result<ScenarioSpec, ScenarioError> {
    let src = catalog_source(name).ok_or_else(|| ScenarioError::NotFound(name.into()))?;
    parse_scenario(src)
}

/// Every catalog scenario, in catalog order.
pub fn catalog() -> Vec<ScenarioSpec> {
    CATALOG
        .iter()
        .map(|(name, src)| parse_scenario(src).unwrap_or_else(|e| panic!("catalog scenario {name}: {e}")))
        .collect()
}

/// A catalog name, or else a path to a scenario file.
pub fn load_scenario(name_or_path: &str) -> Result<ScenarioSpec, ScenarioError> {
    if let Some(src) = catalog_source(name_or_path) {
        return parse_scenario(src);
    }
    let text = std::fs::read_to_string(name_or_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ScenarioError::NotFound(name_or_path.into()),
        _ => ScenarioError::Semantic(format!("cannot read {name_or_path}: {e}")),
    })?;
    parse_scenario(&text)
}
