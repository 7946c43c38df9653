//! Deterministic 2D kinematic micro-simulator.
//!
//! The world is a plain value: [`WorldState::step`] consumes nothing and
//! returns the next state, so episodes can be replayed, forked, or sent to
//! other threads freely.

pub mod geometry;
pub mod lanes;
mod infractions;
mod scene;
mod sim;

pub use geometry::{normalize_angle, Frame, Polyline, Projection, Vec2};
pub use infractions::{Infraction, InfractionKind, InfractionLedger, DEBOUNCE_S};
pub use lanes::{Lane, LaneGraph, LaneSpecial, LineType, NavKind, NavigationCommand, Route};
pub use scene::{LaneTruth, LightTruth, ObjectCategory, SceneTruth, SignTruth, TruthObject, DEFAULT_RANGE_M};
pub use sim::{WorldError, WorldState};

use lanes::keyword_enum;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Fixed simulation tick.
pub const DT: f64 = 0.1;
pub const WHEELBASE_M: f64 = 2.8;
pub const MAX_STEER_RAD: f64 = 0.5;
pub const MAX_ACCEL: f64 = 3.0;
pub const MAX_DECEL: f64 = 8.0;
pub const EGO_LENGTH_M: f64 = 4.5;
pub const EGO_WIDTH_M: f64 = 1.8;
pub const EGO_HEIGHT_M: f64 = 1.5;
/// Rear axle to rear bumper.
pub const EGO_REAR_OVERHANG_M: f64 = 0.85;
/// Rear axle (ego origin) to front bumper.
pub const EGO_FRONT_OFFSET_M: f64 = EGO_LENGTH_M - EGO_REAR_OVERHANG_M;
pub const VEHICLE_SPEED_MAX: f64 = 20.0;
pub const PEDESTRIAN_SPEED_MAX: f64 = 3.0;

/// Planar pose of a rear axle (ego) or box center (actors).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians in (-π, π].
    pub heading: f64,
    /// m/s, never negative.
    pub speed: f64,
}

impl Pose {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn frame(&self) -> Frame {
        Frame { origin: self.position(), heading: self.heading }
    }
}

/// Axis-aligned box `(x, y, z, length, width, height)` in whatever frame the
/// context dictates. Extents are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub center_x: f64,
    pub center_y: f64,
    pub center_z: f64,
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl Box3 {
    pub fn new(center: [f64; 3], extents: [f64; 3]) -> Self {
        Self {
            center_x: center[0],
            center_y: center[1],
            center_z: center[2],
            length: extents[0],
            width: extents[1],
            height: extents[2],
        }
    }

    pub fn extents_valid(&self) -> bool {
        self.length > 0.0 && self.width > 0.0 && self.height > 0.0
    }

    pub fn volume(&self) -> f64 {
        self.length * self.width * self.height
    }

    /// 2D footprint overlap (touching edges do not count).
    pub fn footprint_overlaps(&self, o: &Box3) -> bool {
        (self.center_x - o.center_x).abs() < (self.length + o.length) / 2.0
            && (self.center_y - o.center_y).abs() < (self.width + o.width) / 2.0
    }

    /// The ego's own box in the ego frame.
    pub fn ego() -> Box3 {
        Box3::new(
            [EGO_LENGTH_M / 2.0 - EGO_REAR_OVERHANG_M, 0.0, EGO_HEIGHT_M / 2.0],
            [EGO_LENGTH_M, EGO_WIDTH_M, EGO_HEIGHT_M],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Vehicle,
    Pedestrian,
    StaticObstacle,
}

keyword_enum!(ActorKind { Vehicle => "vehicle", Pedestrian => "pedestrian", StaticObstacle => "static_obstacle" });

impl ActorKind {
    pub fn speed_max(self) -> f64 {
        match self {
            ActorKind::Vehicle => VEHICLE_SPEED_MAX,
            ActorKind::Pedestrian => PEDESTRIAN_SPEED_MAX,
            ActorKind::StaticObstacle => 0.0,
        }
    }
}

/// Position-time table, times relative to script activation. Positions are
/// linearly interpolated and held at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub points: Vec<(f64, Vec2)>,
}

impl Script {
    pub fn position_at(&self, tau: f64) -> Vec2 {
        let pts = &self.points;
        if tau <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            let (t0, p0) = w[0];
            let (t1, p1) = w[1];
            if tau <= t1 {
                return p0.lerp(p1, (tau - t0) / (t1 - t0));
            }
        }
        pts[pts.len() - 1].1
    }

    /// Checks times strictly increase and segment speeds stay below `vmax`.
    pub fn validate(&self, vmax: f64) -> Result<(), String> {
        if self.points.is_empty() {
            return Err("script has no points".into());
        }
        for w in self.points.windows(2) {
            let dt = w[1].0 - w[0].0;
            if !(dt > 0.0) {
                return Err("script times must strictly increase".into());
            }
            let v = w[0].1.dist(w[1].1) / dt;
            if v > vmax + 1e-9 {
                return Err(format!("script speed {v:.3} m/s exceeds limit {vmax} m/s"));
            }
        }
        Ok(())
    }
}

/// Activates a script once the trigger point is within `distance` meters
/// ahead of the ego (longitudinally, ego frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trigger {
    pub point: Vec2,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActorState {
    pub id: String,
    pub kind: ActorKind,
    pub pose: Pose,
    /// Extents only; the center is taken from `pose`.
    pub dims: [f64; 3],
    pub script: Script,
    pub trigger: Option<Trigger>,
    pub activated_at: Option<f64>,
    /// Map-frame velocity over the last tick.
    pub velocity: Vec2,
}

impl ActorState {
    pub fn map_box(&self) -> Box3 {
        Box3::new([self.pose.x, self.pose.y, self.dims[2] / 2.0], self.dims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightPhase {
    Red,
    Yellow,
    Green,
}

keyword_enum!(LightPhase { Red => "red", Yellow => "yellow", Green => "green" });

/// Fixed-cycle signal. Phases run red → green → yellow → red.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficLightState {
    pub id: String,
    pub position: Vec2,
    pub stop_line_s: f64,
    pub red_s: f64,
    pub yellow_s: f64,
    pub green_s: f64,
    pub phase_clock: f64,
}

impl TrafficLightState {
    pub fn period(&self) -> f64 {
        self.red_s + self.yellow_s + self.green_s
    }

    pub fn phase_at(&self, clock: f64) -> LightPhase {
        let c = clock.rem_euclid(self.period());
        if c < self.red_s {
            LightPhase::Red
        } else if c < self.red_s + self.green_s {
            LightPhase::Green
        } else {
            LightPhase::Yellow
        }
    }

    pub fn phase(&self) -> LightPhase {
        self.phase_at(self.phase_clock)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignKind {
    Stop,
    Yield,
    SpeedLimit(f64),
    PedestrianCrossing,
    ExitRamp,
}

impl fmt::Display for SignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignKind::Stop => f.write_str("stop"),
            SignKind::Yield => f.write_str("yield"),
            SignKind::SpeedLimit(v) => write!(f, "speed_limit:{v}"),
            SignKind::PedestrianCrossing => f.write_str("pedestrian_crossing"),
            SignKind::ExitRamp => f.write_str("exit_ramp"),
        }
    }
}

impl FromStr for SignKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "stop" => SignKind::Stop,
            "yield" => SignKind::Yield,
            "pedestrian_crossing" => SignKind::PedestrianCrossing,
            "exit_ramp" => SignKind::ExitRamp,
            other => {
                let v = other
                    .strip_prefix("speed_limit:")
                    .ok_or_else(|| format!("unknown sign kind '{other}'"))?;
                let v: f64 = v.parse().map_err(|_| format!("bad speed limit '{v}'"))?;
                if !(v > 0.0) {
                    return Err("speed limit must be positive".into());
                }
                SignKind::SpeedLimit(v)
            }
        })
    }
}

impl SignKind {
    fn same_kind(&self, o: &SignKind) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSign {
    pub id: String,
    pub kind: SignKind,
    pub position: Vec2,
    pub applies_from_s: f64,
}

/// Normalized actuation command.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    /// [-1, 1], positive steers left.
    pub steer: f64,
    /// [0, 1].
    pub throttle: f64,
    /// [0, 1].
    pub brake: f64,
}

impl Action {
    pub fn full_brake() -> Self {
        Action { steer: 0.0, throttle: 0.0, brake: 1.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.steer.is_finite() && self.throttle.is_finite() && self.brake.is_finite()
    }
}
