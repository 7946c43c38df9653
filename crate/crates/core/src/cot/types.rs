use crate::world::{Box3, LaneSpecial, LightPhase, LineType, SignKind, Vec2};
use serde::{Deserialize, Serialize};

use crate::world::lanes::keyword_enum;
pub use crate::world::ObjectCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    Stationary,
    TowardEgo,
    Away,
    CrossingLeft,
    CrossingRight,
}

keyword_enum!(Motion {
    Stationary => "stationary",
    TowardEgo => "toward_ego",
    Away => "away",
    CrossingLeft => "crossing_left",
    CrossingRight => "crossing_right",
});

impl Motion {
    /// Lateral speed above which an object counts as crossing.
    pub const LATERAL_THRESHOLD: f64 = 0.5;

    /// Classifies an ego-axis ground velocity.
    pub fn classify(velocity: Vec2) -> Motion {
        if velocity.y.abs() >= Self::LATERAL_THRESHOLD {
            if velocity.y > 0.0 {
                Motion::CrossingLeft
            } else {
                Motion::CrossingRight
            }
        } else if velocity.norm() < 0.3 {
            Motion::Stationary
        } else if velocity.x < 0.0 {
            Motion::TowardEgo
        } else {
            Motion::Away
        }
    }

    pub fn is_crossing(self) -> bool {
        matches!(self, Motion::CrossingLeft | Motion::CrossingRight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedObject {
    pub category: ObjectCategory,
    pub bbox: Box3,
    pub motion: Motion,
    pub attend: bool,
    /// Non-empty whenever `attend` is set.
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectReport {
    pub objects: Vec<DetectedObject>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibleLight {
    pub phase: LightPhase,
    pub distance_to_stop_line: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LightReport {
    pub light: Option<VisibleLight>,
}

impl LightReport {
    pub fn visible(&self) -> bool {
        self.light.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignEntry {
    pub kind: SignKind,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SignReport {
    pub signs: Vec<SignEntry>,
}

impl SignReport {
    /// Most recently passed speed limit, if any.
    pub fn speed_limit(&self) -> Option<f64> {
        self.signs
            .iter()
            .filter(|s| s.distance <= 0.0)
            .filter_map(|s| match s.kind {
                SignKind::SpeedLimit(v) => Some((s.distance, v)),
                _ => None,
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneReport {
    pub lane_id: String,
    pub left_line: LineType,
    pub right_line: LineType,
    pub legal_left: bool,
    pub legal_right: bool,
    pub special: LaneSpecial,
}

/// The four intermediate stage outputs of one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReports {
    pub objects: ObjectReport,
    pub light: LightReport,
    pub signs: SignReport,
    pub lane: LaneReport,
}

/// The ten instruction templates, one per driving archetype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    RedLightApproach,
    RedLightStationary,
    GreenLightTurn,
    PedestrianCrossing,
    LeadVehicle20m,
    JunctionTurn,
    LeadVehicleLaneChange,
    EgoLaneChange,
    ExitRamp,
    DefaultDriving,
}

keyword_enum!(TemplateId {
    RedLightApproach => "red_light_approach",
    RedLightStationary => "red_light_stationary",
    GreenLightTurn => "green_light_turn",
    PedestrianCrossing => "pedestrian_crossing",
    LeadVehicle20m => "lead_vehicle_20m",
    JunctionTurn => "junction_turn",
    LeadVehicleLaneChange => "lead_vehicle_lane_change",
    EgoLaneChange => "ego_lane_change",
    ExitRamp => "exit_ramp",
    DefaultDriving => "default_driving",
});

impl TemplateId {
    pub const ALL: [TemplateId; 10] = [
        TemplateId::RedLightApproach,
        TemplateId::RedLightStationary,
        TemplateId::GreenLightTurn,
        TemplateId::PedestrianCrossing,
        TemplateId::LeadVehicle20m,
        TemplateId::JunctionTurn,
        TemplateId::LeadVehicleLaneChange,
        TemplateId::EgoLaneChange,
        TemplateId::ExitRamp,
        TemplateId::DefaultDriving,
    ];

    /// Instruction pattern; every `[]` is a slot filled with bracketed text.
    pub fn pattern(self) -> &'static str {
        match self {
            TemplateId::RedLightApproach => "Slow down to a complete stop and wait for the light to turn green.",
            TemplateId::RedLightStationary => "Stop and wait for the light to turn green.",
            TemplateId::GreenLightTurn => "With the green light, [], safely [] and cross the intersection.",
            TemplateId::PedestrianCrossing => "Stop and wait for pedestrians crossing the road ahead.",
            TemplateId::LeadVehicle20m => "[] Maintain a safe following distance.",
            TemplateId::JunctionTurn => "[] and []",
            TemplateId::LeadVehicleLaneChange => "[] Reduce speed and maintain a safe following distance.",
            TemplateId::EgoLaneChange => {
                "Lane change triggered by navigation command: []. Risk management: ensure safe lane change \
                 conditions, considering speed and position of surrounding vehicles, using adjacent lanes in \
                 the same direction."
            }
            TemplateId::ExitRamp => "[]",
            TemplateId::DefaultDriving => {
                "Normal driving behavior, maintaining vigilance and adhering to general traffic regulations."
            }
        }
    }

    pub fn slot_count(self) -> usize {
        self.pattern().matches("[]").count()
    }

    /// Templates that command the ego to come to rest.
    pub fn is_stop(self) -> bool {
        matches!(
            self,
            TemplateId::RedLightApproach | TemplateId::RedLightStationary | TemplateId::PedestrianCrossing
        )
    }

    /// Fills the slots in order. Panics if the count does not match.
    pub fn fill(self, slots: &[&str]) -> String {
        assert_eq!(slots.len(), self.slot_count(), "slot count for {self}");
        let mut out = String::new();
        let mut parts = self.pattern().split("[]");
        out.push_str(parts.next().unwrap());
        for (slot, rest) in slots.iter().zip(parts) {
            out.push('[');
            out.push_str(slot);
            out.push(']');
            out.push_str(rest);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub template_id: TemplateId,
    pub filled_text: String,
    /// Single line.
    pub rationale: String,
    pub target_speed: f64,
}

/// Number of plan points and their spacing.
pub const PLAN_POINTS: usize = 6;
pub const PLAN_STEP_S: f64 = 0.5;

/// Ego-frame positions at 0.5, 1.0, … 3.0 s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointPlan {
    pub points: [Vec2; PLAN_POINTS],
}

impl WaypointPlan {
    pub fn times() -> [f64; PLAN_POINTS] {
        std::array::from_fn(|i| PLAN_STEP_S * (i + 1) as f64)
    }

    pub fn at_origin() -> Self {
        WaypointPlan { points: [Vec2::default(); PLAN_POINTS] }
    }

    /// Distance between consecutive points, starting from the origin.
    pub fn spacings(&self) -> [f64; PLAN_POINTS] {
        let mut prev = Vec2::default();
        std::array::from_fn(|i| {
            let d = self.points[i].dist(prev);
            prev = self.points[i];
            d
        })
    }
}
