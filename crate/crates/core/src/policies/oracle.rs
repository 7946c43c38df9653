use super::{canonical, Policy};
use crate::cot::{
    Decision, DetectedObject, LaneReport, LightReport, Motion, ObjectCategory, ObjectReport, Observation, SignEntry,
    SignReport, StageContext, StageError, StageReports, Staged, TemplateId, VisibleLight, WaypointPlan, PLAN_POINTS,
};
use crate::world::{Box3, LightPhase, NavKind, Polyline, SceneTruth, Vec2, EGO_FRONT_OFFSET_M};

/// Upper bound on cruising speed, m/s.
pub const CRUISE_SPEED: f64 = 8.0;
/// Vehicles whose center lies within this lateral band share the ego lane.
pub const SAME_LANE_HALF_WIDTH: f64 = 1.75;
/// Ticks a hazard must stay clear before a held stop is released.
pub const HOLD_CLEAR_TICKS: u32 = 5;

const PEDESTRIAN_RANGE_M: f64 = 30.0;
const VEHICLE_ATTENTION_RANGE_M: f64 = 40.0;
const LEAD_VEHICLE_RANGE_M: f64 = 20.0;
const STATIONARY_SPEED: f64 = 0.5;
const PLAN_ACCEL: f64 = 2.0;
const PLAN_DECEL: f64 = 4.0;
const STOP_LINE_BUFFER_M: f64 = 1.0;
const PEDESTRIAN_BUFFER_M: f64 = 5.0;
const FOLLOW_MIN_GAP_M: f64 = 6.0;
const FOLLOW_GAIN: f64 = 0.5;
const EXIT_RAMP_FACTOR: f64 = 0.6;
const LANE_CHANGE_FACTOR: f64 = 0.6;

/// Distance from the ego front bumper to the near edge of a box ahead.
fn gap_ahead(b: &Box3) -> f64 {
    b.center_x - b.length / 2.0 - EGO_FRONT_OFFSET_M
}

/// Object attention: whether an object matters for the ego, and why.
pub fn attention(category: ObjectCategory, bbox: &Box3, motion: Motion, lane_width: f64) -> Option<String> {
    let half = lane_width / 2.0;
    let y = bbox.center_y;
    let gap = gap_ahead(bbox);
    if bbox.center_x <= 0.0 {
        return None;
    }
    let heading_in = (motion == Motion::CrossingLeft && y < 0.0) || (motion == Motion::CrossingRight && y > 0.0);
    match category {
        ObjectCategory::Pedestrian | ObjectCategory::Cyclist if gap <= PEDESTRIAN_RANGE_M => {
            let who = if category == ObjectCategory::Pedestrian { "pedestrian" } else { "cyclist" };
            if motion.is_crossing() && y.abs() <= half + 1.5 {
                Some(format!("{who} crossing in the ego path {gap:.1} m ahead"))
            } else if heading_in && y.abs() <= 8.0 {
                Some(format!("{who} walking toward the ego path {gap:.1} m ahead"))
            } else if y.abs() <= half {
                Some(format!("{who} standing in the ego lane {gap:.1} m ahead"))
            } else {
                None
            }
        }
        ObjectCategory::Vehicle if gap <= VEHICLE_ATTENTION_RANGE_M => {
            if heading_in && y.abs() < half + lane_width {
                Some(format!("vehicle {gap:.1} m ahead changing lanes into the ego lane"))
            } else if y.abs() < half {
                Some(format!("vehicle {gap:.1} m ahead in the ego lane"))
            } else {
                None
            }
        }
        ObjectCategory::Static if gap <= PEDESTRIAN_RANGE_M && y.abs() < half + 1.0 => {
            Some(format!("obstacle {gap:.1} m ahead in the ego path"))
        }
        _ => None,
    }
}

/// Object stage from ground truth. With `attend` off, boxes and motion are
/// reported but no object is singled out.
pub(crate) fn perceive_objects(scene: &SceneTruth, attend: bool) -> ObjectReport {
    let objects = scene
        .objects
        .iter()
        .map(|o| {
            let motion = Motion::classify(o.velocity);
            let reason = if attend { attention(o.category, &o.bbox, motion, scene.lane.width) } else { None };
            DetectedObject {
                category: o.category,
                bbox: o.bbox,
                motion,
                attend: reason.is_some(),
                reason: reason.unwrap_or_default(),
            }
        })
        .collect();
    ObjectReport { objects }
}

pub(crate) fn perceive_light(scene: &SceneTruth) -> LightReport {
    LightReport {
        light: scene
            .light
            .as_ref()
            .map(|l| VisibleLight { phase: l.phase, distance_to_stop_line: l.distance_to_stop_line }),
    }
}

pub(crate) fn perceive_signs(scene: &SceneTruth) -> SignReport {
    SignReport { signs: scene.signs.iter().map(|s| SignEntry { kind: s.kind, distance: s.distance }).collect() }
}

pub(crate) fn perceive_lane(scene: &SceneTruth) -> LaneReport {
    let l = &scene.lane;
    LaneReport {
        lane_id: l.lane_id.clone(),
        left_line: l.left_line,
        right_line: l.right_line,
        legal_left: l.legal_left,
        legal_right: l.legal_right,
        special: l.special,
    }
}

/// Inputs of the instruction rule table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionFeatures {
    pub light: Option<VisibleLight>,
    pub ego_speed: f64,
    /// An attended pedestrian or cyclist crossing within 30 m.
    pub pedestrian_crossing: bool,
    /// An attended vehicle moving laterally.
    pub vehicle_changing_lanes: bool,
    /// Gap to the nearest same-lane vehicle ahead.
    pub lead_gap: Option<f64>,
    pub nav: NavKind,
}

impl DecisionFeatures {
    pub fn extract(reports: &StageReports, ego_speed: f64, nav: NavKind) -> Self {
        let objs = &reports.objects.objects;
        let pedestrian_crossing = objs.iter().any(|o| {
            o.attend
                && matches!(o.category, ObjectCategory::Pedestrian | ObjectCategory::Cyclist)
                && o.motion.is_crossing()
                && gap_ahead(&o.bbox) <= PEDESTRIAN_RANGE_M
        });
        let vehicle_changing_lanes =
            objs.iter().any(|o| o.attend && o.category == ObjectCategory::Vehicle && o.motion.is_crossing());
        let lead_gap = objs
            .iter()
            .filter(|o| o.category == ObjectCategory::Vehicle)
            .filter(|o| o.bbox.center_x > 0.0 && o.bbox.center_y.abs() < SAME_LANE_HALF_WIDTH)
            .map(|o| gap_ahead(&o.bbox))
            .min_by(f64::total_cmp);
        DecisionFeatures { light: reports.light.light, ego_speed, pedestrian_crossing, vehicle_changing_lanes, lead_gap, nav }
    }

    /// A red light, or a yellow one the ego can still stop for comfortably.
    fn must_stop_for_light(&self) -> bool {
        match self.light {
            Some(l) => match l.phase {
                LightPhase::Red => true,
                LightPhase::Yellow => {
                    l.distance_to_stop_line - STOP_LINE_BUFFER_M >= self.ego_speed.powi(2) / (2.0 * PLAN_DECEL)
                }
                LightPhase::Green => false,
            },
            None => false,
        }
    }
}

/// Fixed-priority rule table: light stops, then pedestrians, then vehicles
/// cutting in, then close lead vehicles, then navigation, then green lights.
pub fn select_template(f: &DecisionFeatures) -> TemplateId {
    if f.must_stop_for_light() {
        if f.ego_speed < STATIONARY_SPEED {
            TemplateId::RedLightStationary
        } else {
            TemplateId::RedLightApproach
        }
    } else if f.pedestrian_crossing {
        TemplateId::PedestrianCrossing
    } else if f.vehicle_changing_lanes {
        TemplateId::LeadVehicleLaneChange
    } else if f.lead_gap.is_some_and(|g| g <= LEAD_VEHICLE_RANGE_M) {
        TemplateId::LeadVehicle20m
    } else {
        match f.nav {
            NavKind::TurnLeft | NavKind::TurnRight | NavKind::GoStraight => TemplateId::JunctionTurn,
            NavKind::LaneChangeLeft | NavKind::LaneChangeRight => TemplateId::EgoLaneChange,
            NavKind::ExitRamp => TemplateId::ExitRamp,
            NavKind::Follow if f.light.is_some() => TemplateId::GreenLightTurn,
            NavKind::Follow => TemplateId::DefaultDriving,
        }
    }
}

/// Stop hysteresis: a stop stays in force until its hazard has been absent
/// for [`HOLD_CLEAR_TICKS`] consecutive ticks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hysteresis {
    held: Option<TemplateId>,
    clear_ticks: u32,
}

impl Hysteresis {
    pub fn apply(&mut self, raw: TemplateId, ego_speed: f64) -> (TemplateId, bool) {
        if raw.is_stop() {
            self.held = Some(raw);
            self.clear_ticks = 0;
            return (raw, false);
        }
        let Some(held) = self.held else { return (raw, false) };
        self.clear_ticks += 1;
        if self.clear_ticks >= HOLD_CLEAR_TICKS {
            self.held = None;
            self.clear_ticks = 0;
            return (raw, false);
        }
        let id = match held {
            TemplateId::RedLightApproach | TemplateId::RedLightStationary if ego_speed < STATIONARY_SPEED => {
                TemplateId::RedLightStationary
            }
            TemplateId::RedLightApproach | TemplateId::RedLightStationary => TemplateId::RedLightApproach,
            other => other,
        };
        (id, true)
    }

    pub fn is_holding(&self) -> bool {
        self.held.is_some()
    }
}

fn nav_phrase(nav: NavKind) -> &'static str {
    match nav {
        NavKind::TurnLeft => "turn left",
        NavKind::TurnRight => "turn right",
        _ => "go straight",
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Vulnerable road users the ego is attending to, as a phrase.
fn attention_target(reports: &StageReports) -> &'static str {
    let o = reports
        .objects
        .objects
        .iter()
        .find(|o| o.attend && matches!(o.category, ObjectCategory::Pedestrian | ObjectCategory::Cyclist));
    match o.map(|o| o.category) {
        Some(ObjectCategory::Pedestrian) => "the pedestrian",
        Some(ObjectCategory::Cyclist) => "the cyclist",
        _ => "the road ahead",
    }
}

/// Cruise speed under the speed limit in force.
fn cruise(reports: &StageReports) -> f64 {
    reports.signs.speed_limit().map_or(CRUISE_SPEED, |v| v.min(CRUISE_SPEED))
}

fn follow_speed(gap: f64, cruise: f64) -> f64 {
    (FOLLOW_GAIN * (gap - FOLLOW_MIN_GAP_M)).clamp(0.0, cruise)
}

/// Applies the rule table and hysteresis and fills the chosen template.
pub fn oracle_decide(reports: &StageReports, ego_speed: f64, nav: NavKind, hysteresis: &mut Hysteresis) -> Decision {
    let features = DecisionFeatures::extract(reports, ego_speed, nav);
    let raw = select_template(&features);
    let (id, held) = hysteresis.apply(raw, ego_speed);
    build_decision(id, held, &features, reports)
}

pub(crate) fn build_decision(id: TemplateId, held: bool, f: &DecisionFeatures, reports: &StageReports) -> Decision {
    let cruise = cruise(reports);
    let target = f.lead_gap.map_or(cruise, |g| follow_speed(g, cruise));
    let (filled_text, target_speed, rationale) = match id {
        TemplateId::RedLightApproach | TemplateId::RedLightStationary | TemplateId::PedestrianCrossing if held => {
            (id.fill(&[]), 0.0, "holding the stop until the hazard has stayed clear".to_string())
        }
        TemplateId::RedLightApproach | TemplateId::RedLightStationary => {
            let l = f.light.expect("light stop implies a visible light");
            (id.fill(&[]), 0.0, format!("{} light, stop line {:.1} m ahead", l.phase, l.distance_to_stop_line))
        }
        TemplateId::PedestrianCrossing => {
            (id.fill(&[]), 0.0, "a pedestrian is crossing in front of the ego".to_string())
        }
        TemplateId::LeadVehicleLaneChange => (
            id.fill(&["Pay attention to the vehicle ahead changing lanes."]),
            (LANE_CHANGE_FACTOR * cruise).min(target),
            "a vehicle ahead is moving into the ego lane".to_string(),
        ),
        TemplateId::LeadVehicle20m => (
            id.fill(&["There is a vehicle ahead."]),
            target,
            format!("same-lane vehicle {:.1} m ahead", f.lead_gap.unwrap_or(0.0)),
        ),
        TemplateId::JunctionTurn => (
            id.fill(&[&capitalize(nav_phrase(f.nav)), &format!("Pay attention to {}.", attention_target(reports))]),
            cruise,
            format!("navigation requests {} at the junction", nav_phrase(f.nav)),
        ),
        TemplateId::EgoLaneChange => {
            let side = if f.nav == NavKind::LaneChangeLeft { "left" } else { "right" };
            (id.fill(&[&format!("change to the {side} lane")]), cruise, format!("navigation requests a {side} lane change"))
        }
        TemplateId::ExitRamp => (
            id.fill(&["Approaching exit ramp, reduce speed, and enhance environment observation."]),
            EXIT_RAMP_FACTOR * cruise,
            "navigation requests the exit ramp".to_string(),
        ),
        TemplateId::GreenLightTurn => (
            id.fill(&[&format!("Pay attention to {}.", attention_target(reports)), nav_phrase(f.nav)]),
            cruise,
            "the light is green".to_string(),
        ),
        TemplateId::DefaultDriving => (id.fill(&[]), cruise, "no hazard and no pending maneuver".to_string()),
    };
    Decision { template_id: id, filled_text, rationale, target_speed }
}

/// Where the plan must come to rest, measured as ego travel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanLimits {
    pub stop_travel: Option<f64>,
}

impl PlanLimits {
    pub fn for_decision(decision: &Decision, reports: &StageReports) -> Self {
        let stop_travel = match decision.template_id {
            TemplateId::RedLightApproach | TemplateId::RedLightStationary => Some(
                reports
                    .light
                    .light
                    .filter(|l| l.phase != LightPhase::Green)
                    .map_or(0.0, |l| l.distance_to_stop_line - STOP_LINE_BUFFER_M),
            ),
            TemplateId::PedestrianCrossing => Some(
                reports
                    .objects
                    .objects
                    .iter()
                    .filter(|o| o.attend && matches!(o.category, ObjectCategory::Pedestrian | ObjectCategory::Cyclist))
                    .map(|o| gap_ahead(&o.bbox) - PEDESTRIAN_BUFFER_M)
                    .min_by(f64::total_cmp)
                    .unwrap_or(0.0),
            ),
            _ => None,
        };
        PlanLimits { stop_travel: stop_travel.map(|d| d.max(0.0)) }
    }
}

/// Ego travel at each plan time. Without a stop point the speed ramps from
/// `v0` toward `target` (accelerating at 2, braking at 4 m/s²). With one, a
/// constant deceleration brings the ego to rest exactly there, never harder
/// than 4 m/s²; travel is clipped at the stop point.
pub(crate) fn travel_profile(v0: f64, target: f64, stop: Option<f64>) -> [f64; PLAN_POINTS] {
    let times = WaypointPlan::times();
    match stop {
        Some(d) => {
            let decel = if d > 1e-6 { (v0 * v0 / (2.0 * d)).min(PLAN_DECEL) } else { PLAN_DECEL };
            std::array::from_fn(|i| {
                let t = times[i];
                let s = if decel > 0.0 {
                    let t_stop = v0 / decel;
                    let tt = t.min(t_stop);
                    v0 * tt - 0.5 * decel * tt * tt
                } else {
                    0.0
                };
                s.min(d)
            })
        }
        None => {
            let a = if target >= v0 { PLAN_ACCEL } else { -PLAN_DECEL };
            let t1 = (target - v0) / a;
            std::array::from_fn(|i| {
                let t = times[i];
                if t <= t1 {
                    v0 * t + 0.5 * a * t * t
                } else {
                    v0 * t1 + 0.5 * a * t1 * t1 + target * (t - t1)
                }
            })
        }
    }
}

/// Samples the route centerline at the travel distances of the speed profile.
pub fn oracle_plan(decision: &Decision, obs: &Observation, reports: &StageReports) -> WaypointPlan {
    let limits = PlanLimits::for_decision(decision, reports);
    let travel = travel_profile(obs.ego_speed, decision.target_speed, limits.stop_travel);
    let route = obs
        .scene()
        .and_then(|s| Polyline::new(s.route_ahead.clone()))
        .unwrap_or_else(|| Polyline::new(vec![Vec2::default(), Vec2::new(1.0, 0.0)]).unwrap());
    WaypointPlan { points: std::array::from_fn(|i| route.point_at(travel[i])) }
}

fn need_scene<'a>(ctx: &'a StageContext<'_>, stage: crate::cot::Stage) -> Result<&'a SceneTruth, StageError> {
    ctx.obs.scene().ok_or_else(|| StageError {
        stage,
        message: "ground-truth policy needs scene input".into(),
        raw: String::new(),
    })
}

/// Ground-truth policy applying the full attention and rule pipeline.
#[derive(Debug, Clone, Default)]
pub struct OraclePolicy {
    hysteresis: Hysteresis,
}

impl OraclePolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for OraclePolicy {
    fn name(&self) -> &str {
        "oracle"
    }

    fn objects(&mut self, ctx: &StageContext<'_>) -> Result<Staged<ObjectReport>, StageError> {
        Ok(canonical(perceive_objects(need_scene(ctx, crate::cot::Stage::Objects)?, true)))
    }

    fn light(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LightReport>, StageError> {
        Ok(canonical(perceive_light(need_scene(ctx, crate::cot::Stage::Light)?)))
    }

    fn signs(&mut self, ctx: &StageContext<'_>) -> Result<Staged<SignReport>, StageError> {
        Ok(canonical(perceive_signs(need_scene(ctx, crate::cot::Stage::Signs)?)))
    }

    fn lane(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LaneReport>, StageError> {
        Ok(canonical(perceive_lane(need_scene(ctx, crate::cot::Stage::Lane)?)))
    }

    fn decide(&mut self, ctx: &StageContext<'_>) -> Result<Staged<Decision>, StageError> {
        let reports = ctx.prior.complete();
        Ok(canonical(oracle_decide(&reports, ctx.obs.ego_speed, ctx.obs.nav_command.kind, &mut self.hysteresis)))
    }

    fn plan(&mut self, ctx: &StageContext<'_>) -> Result<Staged<WaypointPlan>, StageError> {
        let reports = ctx.prior.complete();
        let decision = ctx.prior.decision.as_ref().expect("decision precedes planning");
        Ok(canonical(oracle_plan(decision, ctx.obs, &reports)))
    }
}
