use super::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_RANGE_M: f64 = 50.0;
/// Light stays reported this far past its stop line, so a slight overshoot
/// still resolves to a stop.
const LIGHT_BEHIND_M: f64 = 2.0;
const ROUTE_AHEAD_M: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectCategory {
    Vehicle,
    Pedestrian,
    Cyclist,
    Static,
}

keyword_enum!(ObjectCategory { Vehicle => "vehicle", Pedestrian => "pedestrian", Cyclist => "cyclist", Static => "static" });

impl From<ActorKind> for ObjectCategory {
    fn from(k: ActorKind) -> Self {
        match k {
            ActorKind::Vehicle => ObjectCategory::Vehicle,
            ActorKind::Pedestrian => ObjectCategory::Pedestrian,
            ActorKind::StaticObstacle => ObjectCategory::Static,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthObject {
    pub id: String,
    pub category: ObjectCategory,
    /// Ego frame.
    pub bbox: Box3,
    /// Ground velocity expressed in ego axes.
    pub velocity: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightTruth {
    pub id: String,
    pub phase: LightPhase,
    /// Front bumper to stop line; negative once crossed.
    pub distance_to_stop_line: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTruth {
    pub kind: SignKind,
    /// Front bumper to the point where the sign applies; negative once in effect.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneTruth {
    pub lane_id: String,
    pub width: f64,
    pub left_line: LineType,
    pub right_line: LineType,
    pub legal_left: bool,
    pub legal_right: bool,
    pub special: LaneSpecial,
}

/// Everything the four reasoning stages could know, in the ego frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub objects: Vec<TruthObject>,
    pub light: Option<LightTruth>,
    pub signs: Vec<SignTruth>,
    pub lane: LaneTruth,
    /// Route centerline ahead of the ego's projection, 1 m spacing, ego frame.
    pub route_ahead: Vec<Vec2>,
}

impl WorldState {
    /// Ground truth for every reasoning stage within `range_m` of the ego.
    pub fn ground_truth_scene(&self, range_m: f64) -> SceneTruth {
        let frame = self.ego.frame();
        let objects = self
            .actors
            .iter()
            .filter(|a| a.pose.position().dist(self.ego.position()) <= range_m)
            .map(|a| {
                let c = frame.to_local(a.pose.position());
                TruthObject {
                    id: a.id.clone(),
                    category: a.kind.into(),
                    bbox: Box3::new([c.x, c.y, a.dims[2] / 2.0], a.dims),
                    velocity: frame.rotate_to_local(a.velocity),
                }
            })
            .collect();

        let front = self.front_s();
        let light = self
            .lights
            .iter()
            .map(|l| (l, l.stop_line_s - front))
            .filter(|(_, d)| *d >= -LIGHT_BEHIND_M && *d <= range_m)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(l, d)| LightTruth { id: l.id.clone(), phase: l.phase(), distance_to_stop_line: d });

        let mut signs: Vec<SignTruth> = Vec::new();
        let mut passed: Vec<(&TrafficSign, f64)> = Vec::new();
        for s in &self.signs {
            let d = s.applies_from_s - front;
            if d >= 0.0 && d <= range_m {
                signs.push(SignTruth { kind: s.kind, distance: d });
            } else if d < 0.0 {
                match passed.iter_mut().find(|(p, _)| p.kind.same_kind(&s.kind)) {
                    Some(slot) if slot.1 < d => *slot = (s, d),
                    Some(_) => {}
                    None => passed.push((s, d)),
                }
            }
        }
        let mut in_effect: Vec<SignTruth> =
            passed.into_iter().map(|(s, d)| SignTruth { kind: s.kind, distance: d }).collect();
        in_effect.append(&mut signs);
        in_effect.sort_by(|a, b| a.distance.total_cmp(&b.distance));

        let lane = self
            .lane_graph
            .get(&self.ego_lane_id)
            .expect("ego lane exists in lane graph");
        let legal_left = lane.left_neighbor.is_some() && lane.left_line == LineType::Dashed;
        let legal_right = lane.right_neighbor.is_some() && lane.right_line == LineType::Dashed;
        let lane = LaneTruth {
            lane_id: lane.id.clone(),
            width: lane.width,
            left_line: lane.left_line,
            right_line: lane.right_line,
            legal_left,
            legal_right,
            special: lane.special,
        };

        let route_ahead = (0..=ROUTE_AHEAD_M as usize)
            .map(|i| frame.to_local(self.route_line.point_at(self.route_s + i as f64)))
            .collect();

        SceneTruth { objects, light, signs: in_effect, lane, route_ahead }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::lanes::{Lane, LaneSpecial, LineType, NavKind};
    use std::f64::consts::PI;

    fn world_with(actor_at: Vec2, heading: f64) -> WorldState {
        let lane = Lane {
            id: "L1".into(),
            centerline: Polyline::new(vec![Vec2::new(-100.0, 0.0), Vec2::new(200.0, 0.0)]).unwrap(),
            width: 3.5,
            left_line: LineType::Dashed,
            right_line: LineType::Solid,
            left_neighbor: None,
            right_neighbor: None,
            special: LaneSpecial::Bus,
        };
        let route = Route { lane_ids: vec!["L1".into()], commands: vec![NavigationCommand { at_s: 0.0, kind: NavKind::Follow }] };
        let actor = ActorState {
            id: "V1".into(),
            kind: ActorKind::Vehicle,
            pose: Pose::default(),
            dims: [4.5, 1.8, 1.5],
            script: Script { points: vec![(0.0, actor_at)] },
            trigger: None,
            activated_at: None,
            velocity: Vec2::default(),
        };
        let mut w = WorldState::new(LaneGraph { lanes: vec![lane] }, route, vec![actor], vec![], vec![], 100.0, 0.0).unwrap();
        w.ego = Pose { x: 0.0, y: 0.0, heading, speed: 0.0 };
        w
    }

    #[test]
    fn actor_dead_ahead_maps_to_x_axis() {
        let s = world_with(Vec2::new(10.0, 0.0), 0.0).ground_truth_scene(DEFAULT_RANGE_M);
        let b = s.objects[0].bbox;
        assert_eq!((b.center_x, b.center_y, b.center_z), (10.0, 0.0, 0.75));
    }

    #[test]
    fn rotated_ego_frame() {
        let s = world_with(Vec2::new(0.0, 10.0), PI / 2.0).ground_truth_scene(DEFAULT_RANGE_M);
        let b = s.objects[0].bbox;
        assert!((b.center_x - 10.0).abs() < 1e-12 && b.center_y.abs() < 1e-12);
    }

    #[test]
    fn out_of_range_actor_excluded() {
        let s = world_with(Vec2::new(-60.0, 0.0), 0.0).ground_truth_scene(50.0);
        assert!(s.objects.is_empty());
    }

    #[test]
    fn lane_legality_needs_neighbor() {
        let s = world_with(Vec2::new(10.0, 0.0), 0.0).ground_truth_scene(50.0);
        assert!(!s.lane.legal_left);
        assert_eq!(s.lane.special, LaneSpecial::Bus);
    }
}
