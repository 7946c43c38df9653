use super::geometry::{normalize_angle, Polyline, Vec2};
use super::infractions::{InfractionKind, InfractionLedger};
use super::lanes::{LaneGraph, Route};
use super::*;
use std::sync::Arc;
use thiserror::Error;

/// Lateral distance from the route centerline beyond which the ego counts as
/// deviating.
pub const ROUTE_DEVIATION_M: f64 = 3.5;
/// How long the deviation must persist before it is recorded.
pub const ROUTE_DEVIATION_S: f64 = 2.0;
/// Remaining route length under which the destination counts as reached.
pub const DESTINATION_TOLERANCE_M: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("invalid action")]
    InvalidAction,
    #[error("invalid time step {0}")]
    InvalidDt(f64),
    #[error("invalid world: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub t: f64,
    pub tick: u64,
    /// Rear-axle pose.
    pub ego: Pose,
    pub ego_lane_id: String,
    pub actors: Vec<ActorState>,
    pub lights: Vec<TrafficLightState>,
    pub signs: Vec<TrafficSign>,
    pub lane_graph: Arc<LaneGraph>,
    pub route: Arc<Route>,
    pub route_line: Arc<Polyline>,
    /// Arc length of the ego's current projection onto the route.
    pub route_s: f64,
    /// Largest arc length reached so far.
    pub progress_s: f64,
    /// Signed lateral offset from the route centerline.
    pub lateral_error: f64,
    deviation_time: f64,
    pub ledger: InfractionLedger,
}

impl WorldState {
    /// Places the ego on the route at `start_s`, aligned with it.
    pub fn new(
        lane_graph: LaneGraph,
        route: Route,
        actors: Vec<ActorState>,
        lights: Vec<TrafficLightState>,
        signs: Vec<TrafficSign>,
        start_s: f64,
        start_speed: f64,
    ) -> Result<Self, WorldError> {
        lane_graph.validate().map_err(WorldError::Invalid)?;
        let route_line = route.centerline(&lane_graph).map_err(WorldError::Invalid)?;
        let p = route_line.point_at(start_s);
        let ego = Pose {
            x: p.x,
            y: p.y,
            heading: normalize_angle(route_line.heading_at(start_s)),
            speed: start_speed.max(0.0),
        };
        let ego_lane_id = lane_graph
            .nearest_lane(p)
            .map(|(l, _)| l.id.clone())
            .ok_or_else(|| WorldError::Invalid("lane graph is empty".into()))?;
        let mut w = WorldState {
            t: 0.0,
            tick: 0,
            ego,
            ego_lane_id,
            actors,
            lights,
            signs,
            lane_graph: Arc::new(lane_graph),
            route: Arc::new(route),
            route_line: Arc::new(route_line),
            route_s: start_s,
            progress_s: start_s,
            lateral_error: 0.0,
            deviation_time: 0.0,
            ledger: InfractionLedger::default(),
        };
        w.update_actors(0.0);
        for a in &mut w.actors {
            a.velocity = Vec2::default();
        }
        Ok(w)
    }

    pub fn route_length(&self) -> f64 {
        self.route_line.length()
    }

    /// Fraction of the route completed, monotone over an episode.
    pub fn route_progress(&self) -> f64 {
        let len = self.route_length();
        if self.progress_s >= len - DESTINATION_TOLERANCE_M {
            1.0
        } else {
            (self.progress_s / len).clamp(0.0, 1.0)
        }
    }

    pub fn at_destination(&self) -> bool {
        self.route_progress() >= 1.0
    }

    /// Arc length of the front bumper along the route.
    pub fn front_s(&self) -> f64 {
        self.route_s + EGO_FRONT_OFFSET_M
    }

    pub fn active_command(&self) -> NavigationCommand {
        self.route.active_command(self.route_s)
    }

    /// Advances the world by one tick under `action`.
    pub fn step(&self, action: Action, dt: f64) -> Result<WorldState, WorldError> {
        if !action.is_finite() {
            return Err(WorldError::InvalidAction);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(WorldError::InvalidDt(dt));
        }
        let steer = action.steer.clamp(-1.0, 1.0);
        let throttle = action.throttle.clamp(0.0, 1.0);
        let brake = action.brake.clamp(0.0, 1.0);

        let mut next = self.clone();
        let e = self.ego;
        let v = e.speed;
        next.ego.x = e.x + v * e.heading.cos() * dt;
        next.ego.y = e.y + v * e.heading.sin() * dt;
        next.ego.heading =
            normalize_angle(e.heading + v / WHEELBASE_M * (steer * MAX_STEER_RAD).tan() * dt);
        next.ego.speed = (v + (throttle * MAX_ACCEL - brake * MAX_DECEL) * dt).max(0.0);
        next.t = self.t + dt;
        next.tick = self.tick + 1;

        next.update_actors(dt);
        for l in &mut next.lights {
            l.phase_clock += dt;
        }

        let proj = next
            .route_line
            .project_window(next.ego.position(), self.route_s - 5.0, self.route_s + 20.0);
        next.route_s = proj.s;
        next.progress_s = self.progress_s.max(proj.s.min(next.route_length()));
        next.lateral_error = proj.lateral;
        if let Some((lane, _)) = next.lane_graph.nearest_lane(next.ego.position()) {
            next.ego_lane_id = lane.id.clone();
        }

        next.detect_infractions(self, dt);
        Ok(next)
    }

    fn update_actors(&mut self, dt: f64) {
        let frame = self.ego.frame();
        let t = self.t;
        for a in &mut self.actors {
            if a.activated_at.is_none() {
                let fire = match a.trigger {
                    None => true,
                    Some(tr) => frame.to_local(tr.point).x <= tr.distance,
                };
                if fire {
                    a.activated_at = Some(t);
                }
            }
            let tau = a.activated_at.map_or(0.0, |t0| t - t0);
            let p = a.script.position_at(tau);
            let old = a.pose.position();
            if dt > 0.0 {
                a.velocity = (p - old) * (1.0 / dt);
            }
            let speed = a.velocity.norm();
            a.pose.x = p.x;
            a.pose.y = p.y;
            a.pose.speed = speed;
            if speed > 1e-6 {
                a.pose.heading = normalize_angle(a.velocity.y.atan2(a.velocity.x));
            }
        }
    }

    fn detect_infractions(&mut self, prev: &WorldState, dt: f64) {
        let frame = self.ego.frame();
        let ego_box = Box3::ego();
        let t = self.t;
        let mut hits = Vec::new();
        for a in &self.actors {
            let c = frame.to_local(a.pose.position());
            let b = Box3::new([c.x, c.y, a.dims[2] / 2.0], a.dims);
            if ego_box.footprint_overlaps(&b) {
                let kind = match a.kind {
                    ActorKind::Pedestrian => InfractionKind::CollisionPedestrian,
                    ActorKind::Vehicle => InfractionKind::CollisionVehicle,
                    ActorKind::StaticObstacle => InfractionKind::CollisionStatic,
                };
                hits.push((kind, a.id.clone()));
            }
        }
        for (kind, id) in hits {
            self.ledger.record(t, kind, Some(id));
        }

        let (f0, f1) = (prev.front_s(), self.front_s());
        let mut red = Vec::new();
        for l in &prev.lights {
            if f0 < l.stop_line_s && f1 >= l.stop_line_s && l.phase() == LightPhase::Red {
                red.push(l.id.clone());
            }
        }
        for id in red {
            self.ledger.record(t, InfractionKind::RedLightViolation, Some(id));
        }

        if self.lateral_error.abs() > ROUTE_DEVIATION_M {
            self.deviation_time += dt;
            if self.deviation_time > ROUTE_DEVIATION_S + 1e-9 {
                self.ledger.record(t, InfractionKind::RouteDeviation, None);
            }
        } else {
            self.deviation_time = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::lanes::{Lane, LaneSpecial, LineType, NavKind};

    fn straight_world(len: f64, speed: f64, actors: Vec<ActorState>) -> WorldState {
        let lane = Lane {
            id: "L1".into(),
            centerline: Polyline::new(vec![Vec2::new(0.0, 0.0), Vec2::new(len, 0.0)]).unwrap(),
            width: 3.5,
            left_line: LineType::Solid,
            right_line: LineType::Solid,
            left_neighbor: None,
            right_neighbor: None,
            special: LaneSpecial::None,
        };
        let route = Route {
            lane_ids: vec!["L1".into()],
            commands: vec![NavigationCommand { at_s: 0.0, kind: NavKind::Follow }],
        };
        WorldState::new(LaneGraph { lanes: vec![lane] }, route, actors, vec![], vec![], 0.0, speed).unwrap()
    }

    fn pedestrian_at(x: f64, y: f64) -> ActorState {
        ActorState {
            id: "P1".into(),
            kind: ActorKind::Pedestrian,
            pose: Pose::default(),
            dims: [0.5, 0.5, 1.8],
            script: Script { points: vec![(0.0, Vec2::new(x, y))] },
            trigger: None,
            activated_at: None,
            velocity: Vec2::default(),
        }
    }

    #[test]
    fn zero_input_at_rest_only_advances_clock() {
        let w = straight_world(200.0, 0.0, vec![]);
        let n = w.step(Action::default(), DT).unwrap();
        assert_eq!(n.ego, w.ego);
        assert!((n.t - 0.1).abs() < 1e-12);
    }

    #[test]
    fn euler_step_moves_one_meter_at_ten_mps() {
        let w = straight_world(200.0, 10.0, vec![]);
        let n = w.step(Action::default(), DT).unwrap();
        assert!((n.ego.x - 1.0).abs() < 1e-12);
        assert_eq!(n.ego.speed, 10.0);
    }

    #[test]
    fn nan_action_rejected() {
        let w = straight_world(200.0, 0.0, vec![]);
        let bad = Action { steer: f64::NAN, throttle: 0.0, brake: 0.0 };
        assert_eq!(w.step(bad, DT).unwrap_err().to_string(), "invalid action");
    }

    #[test]
    fn overlap_with_pedestrian_is_recorded() {
        let w = straight_world(200.0, 10.0, vec![pedestrian_at(4.5, 0.0)]);
        let n = w.step(Action::default(), DT).unwrap();
        assert_eq!(n.ledger.count(InfractionKind::CollisionPedestrian), 1);
        assert_eq!(n.ledger.events[0].actor.as_deref(), Some("P1"));
    }

    #[test]
    fn progress_fractions() {
        let mut w = straight_world(200.0, 0.0, vec![]);
        assert_eq!(w.route_progress(), 0.0);
        w.progress_s = 100.0;
        assert_eq!(w.route_progress(), 0.5);
        w.progress_s = 200.0;
        assert_eq!(w.route_progress(), 1.0);
    }

    #[test]
    fn red_light_crossing_recorded() {
        let mut w = straight_world(200.0, 10.0, vec![]);
        w.lights.push(TrafficLightState {
            id: "T1".into(),
            position: Vec2::new(50.0, 5.0),
            stop_line_s: EGO_FRONT_OFFSET_M + 0.5,
            red_s: 10.0,
            yellow_s: 1.0,
            green_s: 10.0,
            phase_clock: 0.0,
        });
        let n = w.step(Action::default(), DT).unwrap();
        assert_eq!(n.ledger.count(InfractionKind::RedLightViolation), 1);
    }

    #[test]
    fn steady_deviation_recorded_after_two_seconds() {
        let mut w = straight_world(400.0, 0.0, vec![]);
        w.ego.y = 4.0;
        w.ego.speed = 5.0;
        for _ in 0..20 {
            w = w.step(Action::default(), DT).unwrap();
        }
        assert_eq!(w.ledger.count(InfractionKind::RouteDeviation), 0);
        w = w.step(Action::default(), DT).unwrap();
        assert_eq!(w.ledger.count(InfractionKind::RouteDeviation), 1);
    }
}
