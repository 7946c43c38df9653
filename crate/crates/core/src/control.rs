//! Waypoint tracking: pure pursuit for steering, a speed loop for the pedals.

use crate::cot::{Decision, WaypointPlan, PLAN_STEP_S};
use crate::world::{Action, MAX_ACCEL, MAX_DECEL, MAX_STEER_RAD, WHEELBASE_M};
use serde::{Deserialize, Serialize};

/// Every controller gain in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlGains {
    /// Lookahead distance per unit speed, s.
    pub lookahead_gain: f64,
    pub lookahead_min: f64,
    pub lookahead_max: f64,
    /// Speed error gain, 1/s.
    pub speed_gain: f64,
    /// Below this speed a stop decision holds the brake fully.
    pub hold_speed: f64,
    /// Add the plan's own acceleration as a feedforward term.
    pub feedforward: bool,
}

impl Default for ControlGains {
    fn default() -> Self {
        ControlGains {
            lookahead_gain: 1.2,
            lookahead_min: 2.0,
            lookahead_max: 8.0,
            speed_gain: 0.5,
            hold_speed: 0.3,
            feedforward: true,
        }
    }
}

/// Initial speed and acceleration of the plan, read off its first two
/// points under a constant-acceleration fit.
pub fn plan_kinematics(plan: &WaypointPlan) -> (f64, f64) {
    let s1 = plan.points[0].norm();
    let s2 = s1 + (plan.points[1] - plan.points[0]).norm();
    let h = PLAN_STEP_S;
    let accel = (s2 - 2.0 * s1) / (h * h);
    let speed = (4.0 * s1 - s2) / (2.0 * h);
    (speed, accel)
}

/// Normalized steering command toward the plan.
pub fn pure_pursuit(plan: &WaypointPlan, ego_speed: f64, gains: &ControlGains) -> f64 {
    let ld = (gains.lookahead_gain * ego_speed).clamp(gains.lookahead_min, gains.lookahead_max);
    let target = plan.points.iter().find(|p| p.norm() >= ld).unwrap_or(&plan.points[plan.points.len() - 1]);
    let curvature = 2.0 * target.y / (ld * ld);
    ((curvature * WHEELBASE_M).atan() / MAX_STEER_RAD).clamp(-1.0, 1.0)
}

pub fn compute_action_with(plan: &WaypointPlan, decision: &Decision, ego_speed: f64, gains: &ControlGains) -> Action {
    let stop = decision.template_id.is_stop();
    if stop && ego_speed < gains.hold_speed {
        return Action::full_brake();
    }
    let steer = pure_pursuit(plan, ego_speed, gains);
    let (plan_speed, plan_accel) = plan_kinematics(plan);
    let reference = if stop { plan_speed.max(0.0) } else { decision.target_speed };
    let feedforward = if gains.feedforward { plan_accel } else { 0.0 };
    let accel = feedforward + gains.speed_gain * (reference - ego_speed);
    let (throttle, brake) = if accel > 0.0 {
        ((accel / MAX_ACCEL).clamp(0.0, 1.0), 0.0)
    } else if accel < 0.0 {
        (0.0, (-accel / MAX_DECEL).clamp(0.0, 1.0))
    } else {
        (0.0, 0.0)
    };
    Action { steer, throttle, brake }
}

/// Action for the current tick with default gains.
pub fn compute_action(plan: &WaypointPlan, decision: &Decision, ego_speed: f64) -> Action {
    compute_action_with(plan, decision, ego_speed, &ControlGains::default())
}
