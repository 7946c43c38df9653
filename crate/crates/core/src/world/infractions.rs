use serde::{Deserialize, Serialize};

use super::lanes::keyword_enum;

/// Minimum spacing between two recorded events of the same kind.
pub const DEBOUNCE_S: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfractionKind {
    CollisionPedestrian,
    CollisionVehicle,
    CollisionStatic,
    RedLightViolation,
    RouteDeviation,
    Timeout,
}

keyword_enum!(InfractionKind {
    CollisionPedestrian => "collision_pedestrian",
    CollisionVehicle => "collision_vehicle",
    CollisionStatic => "collision_static",
    RedLightViolation => "red_light_violation",
    RouteDeviation => "route_deviation",
    Timeout => "timeout",
});

impl InfractionKind {
    pub fn is_collision(self) -> bool {
        matches!(
            self,
            InfractionKind::CollisionPedestrian | InfractionKind::CollisionVehicle | InfractionKind::CollisionStatic
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infraction {
    pub t: f64,
    pub kind: InfractionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
}

/// Append-only event list with per-kind debounce.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InfractionLedger {
    pub events: Vec<Infraction>,
}

impl InfractionLedger {
    /// Records an event unless one of the same kind happened less than
    /// [`DEBOUNCE_S`] ago. Returns whether it was recorded.
    pub fn record(&mut self, t: f64, kind: InfractionKind, actor: Option<String>) -> bool {
        let recent = self
            .events
            .iter()
            .rev()
            .find(|e| e.kind == kind)
            .is_some_and(|e| t - e.t < DEBOUNCE_S - 1e-9);
        if recent {
            return false;
        }
        self.events.push(Infraction { t, kind, actor });
        true
    }

    pub fn count(&self, kind: InfractionKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn has_collision(&self) -> bool {
        self.events.iter().any(|e| e.kind.is_collision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn debounce_per_kind() {
        let mut l = InfractionLedger::default();
        assert!(l.record(0.0, InfractionKind::RouteDeviation, None));
        assert!(!l.record(1.9, InfractionKind::RouteDeviation, None));
        assert!(l.record(1.0, InfractionKind::RedLightViolation, None));
        assert!(l.record(2.0, InfractionKind::RouteDeviation, None));
        assert_eq!(l.count(InfractionKind::RouteDeviation), 2);
    }
}
