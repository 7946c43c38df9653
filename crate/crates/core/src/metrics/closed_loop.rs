use crate::world::{Infraction, InfractionKind};
use serde::{Deserialize, Serialize};

/// Multiplicative driving-score penalty per infraction event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    pub collision_pedestrian: f64,
    pub collision_vehicle: f64,
    pub collision_static: f64,
    pub red_light_violation: f64,
    pub route_deviation: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Penalties {
            collision_pedestrian: 0.50,
            collision_vehicle: 0.60,
            collision_static: 0.65,
            red_light_violation: 0.70,
            route_deviation: 0.80,
        }
    }
}

impl Penalties {
    pub fn factor(&self, kind: InfractionKind) -> f64 {
        match kind {
            InfractionKind::CollisionPedestrian => self.collision_pedestrian,
            InfractionKind::CollisionVehicle => self.collision_vehicle,
            InfractionKind::CollisionStatic => self.collision_static,
            InfractionKind::RedLightViolation => self.red_light_violation,
            InfractionKind::RouteDeviation => self.route_deviation,
            InfractionKind::Timeout => 1.0,
        }
    }
}

/// What scoring needs from a finished episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub route_completion: f64,
    pub infractions: Vec<Infraction>,
    pub elapsed_s: f64,
    pub time_budget_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub driving_score: f64,
    pub success: bool,
    pub route_completion: f64,
    pub infractions: Vec<Infraction>,
}

pub fn score_episode_with(outcome: &EpisodeOutcome, penalties: &Penalties) -> EpisodeResult {
    let completion = outcome.route_completion.clamp(0.0, 1.0);
    let factor: f64 = outcome.infractions.iter().map(|i| penalties.factor(i.kind)).product();
    let major = outcome
        .infractions
        .iter()
        .any(|i| i.kind.is_collision() || i.kind == InfractionKind::RedLightViolation);
    let success = completion >= 1.0 && !major && outcome.elapsed_s <= outcome.time_budget_s;
    EpisodeResult {
        driving_score: (100.0 * completion * factor).clamp(0.0, 100.0),
        success,
        route_completion: completion,
        infractions: outcome.infractions.clone(),
    }
}

pub fn score_episode(outcome: &EpisodeOutcome) -> EpisodeResult {
    score_episode_with(outcome, &Penalties::default())
}

/// Mean driving score and success rate in percent.
pub fn aggregate_suite(results: &[EpisodeResult]) -> (f64, f64) {
    assert!(!results.is_empty(), "aggregate over an empty suite");
    let n = results.len() as f64;
    let ds = results.iter().map(|r| r.driving_score).sum::<f64>() / n;
    let sr = 100.0 * results.iter().filter(|r| r.success).count() as f64 / n;
    (ds, sr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(completion: f64, kinds: &[InfractionKind]) -> EpisodeOutcome {
        EpisodeOutcome {
            route_completion: completion,
            infractions: kinds.iter().map(|&kind| Infraction { t: 1.0, kind, actor: None }).collect(),
            elapsed_s: 10.0,
            time_budget_s: 60.0,
        }
    }

    #[test]
    fn clean_run() {
        let r = score_episode(&outcome(1.0, &[]));
        assert_eq!((r.driving_score, r.success), (100.0, true));
    }

    #[test]
    fn red_light_costs_thirty_percent() {
        let r = score_episode(&outcome(1.0, &[InfractionKind::RedLightViolation]));
        assert!((r.driving_score - 70.0).abs() < 1e-9);
        assert!(!r.success);
    }

    #[test]
    fn pedestrian_collision_halfway() {
        let r = score_episode(&outcome(0.5, &[InfractionKind::CollisionPedestrian]));
        assert!((r.driving_score - 25.0).abs() < 1e-9);
        assert!(!r.success);
    }

    #[test]
    fn deviation_alone_keeps_success() {
        let r = score_episode(&outcome(1.0, &[InfractionKind::RouteDeviation]));
        assert!(r.success && (r.driving_score - 80.0).abs() < 1e-9);
    }

    #[test]
    fn over_budget_fails() {
        let mut o = outcome(1.0, &[]);
        o.elapsed_s = 61.0;
        assert!(!score_episode(&o).success);
    }

    #[test]
    fn suite_means() {
        let a = score_episode(&outcome(1.0, &[]));
        let b = score_episode(&outcome(0.5, &[InfractionKind::CollisionPedestrian]));
        assert_eq!(aggregate_suite(&[a, b]), (62.5, 50.0));
    }
}
