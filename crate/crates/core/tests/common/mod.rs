//! Random value generators shared by the integration tests. Every number is
//! drawn on the three-decimal grid the canonical text uses.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use xdrive::cot::{
    Decision, DetectedObject, LaneReport, LightReport, Motion, ObjectCategory, ObjectReport, SignEntry, SignReport,
    TemplateId, VisibleLight, WaypointPlan,
};
use xdrive::world::{Box3, LaneSpecial, LightPhase, LineType, SignKind, Vec2};

pub fn milli<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range((lo * 1000.0) as i64..=(hi * 1000.0) as i64) as f64 / 1000.0
}

pub fn random_box<R: Rng>(rng: &mut R) -> Box3 {
    Box3::new(
        [milli(rng, -60.0, 60.0), milli(rng, -30.0, 30.0), milli(rng, -2.0, 3.0)],
        [milli(rng, 0.001, 12.0), milli(rng, 0.001, 4.0), milli(rng, 0.001, 4.0)],
    )
}

pub fn random_plan<R: Rng>(rng: &mut R) -> WaypointPlan {
    WaypointPlan { points: std::array::from_fn(|_| Vec2::new(milli(rng, -50.0, 50.0), milli(rng, -50.0, 50.0))) }
}

const WORDS: &[&str] = &[
    "pedestrian", "the", "cyclist", "vehicle", "ahead", "left", "right", "Turn", "slow", "lane", "yield", "crossing",
    "safely", "junction", "Pay", "attention", "to", "stop", "42", "m", "3.5", "it's", "a/b", "-",
];

pub fn random_words<R: Rng>(rng: &mut R, max: usize) -> String {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Free text exercising the string escapes.
pub fn random_prose<R: Rng>(rng: &mut R) -> String {
    let pool: Vec<char> = "abc XYZ 019 \"\\\n\t;,()[]:é→".chars().collect();
    let n = rng.gen_range(0..24);
    (0..n).map(|_| *pool.choose(rng).unwrap()).collect()
}

pub fn random_object_report<R: Rng>(rng: &mut R) -> ObjectReport {
    let cats = [ObjectCategory::Vehicle, ObjectCategory::Pedestrian, ObjectCategory::Cyclist, ObjectCategory::Static];
    let motions = [Motion::Stationary, Motion::TowardEgo, Motion::Away, Motion::CrossingLeft, Motion::CrossingRight];
    let n = rng.gen_range(0..5);
    let objects = (0..n)
        .map(|_| {
            let attend = rng.gen_bool(0.5);
            let reason = if attend { format!("x{}", random_prose(rng)) } else { String::new() };
            DetectedObject {
                category: *cats.choose(rng).unwrap(),
                bbox: random_box(rng),
                motion: *motions.choose(rng).unwrap(),
                attend,
                reason,
            }
        })
        .collect();
    ObjectReport { objects }
}

pub fn random_light<R: Rng>(rng: &mut R) -> LightReport {
    let phases = [LightPhase::Red, LightPhase::Yellow, LightPhase::Green];
    LightReport {
        light: rng.gen_bool(0.8).then(|| VisibleLight {
            phase: *phases.choose(rng).unwrap(),
            distance_to_stop_line: milli(rng, -2.0, 50.0),
        }),
    }
}

pub fn random_signs<R: Rng>(rng: &mut R) -> SignReport {
    let n = rng.gen_range(0..4);
    let signs = (0..n)
        .map(|_| {
            let kind = match rng.gen_range(0..5) {
                0 => SignKind::Stop,
                1 => SignKind::Yield,
                2 => SignKind::SpeedLimit(milli(rng, 0.001, 40.0)),
                3 => SignKind::PedestrianCrossing,
                _ => SignKind::ExitRamp,
            };
            SignEntry { kind, distance: milli(rng, -50.0, 50.0) }
        })
        .collect();
    SignReport { signs }
}

pub fn random_lane<R: Rng>(rng: &mut R) -> LaneReport {
    let line = |rng: &mut R| if rng.gen_bool(0.5) { LineType::Solid } else { LineType::Dashed };
    let left_line = line(rng);
    let right_line = line(rng);
    let specials = [LaneSpecial::None, LaneSpecial::Bus, LaneSpecial::Bicycle, LaneSpecial::TurnOnly];
    LaneReport {
        lane_id: format!("L{}", rng.gen_range(0..1000)),
        left_line,
        right_line,
        legal_left: left_line == LineType::Dashed && rng.gen_bool(0.5),
        legal_right: right_line == LineType::Dashed && rng.gen_bool(0.5),
        special: *specials.choose(rng).unwrap(),
    }
}

pub fn random_decision<R: Rng>(rng: &mut R) -> Decision {
    let id = *TemplateId::ALL.choose(rng).unwrap();
    let slots: Vec<String> = (0..id.slot_count()).map(|_| random_words(rng, 6)).collect();
    let refs: Vec<&str> = slots.iter().map(String::as_str).collect();
    Decision {
        template_id: id,
        filled_text: id.fill(&refs),
        rationale: random_prose(rng),
        target_speed: milli(rng, 0.0, 30.0),
    }
}
