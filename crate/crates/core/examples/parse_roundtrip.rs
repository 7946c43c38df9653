//! Parse a model's free-form stage answers into typed reports, then print the
//! canonical text the pipeline would log and feed back as history.

use xdrive::cot::{Decision, LaneReport, LightReport, ObjectReport};
use xdrive::parse::{parse_boxes, parse_waypoints, serialize_waypoints, CanonicalText};

fn main() {
    let boxes = parse_boxes("(12.0, 0.2, 0.75, 4.5, 1.8, 1.5), (30.5, -3.5, 0.9, 0.6, 0.6, 1.8)").unwrap();
    println!("{} boxes, first centred at x={}", boxes.len(), boxes[0].center_x);

    let plan = parse_waypoints("(3.9, 0.0), (7.8, 0.1), (11.6, 0.2), (15.2, 0.4), (18.7, 0.6), (22.0, 0.9)").unwrap();
    println!("waypoints -> {}", serialize_waypoints(&plan));

    let samples = [
        ("objects", ObjectReport::from_text("vehicle (12, 0.2, 0.75, 4.5, 1.8, 1.5) stationary attend \"blocks the lane\";\ncyclist (40, 6, 0.9, 1.8, 0.6, 1.7) away ignore").map(|r| r.to_text())),
        ("light", LightReport::from_text("red (24.5)").map(|r| r.to_text())),
        ("lane", LaneReport::from_text("lane L1 left solid right dashed legal_left no legal_right yes special none").map(|r| r.to_text())),
    ];
    for (stage, parsed) in samples {
        match parsed {
            Ok(text) => println!("{stage}: {text}"),
            Err(e) => println!("{stage}: rejected ({e})"),
        }
    }

    // A sentence that matches no instruction template is rejected with the nearest one named.
    let garbled = "Normal driving behaviour, maintaining vigilance.\ntarget_speed: 8\nrationale: \"clear road\"";
    match Decision::from_text(garbled) {
        Ok(d) => println!("decision: {:?}", d.template_id),
        Err(e) => println!("decision rejected: {e}"),
    }
}
