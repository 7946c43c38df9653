//! Score a handful of hand-built detections, plans and episodes, then print
//! the tables the way the report command lays them out.

use xdrive::metrics::{
    ade_fde, aggregate_suite, closed_loop_table, detection_summary, detection_table, match_boxes, mean_trajectory,
    score_episode, waypoint_table, EpisodeOutcome, IOU_THRESHOLD,
};
use xdrive::cot::WaypointPlan;
use xdrive::world::{Box3, Infraction, InfractionKind, Vec2};

fn plan(dy: f64) -> WaypointPlan {
    WaypointPlan { points: std::array::from_fn(|i| Vec2::new(4.0 * (i + 1) as f64, dy * (i + 1) as f64)) }
}

fn main() {
    let gt = [Box3::new([10.0, 0.0, 0.75], [4.5, 1.8, 1.5]), Box3::new([25.0, 3.5, 0.75], [4.5, 1.8, 1.5])];
    let preds = [Box3::new([10.4, 0.1, 0.75], [4.4, 1.8, 1.5]), Box3::new([40.0, -3.0, 0.9], [0.6, 0.6, 1.8])];
    let m = match_boxes(&preds, &gt, IOU_THRESHOLD);
    println!("matched {:?}", m.pairs);
    let det = detection_summary(&[m]);

    let traj = mean_trajectory(&[ade_fde(&plan(0.1), &plan(0.0)), ade_fde(&plan(-0.3), &plan(0.0))]);

    let crash = Infraction { t: 7.0, kind: InfractionKind::CollisionPedestrian, actor: Some("P1".into()) };
    let results = [
        score_episode(&EpisodeOutcome { route_completion: 1.0, infractions: vec![], elapsed_s: 30.0, time_budget_s: 60.0 }),
        score_episode(&EpisodeOutcome { route_completion: 0.4, infractions: vec![crash], elapsed_s: 7.0, time_budget_s: 60.0 }),
    ];
    let (ds, sr) = aggregate_suite(&results);

    println!("{}", detection_table(&[("example".into(), det)]).to_text());
    println!("{}", waypoint_table(&[("example".into(), traj)]).to_text());
    println!("{}", closed_loop_table(&[("example".into(), ds, sr)]).to_text());
}
