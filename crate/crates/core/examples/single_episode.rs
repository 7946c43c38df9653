//! Run one catalog scenario with the oracle policy and print the reasoning
//! trace of the tick where the decision first changes.
//!
//! `cargo run --example single_episode -- pedestrian_crossing no-cot`

use xdrive::harness::{run_episode, PolicyKind, RunConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let scenario = args.next().unwrap_or_else(|| "pedestrian_crossing".into());
    let policy: PolicyKind = args.next().as_deref().unwrap_or("oracle").parse().expect("policy name");

    let log = run_episode(&RunConfig::new(scenario, policy)).expect("episode");
    let r = &log.end.result;
    println!(
        "{} / {}: {} after {:.1}s, DS {:.1}, success {}",
        log.header.scenario, log.header.policy, log.end.terminal, log.end.t, r.driving_score, r.success
    );
    for i in &r.infractions {
        println!("  infraction {} at {:.1}s", i.kind, i.t);
    }

    let first = log.ticks[0].decision.as_ref().map(|d| d.template_id);
    let Some(tick) = log.ticks.iter().find(|t| t.decision.as_ref().map(|d| d.template_id) != first) else {
        println!("decision never changed from {first:?}");
        return;
    };
    println!("\ndecision changes at t={:.1}s (ego speed {:.2} m/s)", tick.t, tick.ego.speed);
    for stage in &tick.trace.stages {
        println!("[{}] {}", stage.stage.name(), stage.output.replace('\n', "\n    "));
    }
    let a = tick.action;
    println!("action: steer {:.3} throttle {:.3} brake {:.3}", a.steer, a.throttle, a.brake);
}
