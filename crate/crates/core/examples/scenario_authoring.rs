//! Write a scenario in the text format, validate it, and drive it with both
//! policies. A pedestrian steps out from behind a parked van.

use xdrive::harness::{run_spec, PolicyKind, RunConfig};
use xdrive::scenario::{parse_scenario, serialize_scenario};

const SOURCE: &str = "\
[meta]
name=pedestrian_behind_van time_budget=60 ego_speed=7

[lanes]
L1 width=3.5 left=solid right=solid special=none pts=0,0;140,0

[route]
lanes=L1
cmd at=0 kind=follow

[actors]
# A van parked off the lane, and a pedestrian who starts crossing once the ego is 30 m away.
VAN kind=static_obstacle dims=5.5,2.0,2.4 script=0,50,-3.6
P1 kind=pedestrian dims=0.5,0.5,1.8 script=0,62,-4;6,62,5 trigger=30
";

fn main() {
    let broken = SOURCE.replace("kind=pedestrian", "kind=cyclist");
    if let Err(e) = parse_scenario(&broken) {
        println!("rejected: {e}");
    }

    let spec = parse_scenario(SOURCE).expect("valid scenario");
    assert_eq!(parse_scenario(&serialize_scenario(&spec)).unwrap(), spec);
    println!("{}: {} actors, route {:.0} m", spec.name, spec.actors.len(), spec.world().unwrap().route_line.length());

    for policy in [PolicyKind::Oracle, PolicyKind::NoCot] {
        let log = run_spec(&RunConfig::new(&spec.name, policy), &spec).expect("episode");
        let kinds: Vec<String> = log.end.result.infractions.iter().map(|i| i.kind.to_string()).collect();
        println!(
            "{:>7}: {} at {:.1}s, DS {:.1}, infractions {:?}",
            policy.as_str(),
            log.end.terminal,
            log.end.t,
            log.end.result.driving_score,
            kinds
        );
    }
}
