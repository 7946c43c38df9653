//! Drive a scenario through the remote protocol against the bundled echo
//! server, with one artificially slow reply to show the retry path.

use std::time::Duration;
use xdrive::harness::{run_episode, PolicyKind, RunConfig};
use xdrive::policies::echo::EchoServer;
use xdrive::policies::Endpoint;

fn main() {
    let server = EchoServer::new().delay(3, Duration::from_millis(400));
    let (addr, _handle) = server.spawn_tcp().expect("bind echo server");
    println!("echo server on {addr}");

    let cfg = RunConfig {
        endpoint: Some(Endpoint::Tcp(addr.to_string())),
        remote_timeout_ms: 250,
        ..RunConfig::new("default_driving", PolicyKind::Remote)
    };
    let log = run_episode(&cfg).expect("episode");
    println!(
        "{} after {:.1}s over {} ticks, {} degraded",
        log.end.terminal, log.end.t, log.end.ticks, log.end.degraded_ticks
    );
    let first = &log.ticks[0].trace.stages[0];
    println!("first prompt starts: {}", first.prompt.lines().next().unwrap_or_default());
    println!("first reply: {}", first.output);
}
