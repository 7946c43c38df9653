//! Runs every catalog scenario under the ground-truth policy and the
//! no-attention ablation, then prints per-episode outcomes and the tables.
//!
//! cargo run --release --example catalog_suite [-- <out dir>]

use xdrive::harness::{build_report, run_catalog, PolicyKind, RunConfig};

fn main() {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    let mut logs = Vec::new();
    for policy in [PolicyKind::Oracle, PolicyKind::NoCot] {
        let base = RunConfig { out_dir: out.clone(), ..RunConfig::new("", policy) };
        for result in run_catalog(&base) {
            let log = result.expect("catalog episode runs");
            let kinds: Vec<String> = log.end.result.infractions.iter().map(|i| i.kind.to_string()).collect();
            println!(
                "{:<26} {:<7} {:<16} t={:>5.1}s DS={:>5.1} success={} infractions=[{}]",
                log.header.scenario,
                log.header.policy,
                log.end.terminal.to_string(),
                log.end.t,
                log.end.result.driving_score,
                log.end.result.success,
                kinds.join(",")
            );
            logs.push(log);
        }
    }
    println!("\n{}", build_report(&logs).to_text());
}
