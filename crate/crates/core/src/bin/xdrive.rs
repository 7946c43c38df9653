use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;
use xdrive::harness::{report, run_catalog, run_episode, EpisodeLog, HarnessError, PolicyKind, RunConfig, TerminalCause};
use xdrive::policies::echo::EchoServer;
use xdrive::policies::Endpoint;
use xdrive::scenario::{catalog_names, catalog_source};

const EXIT_USAGE: u8 = 1;
const EXIT_SCENARIO: u8 = 2;
const EXIT_POLICY: u8 = 3;

#[derive(Parser)]
#[command(name = "xdrive", version, about = "Closed-loop driving episodes with staged reasoning policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode.
    Run(RunArgs),
    /// Run every catalog scenario.
    Suite(RunArgs),
    /// Render metric tables from the logs in the output directory.
    Report(OutArgs),
    /// List catalog scenarios, or print one.
    Catalog {
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Remote protocol self-test against the bundled canned-response server.
    ProtocolEcho(EchoArgs),
}

#[derive(Args, Clone, Default)]
struct OutArgs {
    /// Output directory (default: $XDRIVE_OUT, then ./xdrive-out).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Catalog name or scenario file.
    #[arg(long)]
    scenario: Option<String>,
    /// oracle, no-cot or remote.
    #[arg(long)]
    policy: Option<String>,
    /// host:port or exec:<command>.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "ticks-max")]
    ticks_max: Option<u64>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct EchoArgs {
    /// Serve the protocol on stdin/stdout instead of running the self-test.
    #[arg(long)]
    stdio: bool,
    /// Delay one request, as `<request index>:<milliseconds>`. Repeatable.
    #[arg(long = "delay", value_parser = parse_delay)]
    delays: Vec<(usize, u64)>,
    #[command(flatten)]
    run: RunArgs,
}

fn parse_delay(s: &str) -> Result<(usize, u64), String> {
    let (i, ms) = s.split_once(':').ok_or("expected <index>:<ms>")?;
    Ok((i.parse().map_err(|_| "bad index")?, ms.parse().map_err(|_| "bad milliseconds")?))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: Option<String>,
    policy: Option<String>,
    endpoint: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    dt: Option<f64>,
    ticks_max: Option<u64>,
}

struct Failure(u8, String);

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Scenario(_) | HarnessError::World(_) => EXIT_SCENARIO,
            _ => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("XDRIVE_OUT").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("xdrive-out"))
}

fn build_config(args: RunArgs, default_scenario: &str, default_policy: PolicyKind) -> Result<RunConfig, Failure> {
    let file: ConfigFile = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    let scenario = args.scenario.or(file.scenario).unwrap_or_else(|| default_scenario.to_string());
    let policy = match args.policy.or(file.policy) {
        Some(p) => p.parse().map_err(usage)?,
        None => default_policy,
    };
    let mut cfg = RunConfig::new(scenario, policy);
    if let Some(e) = args.endpoint.or(file.endpoint) {
        cfg.endpoint = Some(e.parse::<Endpoint>().map_err(usage)?);
    }
    cfg.seed = args.seed.or(file.seed).unwrap_or(0);
    cfg.out_dir = Some(out_dir(args.out.or(file.out)));
    if let Some(dt) = args.dt.or(file.dt) {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(usage(format!("--dt must be positive, got {dt}")));
        }
        cfg.dt = dt;
    }
    cfg.ticks_max = args.ticks_max.or(file.ticks_max);
    if cfg.policy == PolicyKind::Remote && cfg.endpoint.is_none() {
        return Err(usage("--policy remote needs --endpoint"));
    }
    Ok(cfg)
}

fn summary(log: &EpisodeLog) -> String {
    let r = &log.end.result;
    format!(
        "{} {} terminal={} t={:.1}s route={:.3} DS={:.1} success={} infractions={} degraded_ticks={}",
        log.header.scenario,
        log.header.policy,
        log.end.terminal,
        log.end.t,
        log.end.route_completion,
        r.driving_score,
        r.success,
        r.infractions.len(),
        log.end.degraded_ticks
    )
}

fn policy_status(logs: &[&EpisodeLog]) -> Result<(), Failure> {
    match logs.iter().find(|l| l.end.terminal == TerminalCause::PolicyFailure) {
        Some(l) => Err(Failure(EXIT_POLICY, format!("policy failure in {}", l.header.scenario))),
        None => Ok(()),
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    if args.scenario.is_none() && args.config.is_none() {
        return Err(usage("run needs --scenario"));
    }
    let cfg = build_config(args, "", PolicyKind::Oracle)?;
    let log = run_episode(&cfg)?;
    println!("{}", summary(&log));
    policy_status(&[&log])
}

fn suite(args: RunArgs) -> Result<(), Failure> {
    let cfg = build_config(args, "", PolicyKind::Oracle)?;
    let mut logs = Vec::new();
    for result in run_catalog(&cfg) {
        let log = result?;
        println!("{}", summary(&log));
        logs.push(log);
    }
    let results: Vec<_> = logs.iter().map(|l| l.end.result.clone()).collect();
    let (ds, sr) = xdrive::metrics::aggregate_suite(&results);
    println!("driving_score={ds:.1} success_rate={sr:.1}%");
    policy_status(&logs.iter().collect::<Vec<_>>())
}

fn echo(args: EchoArgs) -> Result<(), Failure> {
    let server = args.delays.iter().fold(EchoServer::new(), |s, &(i, ms)| s.delay(i, Duration::from_millis(ms)));
    if args.stdio {
        server.serve_stdio().map_err(|e| usage(format!("stdio: {e}")))?;
        return Ok(());
    }
    let mut run = args.run;
    run.policy = Some("remote".into());
    if run.endpoint.is_none() {
        let (addr, _) = server.spawn_tcp().map_err(|e| usage(format!("cannot start echo server: {e}")))?;
        run.endpoint = Some(addr.to_string());
    }
    let cfg = build_config(run, "default_driving", PolicyKind::Remote)?;
    let log = run_episode(&cfg)?;
    println!("{}", summary(&log));
    policy_status(&[&log])
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Suite(a) => suite(a),
        Command::Report(a) => {
            let rep = report(&out_dir(a.out))?;
            print!("{}", rep.to_text());
            Ok(())
        }
        Command::Catalog { scenario: None } => {
            catalog_names().iter().for_each(|n| println!("{n}"));
            Ok(())
        }
        Command::Catalog { scenario: Some(name) } => match catalog_source(&name) {
            Some(src) => {
                print!("{src}");
                Ok(())
            }
            None => Err(Failure(EXIT_SCENARIO, format!("unknown scenario '{name}'"))),
        },
        Command::ProtocolEcho(a) => echo(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("xdrive: {msg}");
            ExitCode::from(code)
        }
    }
}
