use super::{InputKind, Policy};
use crate::cot::{
    Decision, LaneReport, LightReport, ObjectReport, ObservationInput, SignReport, Stage, StageContext, StageError,
    Staged, WaypointPlan,
};
use crate::parse::CanonicalText;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub v: u32,
    pub session: String,
    pub stage: String,
    pub prompt: String,
    pub images: Vec<String>,
    pub history: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub v: u32,
    pub stage: String,
    pub text: String,
}

/// Where the model server lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// `host:port`, optionally prefixed with `tcp://`.
    Tcp(String),
    /// `exec:<program> <args...>`; the child speaks the protocol on stdio.
    Exec(Vec<String>),
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(cmd) = s.strip_prefix("exec:") {
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if argv.is_empty() {
                return Err("exec endpoint needs a program".into());
            }
            return Ok(Endpoint::Exec(argv));
        }
        let addr = s.strip_prefix("tcp://").unwrap_or(s);
        match addr.rsplit_once(':') {
            Some((host, port)) if !host.is_empty() && port.parse::<u16>().is_ok() => Ok(Endpoint::Tcp(addr.into())),
            _ => Err(format!("endpoint '{s}' is neither host:port nor exec:<command>")),
        }
    }
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::Tcp(a) => write!(f, "tcp://{a}"),
            Endpoint::Exec(argv) => write!(f, "exec:{}", argv.join(" ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub endpoint: Endpoint,
    pub timeout_ms: u64,
    pub max_retries: u32,
    pub session: String,
}

impl RemoteConfig {
    pub fn new(endpoint: Endpoint) -> Self {
        RemoteConfig { endpoint, timeout_ms: 2000, max_retries: 1, session: "xdrive".into() }
    }
}

struct Connection {
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    child: Option<Child>,
    /// Requests sent whose responses have not been read yet.
    owed: usize,
}

impl Connection {
    fn open(endpoint: &Endpoint) -> std::io::Result<Connection> {
        let (tx, lines) = mpsc::channel();
        let spawn_reader = |r: Box<dyn std::io::Read + Send>| {
            std::thread::spawn(move || {
                for line in BufReader::new(r).lines() {
                    let stop = line.is_err();
                    if tx.send(line).is_err() || stop {
                        break;
                    }
                }
            });
        };
        match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr)?;
                stream.set_nodelay(true)?;
                spawn_reader(Box::new(stream.try_clone()?));
                Ok(Connection { writer: Box::new(stream), lines, child: None, owed: 0 })
            }
            Endpoint::Exec(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()?;
                let stdin = child.stdin.take().expect("piped stdin");
                spawn_reader(Box::new(child.stdout.take().expect("piped stdout")));
                Ok(Connection { writer: Box::new(stdin), lines, child: Some(child), owed: 0 })
            }
        }
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Forwards every stage to an external server and parses its text answer.
pub struct RemotePolicy {
    config: RemoteConfig,
    conn: Option<Connection>,
    images: bool,
}

impl RemotePolicy {
    /// The connection is opened on the first stage call.
    pub fn new(config: RemoteConfig) -> Self {
        RemotePolicy { config, conn: None, images: true }
    }

    /// Sends the rendered scene text instead of camera attachments.
    pub fn with_scene_input(mut self) -> Self {
        self.images = false;
        self
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// One request/response round trip, retried on timeout.
    pub fn call(&mut self, stage: Stage, ctx: &StageContext<'_>) -> Result<String, StageError> {
        let fail = |message: String| StageError { stage, message, raw: String::new() };
        if self.conn.is_none() {
            let conn = Connection::open(&self.config.endpoint)
                .map_err(|e| fail(format!("cannot reach {}: {e}", self.config.endpoint)))?;
            self.conn = Some(conn);
        }
        let images = match &ctx.obs.input {
            ObservationInput::Images(att) => {
                att.iter().map(|a| base64::engine::general_purpose::STANDARD.encode(&a.bytes)).collect()
            }
            ObservationInput::Scene(_) => Vec::new(),
        };
        let request = WireRequest {
            v: PROTOCOL_VERSION,
            session: self.config.session.clone(),
            stage: stage.name().into(),
            prompt: ctx.prompt.concat(),
            images,
            history: ctx.obs.history.clone(),
        };
        let mut line = serde_json::to_string(&request).expect("request serializes");
        line.push('\n');
        let timeout = Duration::from_millis(self.config.timeout_ms);

        for _ in 0..=self.config.max_retries {
            let conn = self.conn.as_mut().expect("connection open");
            if let Err(e) = conn.writer.write_all(line.as_bytes()).and_then(|_| conn.writer.flush()) {
                self.conn = None;
                return Err(fail(format!("send failed: {e}")));
            }
            conn.owed += 1;
            let deadline = Instant::now() + timeout;
            loop {
                let left = deadline.saturating_duration_since(Instant::now());
                match conn.lines.recv_timeout(left) {
                    Ok(Ok(text)) => {
                        conn.owed -= 1;
                        if conn.owed > 0 {
                            continue;
                        }
                        let resp: WireResponse = serde_json::from_str(&text).map_err(|e| StageError {
                            stage,
                            message: format!("malformed response: {e}"),
                            raw: text.clone(),
                        })?;
                        if resp.v != PROTOCOL_VERSION || resp.stage != stage.name() {
                            return Err(StageError {
                                stage,
                                message: format!("unexpected response header v={} stage={}", resp.v, resp.stage),
                                raw: text,
                            });
                        }
                        return Ok(resp.text);
                    }
                    Ok(Err(e)) => {
                        self.conn = None;
                        return Err(fail(format!("read failed: {e}")));
                    }
                    Err(RecvTimeoutError::Timeout) => break,
                    Err(RecvTimeoutError::Disconnected) => {
                        self.conn = None;
                        return Err(fail("connection closed".into()));
                    }
                }
            }
        }
        Err(fail(format!(
            "timeout after {} ms and {} retr{}",
            self.config.timeout_ms,
            self.config.max_retries,
            if self.config.max_retries == 1 { "y" } else { "ies" }
        )))
    }

    fn stage<T: CanonicalText>(&mut self, stage: Stage, ctx: &StageContext<'_>) -> Result<Staged<T>, StageError> {
        let raw = self.call(stage, ctx)?;
        match T::from_text(&raw) {
            Ok(value) => Ok(Staged { value, raw }),
            Err(e) => Err(StageError { stage, message: e.to_string(), raw }),
        }
    }
}

impl Policy for RemotePolicy {
    fn name(&self) -> &str {
        "remote"
    }

    fn input_kind(&self) -> InputKind {
        if self.images {
            InputKind::Images
        } else {
            InputKind::Scene
        }
    }

    fn objects(&mut self, ctx: &StageContext<'_>) -> Result<Staged<ObjectReport>, StageError> {
        self.stage(Stage::Objects, ctx)
    }

    fn light(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LightReport>, StageError> {
        self.stage(Stage::Light, ctx)
    }

    fn signs(&mut self, ctx: &StageContext<'_>) -> Result<Staged<SignReport>, StageError> {
        self.stage(Stage::Signs, ctx)
    }

    fn lane(&mut self, ctx: &StageContext<'_>) -> Result<Staged<LaneReport>, StageError> {
        self.stage(Stage::Lane, ctx)
    }

    fn decide(&mut self, ctx: &StageContext<'_>) -> Result<Staged<Decision>, StageError> {
        self.stage(Stage::Decision, ctx)
    }

    fn plan(&mut self, ctx: &StageContext<'_>) -> Result<Staged<WaypointPlan>, StageError> {
        self.stage(Stage::Waypoints, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_forms() {
        assert_eq!("127.0.0.1:9000".parse(), Ok(Endpoint::Tcp("127.0.0.1:9000".into())));
        assert_eq!("tcp://localhost:1".parse(), Ok(Endpoint::Tcp("localhost:1".into())));
        assert_eq!("exec:xdrive protocol-echo --stdio".parse::<Endpoint>().unwrap(),
            Endpoint::Exec(vec!["xdrive".into(), "protocol-echo".into(), "--stdio".into()]));
        assert!("nonsense".parse::<Endpoint>().is_err());
        assert!("exec:".parse::<Endpoint>().is_err());
    }

    #[test]
    fn wire_request_field_order() {
        let r = WireRequest {
            v: 1,
            session: "s".into(),
            stage: "objects".into(),
            prompt: "p".into(),
            images: vec![],
            history: vec!["h".into()],
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"v":1,"session":"s","stage":"objects","prompt":"p","images":[],"history":["h"]}"#
        );
    }
}
