//! Canned-response server speaking the remote-policy wire protocol.
//!
//! It answers every stage with a fixed, well-formed report describing an
//! empty straight road driven at 6 m/s. Individual requests can be delayed to
//! exercise client timeouts.

use super::remote::{WireRequest, WireResponse, PROTOCOL_VERSION};
use crate::cot::{Stage, TemplateId};
use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener};
use std::thread::JoinHandle;
use std::time::Duration;

/// Canned answer text for a wire stage name.
pub fn canned_response(stage: Stage) -> String {
    match stage {
        Stage::Objects | Stage::Light | Stage::Signs => "none".into(),
        Stage::Lane => "lane L1 left solid right solid legal_left no legal_right no special none".into(),
        Stage::Decision => format!(
            "{}\ntarget_speed: 6.000\nrationale: \"canned response\"",
            TemplateId::DefaultDriving.pattern()
        ),
        Stage::Waypoints => {
            "(3.000, 0.000), (6.000, 0.000), (9.000, 0.000), (12.000, 0.000), (15.000, 0.000), (18.000, 0.000)".into()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EchoServer {
    /// Sleep before answering the request with this zero-based index.
    pub delays: HashMap<usize, Duration>,
}

impl EchoServer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn delay(mut self, request_index: usize, by: Duration) -> Self {
        self.delays.insert(request_index, by);
        self
    }

    /// Serves one request per line until EOF; returns the request count.
    pub fn serve_lines<R: BufRead, W: Write>(&self, reader: R, mut writer: W) -> io::Result<usize> {
        let mut n = 0;
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(d) = self.delays.get(&n) {
                std::thread::sleep(*d);
            }
            n += 1;
            let response = match serde_json::from_str::<WireRequest>(&line) {
                Ok(req) => WireResponse {
                    v: PROTOCOL_VERSION,
                    text: Stage::from_name(&req.stage)
                        .map(canned_response)
                        .unwrap_or_else(|| format!("unknown stage '{}'", req.stage)),
                    stage: req.stage,
                },
                Err(e) => WireResponse { v: PROTOCOL_VERSION, stage: String::new(), text: format!("bad request: {e}") },
            };
            let mut out = serde_json::to_string(&response).expect("response serializes");
            out.push('\n');
            if writer.write_all(out.as_bytes()).and_then(|_| writer.flush()).is_err() {
                break;
            }
        }
        Ok(n)
    }

    /// Listens on an ephemeral local port; each connection gets its own
    /// thread and its own request counter.
    pub fn spawn_tcp(self) -> io::Result<(SocketAddr, JoinHandle<()>)> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let server = self.clone();
                std::thread::spawn(move || {
                    if let Ok(read_half) = stream.try_clone() {
                        let _ = server.serve_lines(BufReader::new(read_half), stream);
                    }
                });
            }
        });
        Ok((addr, handle))
    }

    pub fn serve_stdio(&self) -> io::Result<usize> {
        self.serve_lines(io::stdin().lock(), io::stdout().lock())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cot::{Decision, LaneReport, LightReport, ObjectReport, SignReport, WaypointPlan};
    use crate::parse::CanonicalText;

    #[test]
    fn canned_texts_parse() {
        assert!(ObjectReport::from_text(&canned_response(Stage::Objects)).unwrap().objects.is_empty());
        assert!(!LightReport::from_text(&canned_response(Stage::Light)).unwrap().visible());
        assert!(SignReport::from_text(&canned_response(Stage::Signs)).unwrap().signs.is_empty());
        assert_eq!(LaneReport::from_text(&canned_response(Stage::Lane)).unwrap().lane_id, "L1");
        let d = Decision::from_text(&canned_response(Stage::Decision)).unwrap();
        assert_eq!((d.template_id, d.target_speed), (TemplateId::DefaultDriving, 6.0));
        let p = WaypointPlan::from_text(&canned_response(Stage::Waypoints)).unwrap();
        assert_eq!(p.points[5].x, 18.0);
    }

    #[test]
    fn answers_in_order() {
        let input = "{\"v\":1,\"session\":\"a\",\"stage\":\"light\",\"prompt\":\"\",\"images\":[],\"history\":[]}\n\
                     {\"v\":1,\"session\":\"a\",\"stage\":\"lane\",\"prompt\":\"\",\"images\":[],\"history\":[]}\n";
        let mut out = Vec::new();
        assert_eq!(EchoServer::new().serve_lines(input.as_bytes(), &mut out).unwrap(), 2);
        let lines: Vec<WireResponse> =
            String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines[0].stage, "light");
        assert_eq!(lines[1].stage, "lane");
    }
}
