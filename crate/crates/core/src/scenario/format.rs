use super::{ScenarioError, ScenarioSpec, DEFAULT_TIME_BUDGET_S};
use crate::world::{
    ActorKind, ActorState, Lane, LaneGraph, LaneSpecial, LineType, NavKind, NavigationCommand, Polyline, Pose, Route,
    Script, SignKind, TrafficLightState, TrafficSign, Trigger, Vec2,
};
use std::fmt::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Meta,
    Lanes,
    Route,
    Actors,
    Lights,
    Signs,
}

impl Section {
    fn from_header(name: &str) -> Option<Section> {
        Some(match name {
            "meta" => Section::Meta,
            "lanes" => Section::Lanes,
            "route" => Section::Route,
            "actors" => Section::Actors,
            "lights" => Section::Lights,
            "signs" => Section::Signs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, c)) in line.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((i, col + 1)),
            (true, Some((s, column))) => {
                out.push(Token { text: &line[s..i], column });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((s, column)) = start {
        out.push(Token { text: &line[s..], column });
    }
    out
}

/// One `key=value` record with error locations.
struct Record<'a> {
    line: usize,
    fields: Vec<(&'a str, &'a str, usize)>,
    used: Vec<bool>,
}

impl<'a> Record<'a> {
    fn new(line: usize, toks: &[Token<'a>]) -> Result<Self, ScenarioError> {
        let mut fields: Vec<(&str, &str, usize)> = Vec::new();
        for t in toks {
            let (k, v) = t
                .text
                .split_once('=')
                .ok_or_else(|| syntax(line, t.column, format!("expected key=value, found '{}'", t.text)))?;
            if k.is_empty() {
                return Err(syntax(line, t.column, "empty key".into()));
            }
            if fields.iter().any(|f| f.0 == k) {
                return Err(syntax(line, t.column, format!("duplicate key '{k}'")));
            }
            fields.push((k, v, t.column + k.chars().count() + 1));
        }
        let used = vec![false; fields.len()];
        Ok(Record { line, fields, used })
    }

    fn opt(&mut self, key: &str) -> Option<(&'a str, usize)> {
        let i = self.fields.iter().position(|f| f.0 == key)?;
        self.used[i] = true;
        Some((self.fields[i].1, self.fields[i].2))
    }

    fn req(&mut self, key: &str, column: usize) -> Result<(&'a str, usize), ScenarioError> {
        self.opt(key).ok_or_else(|| syntax(self.line, column, format!("missing field '{key}'")))
    }

    fn parse_with<T>(
        &mut self,
        key: &str,
        column: usize,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, ScenarioError> {
        let (v, col) = self.req(key, column)?;
        f(v).map_err(|m| syntax(self.line, col, format!("{key}: {m}")))
    }

    fn parse_opt<T>(&mut self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ScenarioError> {
        match self.opt(key) {
            Some((v, col)) => f(v).map(Some).map_err(|m| syntax(self.line, col, format!("{key}: {m}"))),
            None => Ok(None),
        }
    }

    fn finish(self) -> Result<(), ScenarioError> {
        match self.fields.iter().zip(&self.used).find(|(_, used)| !**used) {
            Some((f, _)) => Err(syntax(self.line, f.2 - f.0.chars().count() - 1, format!("unknown field '{}'", f.0))),
            None => Ok(()),
        }
    }
}

fn syntax(line: usize, column: usize, message: String) -> ScenarioError {
    ScenarioError::Syntax { line, column, message }
}

fn num(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn nums(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(num).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, found {}", v.len()));
    }
    Ok(v)
}

fn point(s: &str) -> Result<Vec2, String> {
    let v = nums(s, 2)?;
    Ok(Vec2::new(v[0], v[1]))
}

fn points(s: &str) -> Result<Vec<Vec2>, String> {
    s.split(';').map(point).collect()
}

fn keyword<T: FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn neighbor(s: &str) -> Result<Option<String>, String> {
    Ok(if s == "-" { None } else { Some(s.to_string()) })
}

fn script(s: &str) -> Result<Script, String> {
    let points = s
        .split(';')
        .map(|p| nums(p, 3).map(|v| (v[0], Vec2::new(v[1], v[2]))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Script { points })
}

fn id_token<'a>(line: usize, toks: &[Token<'a>]) -> Result<&'a str, ScenarioError> {
    let t = toks[0];
    if t.text.contains('=') {
        return Err(syntax(line, t.column, "record must start with an id".into()));
    }
    Ok(t.text)
}

#[derive(Default)]
struct Draft {
    name: Option<String>,
    time_budget: Option<f64>,
    ego_speed: Option<f64>,
    ego_start_s: Option<f64>,
    success_speed_cap: Option<f64>,
    lanes: Vec<Lane>,
    route_lanes: Option<Vec<String>>,
    commands: Vec<NavigationCommand>,
    actors: Vec<(ActorState, Option<(f64, Option<Vec2>)>)>,
    lights: Vec<TrafficLightState>,
    signs: Vec<TrafficSign>,
}

fn parse_meta(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    let mut r = Record::new(line, toks)?;
    if let Some((v, _)) = r.opt("name") {
        d.name = Some(v.to_string());
    }
    if let Some(v) = r.parse_opt("time_budget", num)? {
        d.time_budget = Some(v);
    }
    if let Some(v) = r.parse_opt("ego_speed", num)? {
        d.ego_speed = Some(v);
    }
    if let Some(v) = r.parse_opt("ego_start_s", num)? {
        d.ego_start_s = Some(v);
    }
    if let Some(v) = r.parse_opt("success_speed_cap", num)? {
        d.success_speed_cap = Some(v);
    }
    r.finish()
}

fn parse_lane(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    let id = id_token(line, toks)?;
    let col = toks[0].column;
    let mut r = Record::new(line, &toks[1..])?;
    let width = r.parse_with("width", col, num)?;
    let left_line: LineType = r.parse_with("left", col, keyword)?;
    let right_line: LineType = r.parse_with("right", col, keyword)?;
    let special: LaneSpecial = r.parse_opt("special", keyword)?.unwrap_or(LaneSpecial::None);
    let left_neighbor = r.parse_opt("left_nb", neighbor)?.flatten();
    let right_neighbor = r.parse_opt("right_nb", neighbor)?.flatten();
    let centerline = r.parse_with("pts", col, |s| {
        Polyline::new(points(s)?).ok_or_else(|| "centerline needs at least two distinct points".to_string())
    })?;
    r.finish()?;
    d.lanes.push(Lane { id: id.into(), centerline, width, left_line, right_line, left_neighbor, right_neighbor, special });
    Ok(())
}

fn parse_route(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    if toks[0].text == "cmd" {
        let mut r = Record::new(line, &toks[1..])?;
        let at_s = r.parse_with("at", toks[0].column, num)?;
        let kind: NavKind = r.parse_with("kind", toks[0].column, keyword)?;
        r.finish()?;
        d.commands.push(NavigationCommand { at_s, kind });
        return Ok(());
    }
    let mut r = Record::new(line, toks)?;
    let lanes = r.parse_with("lanes", toks[0].column, |s| {
        let ids: Vec<String> = s.split(',').map(str::to_string).collect();
        if ids.iter().any(String::is_empty) {
            Err("empty lane id".to_string())
        } else {
            Ok(ids)
        }
    })?;
    r.finish()?;
    if d.route_lanes.is_some() {
        return Err(syntax(line, toks[0].column, "route lanes given twice".into()));
    }
    d.route_lanes = Some(lanes);
    Ok(())
}

fn trigger(s: &str) -> Result<(f64, Option<Vec2>), String> {
    match s.split_once('@') {
        Some((dist, p)) => Ok((num(dist)?, Some(point(p)?))),
        None => Ok((num(s)?, None)),
    }
}

fn parse_actor(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    let id = id_token(line, toks)?;
    let col = toks[0].column;
    let mut r = Record::new(line, &toks[1..])?;
    let kind: ActorKind = r.parse_with("kind", col, keyword)?;
    let dims = r.parse_with("dims", col, |s| nums(s, 3))?;
    let script = r.parse_with("script", col, script)?;
    let trig = r.parse_opt("trigger", trigger)?;
    r.finish()?;
    let start = script.points[0].1;
    let actor = ActorState {
        id: id.into(),
        kind,
        pose: Pose { x: start.x, y: start.y, heading: 0.0, speed: 0.0 },
        dims: [dims[0], dims[1], dims[2]],
        script,
        trigger: None,
        activated_at: None,
        velocity: Vec2::default(),
    };
    d.actors.push((actor, trig));
    Ok(())
}

fn parse_light(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    let id = id_token(line, toks)?;
    let col = toks[0].column;
    let mut r = Record::new(line, &toks[1..])?;
    let light = TrafficLightState {
        id: id.into(),
        position: r.parse_with("pos", col, point)?,
        stop_line_s: r.parse_with("stop_s", col, num)?,
        red_s: r.parse_with("red", col, num)?,
        green_s: r.parse_with("green", col, num)?,
        yellow_s: r.parse_with("yellow", col, num)?,
        phase_clock: r.parse_opt("offset", num)?.unwrap_or(0.0),
    };
    r.finish()?;
    d.lights.push(light);
    Ok(())
}

fn parse_sign(d: &mut Draft, line: usize, toks: &[Token<'_>]) -> Result<(), ScenarioError> {
    let id = id_token(line, toks)?;
    let col = toks[0].column;
    let mut r = Record::new(line, &toks[1..])?;
    let sign = TrafficSign {
        id: id.into(),
        kind: r.parse_with("kind", col, keyword::<SignKind>)?,
        position: r.parse_with("pos", col, point)?,
        applies_from_s: r.parse_with("from", col, num)?,
    };
    r.finish()?;
    d.signs.push(sign);
    Ok(())
}

fn semantic(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic(msg.into())
}

fn unique<'a>(what: &str, ids: impl Iterator<Item = &'a str>) -> Result<(), ScenarioError> {
    let mut seen: Vec<&str> = Vec::new();
    for id in ids {
        if seen.contains(&id) {
            return Err(semantic(format!("duplicate {what} id {id}")));
        }
        seen.push(id);
    }
    Ok(())
}

fn finish(d: Draft) -> Result<ScenarioSpec, ScenarioError> {
    let name = d.name.ok_or_else(|| semantic("missing scenario name"))?;
    let lane_graph = LaneGraph { lanes: d.lanes };
    lane_graph.validate().map_err(semantic)?;
    let route = Route { lane_ids: d.route_lanes.ok_or_else(|| semantic("missing route lanes"))?, commands: d.commands };
    if route.commands.windows(2).any(|w| !(w[1].at_s > w[0].at_s)) {
        return Err(semantic("navigation command positions must strictly increase"));
    }
    let line = route.centerline(&lane_graph).map_err(semantic)?;
    let time_budget = d.time_budget.unwrap_or(DEFAULT_TIME_BUDGET_S);
    if !(time_budget > 0.0) {
        return Err(semantic("time_budget must be positive"));
    }
    let ego_speed = d.ego_speed.unwrap_or(0.0);
    if ego_speed < 0.0 {
        return Err(semantic("ego_speed must not be negative"));
    }
    let ego_start_s = d.ego_start_s.unwrap_or(0.0);
    if !(0.0..line.length()).contains(&ego_start_s) {
        return Err(semantic(format!("ego_start_s must lie within the route (length {:.3} m)", line.length())));
    }
    if d.success_speed_cap.is_some_and(|c| !(c > 0.0)) {
        return Err(semantic("success_speed_cap must be positive"));
    }
    let mut actors = Vec::with_capacity(d.actors.len());
    for (mut a, trig) in d.actors {
        if a.dims.iter().any(|e| !(*e > 0.0)) {
            return Err(semantic(format!("actor {} dims must be positive", a.id)));
        }
        a.script.validate(a.kind.speed_max()).map_err(|e| semantic(format!("actor {}: {e}", a.id)))?;
        if let Some((distance, p)) = trig {
            if distance < 0.0 {
                return Err(semantic(format!("actor {} trigger distance must not be negative", a.id)));
            }
            a.trigger = Some(Trigger { point: p.unwrap_or(a.script.points[0].1), distance });
        }
        actors.push(a);
    }
    for l in &d.lights {
        if [l.red_s, l.green_s, l.yellow_s].iter().any(|v| *v < 0.0) || !(l.period() > 0.0) {
            return Err(semantic(format!("light {} needs non-negative phases and a positive cycle", l.id)));
        }
    }
    unique("actor", actors.iter().map(|a| a.id.as_str()))?;
    unique("light", d.lights.iter().map(|l| l.id.as_str()))?;
    unique("sign", d.signs.iter().map(|s| s.id.as_str()))?;
    Ok(ScenarioSpec {
        name,
        lane_graph,
        route,
        actors,
        lights: d.lights,
        signs: d.signs,
        time_budget,
        success_speed_cap: d.success_speed_cap,
        ego_speed,
        ego_start_s,
    })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let mut d = Draft::default();
    let mut section = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(raw);
        if let Some(header) = trimmed.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, toks[0].column, "unterminated section header".into()))?;
            section = Some(
                Section::from_header(name.trim())
                    .ok_or_else(|| syntax(line, toks[0].column, format!("unknown section '{name}'")))?,
            );
            continue;
        }
        match section {
            None => return Err(syntax(line, toks[0].column, "record outside any section".into())),
            Some(Section::Meta) => parse_meta(&mut d, line, &toks)?,
            Some(Section::Lanes) => parse_lane(&mut d, line, &toks)?,
            Some(Section::Route) => parse_route(&mut d, line, &toks)?,
            Some(Section::Actors) => parse_actor(&mut d, line, &toks)?,
            Some(Section::Lights) => parse_light(&mut d, line, &toks)?,
            Some(Section::Signs) => parse_sign(&mut d, line, &toks)?,
        }
    }
    finish(d)
}

fn pt(p: Vec2) -> String {
    format!("{},{}", p.x, p.y)
}

/// Canonical document for a spec; parsing it gives back an equal spec.
pub fn serialize_scenario(spec: &ScenarioSpec) -> String {
    let mut out = String::new();
    let _ = write!(out, "[meta]\nname={} time_budget={} ego_speed={}", spec.name, spec.time_budget, spec.ego_speed);
    let _ = write!(out, " ego_start_s={}", spec.ego_start_s);
    if let Some(c) = spec.success_speed_cap {
        let _ = write!(out, " success_speed_cap={c}");
    }
    out.push_str("\n\n[lanes]\n");
    for l in &spec.lane_graph.lanes {
        let pts: Vec<String> = l.centerline.points().iter().map(|p| pt(*p)).collect();
        let _ = writeln!(
            out,
            "{} width={} left={} right={} special={} left_nb={} right_nb={} pts={}",
            l.id,
            l.width,
            l.left_line,
            l.right_line,
            l.special,
            l.left_neighbor.as_deref().unwrap_or("-"),
            l.right_neighbor.as_deref().unwrap_or("-"),
            pts.join(";")
        );
    }
    let _ = write!(out, "\n[route]\nlanes={}\n", spec.route.lane_ids.join(","));
    for c in &spec.route.commands {
        let _ = writeln!(out, "cmd at={} kind={}", c.at_s, c.kind);
    }
    if !spec.actors.is_empty() {
        out.push_str("\n[actors]\n");
    }
    for a in &spec.actors {
        let script: Vec<String> = a.script.points.iter().map(|(t, p)| format!("{t},{}", pt(*p))).collect();
        let _ = write!(
            out,
            "{} kind={} dims={},{},{} script={}",
            a.id,
            a.kind,
            a.dims[0],
            a.dims[1],
            a.dims[2],
            script.join(";")
        );
        if let Some(tr) = a.trigger {
            if tr.point == a.script.points[0].1 {
                let _ = write!(out, " trigger={}", tr.distance);
            } else {
                let _ = write!(out, " trigger={}@{}", tr.distance, pt(tr.point));
            }
        }
        out.push('\n');
    }
    if !spec.lights.is_empty() {
        out.push_str("\n[lights]\n");
    }
    for l in &spec.lights {
        let _ = writeln!(
            out,
            "{} pos={} stop_s={} red={} green={} yellow={} offset={}",
            l.id,
            pt(l.position),
            l.stop_line_s,
            l.red_s,
            l.green_s,
            l.yellow_s,
            l.phase_clock
        );
    }
    if !spec.signs.is_empty() {
        out.push_str("\n[signs]\n");
    }
    for s in &spec.signs {
        let _ = writeln!(out, "{} kind={} pos={} from={}", s.id, s.kind, pt(s.position), s.applies_from_s);
    }
    out
}
