use super::{Observation, ObservationInput, PartialReports, Stage};
use crate::parse::{fmt_num, CanonicalText};
use crate::world::{NavKind, SceneTruth};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

const SYSTEM_PROMPT: &str = "You drive the ego vehicle. Work through the scene in order: objects, traffic light, \
traffic signs, lane, then choose an instruction and predict waypoints. Ego frame: x forward, y left, meters.";

/// Text half of a policy query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_prompt: String,
    pub nav_text: String,
    pub scene_text: String,
    pub stage_prompt: String,
}

impl PromptBundle {
    /// The single text sequence sent to a model.
    pub fn concat(&self) -> String {
        format!("{}\n\n{}\n\n{}\n\n{}", self.system_prompt, self.nav_text, self.scene_text, self.stage_prompt)
    }
}

fn stage_question(stage: Stage) -> &'static str {
    match stage {
        Stage::Objects => {
            "List every relevant object as `<category> (x, y, z, length, width, height) <motion> attend \"<reason>\"` \
             or `... ignore`, separated by `;`, or `none`."
        }
        Stage::Light => "Report the light governing the ego lane as `<phase> (<distance to stop line>)` or `none`.",
        Stage::Signs => "List the applicable signs as `<kind> (<distance>)` separated by `;`, or `none`.",
        Stage::Lane => {
            "Describe the current lane as `lane <id> left <line> right <line> legal_left yes|no \
             legal_right yes|no special <kind>`."
        }
        Stage::Decision => {
            "Choose one instruction template and fill its bracketed slots, then give `target_speed: <m/s>` \
             and `rationale: \"<text>\"`."
        }
        Stage::Waypoints => "Predict six ego-frame waypoints `(x, y)` at 0.5 s intervals up to 3.0 s.",
    }
}

fn render_scene(scene: &SceneTruth, out: &mut String) {
    if scene.objects.is_empty() {
        out.push_str("objects: none\n");
    } else {
        out.push_str("objects:\n");
        for o in &scene.objects {
            let b = &o.bbox;
            let _ = writeln!(
                out,
                "  {} {} ({}, {}, {}, {}, {}, {}) velocity ({}, {})",
                o.id,
                o.category,
                fmt_num(b.center_x),
                fmt_num(b.center_y),
                fmt_num(b.center_z),
                fmt_num(b.length),
                fmt_num(b.width),
                fmt_num(b.height),
                fmt_num(o.velocity.x),
                fmt_num(o.velocity.y)
            );
        }
    }
    match &scene.light {
        Some(l) => {
            let _ = writeln!(out, "light: {} {} stop line ({})", l.id, l.phase, fmt_num(l.distance_to_stop_line));
        }
        None => out.push_str("light: none\n"),
    }
    if scene.signs.is_empty() {
        out.push_str("signs: none\n");
    }
    for s in &scene.signs {
        let _ = writeln!(out, "sign: {} ({})", s.kind, fmt_num(s.distance));
    }
    let l = &scene.lane;
    let _ = writeln!(
        out,
        "lane: {} width {} left {} right {} legal_left {} legal_right {} special {}",
        l.lane_id,
        fmt_num(l.width),
        l.left_line,
        l.right_line,
        l.legal_left,
        l.legal_right,
        l.special
    );
    let route: Vec<String> = scene
        .route_ahead
        .iter()
        .step_by(10)
        .map(|p| format!("({}, {})", fmt_num(p.x), fmt_num(p.y)))
        .collect();
    let _ = write!(out, "route ahead: {}", route.join(", "));
}

/// Deterministic prompt for one stage. `prior` must hold every earlier stage.
pub fn render_prompts(obs: &Observation, prior: &PartialReports, stage: Stage) -> PromptBundle {
    let nav_text = match obs.nav_command.kind {
        NavKind::Follow => "navigation: follow the route".to_string(),
        k => format!("navigation: {} at route position {} m", k, fmt_num(obs.nav_command.at_s)),
    };

    let mut scene_text = format!("t: {:.1} s\nspeed: {:.1} m/s\n", obs.t, obs.ego_speed);
    match &obs.input {
        ObservationInput::Scene(scene) => render_scene(scene, &mut scene_text),
        ObservationInput::Images(imgs) => {
            let names: Vec<&str> = imgs.iter().map(|a| a.name.as_str()).collect();
            let _ = write!(scene_text, "camera: {} image(s) attached [{}]", imgs.len(), names.join(", "));
        }
    }

    let mut stage_prompt = String::new();
    let mut section = |title: &str, body: String| {
        let _ = write!(stage_prompt, "{title}:\n{body}\n\n");
    };
    for s in Stage::ALL.iter().take_while(|s| **s != stage) {
        let body = match s {
            Stage::Objects => prior.objects.as_ref().map(CanonicalText::to_text),
            Stage::Light => prior.light.as_ref().map(CanonicalText::to_text),
            Stage::Signs => prior.signs.as_ref().map(CanonicalText::to_text),
            Stage::Lane => prior.lane.as_ref().map(CanonicalText::to_text),
            Stage::Decision => prior.decision.as_ref().map(CanonicalText::to_text),
            Stage::Waypoints => None,
        };
        section(&format!("{} report", s.name()), body.expect("prior stages rendered in order"));
    }
    let _ = write!(stage_prompt, "question ({}): {}", stage.name(), stage_question(stage));

    PromptBundle { system_prompt: SYSTEM_PROMPT.to_string(), nav_text, scene_text, stage_prompt }
}
