use super::lexer::{quote, Cursor, Tok};
use super::{fmt_num, lexer::parse_number, ParseError, ParseErrorKind};
use crate::cot::{Decision, TemplateId};

/// A decision instruction resolved against the template table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatch {
    pub template_id: TemplateId,
    pub slots: Vec<String>,
}

impl DecisionMatch {
    /// Canonical instruction text for this match.
    pub fn filled_text(&self) -> String {
        let slots: Vec<&str> = self.slots.iter().map(String::as_str).collect();
        self.template_id.fill(&slots)
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Matches `text` (already whitespace-collapsed) against one pattern.
/// Slots are bracketed segments that cannot contain brackets themselves.
fn match_template(text: &str, id: TemplateId) -> Option<Vec<String>> {
    let pattern = collapse_ws(id.pattern());
    let mut parts = pattern.split("[]");
    let mut rest = text.strip_prefix(parts.next()?)?;
    let mut slots = Vec::new();
    for lit in parts {
        let inner = rest.strip_prefix('[')?;
        let close = inner.find(']')?;
        let content = &inner[..close];
        if content.contains('[') {
            return None;
        }
        let content = content.trim();
        if content.is_empty() {
            return None;
        }
        slots.push(content.to_string());
        rest = inner[close + 1..].strip_prefix(lit)?;
    }
    rest.is_empty().then_some(slots)
}

/// Resolves instruction text to its template. When several templates match,
/// the one with the most literal (non-slot) text wins.
pub fn parse_decision(text: &str) -> Result<DecisionMatch, ParseError> {
    let norm = collapse_ws(text);
    let best = TemplateId::ALL
        .iter()
        .filter_map(|&id| match_template(&norm, id).map(|slots| (id, slots)))
        .max_by_key(|(id, _)| (id.pattern().replace("[]", "").len(), std::cmp::Reverse(*id)));
    match best {
        Some((template_id, slots)) => Ok(DecisionMatch { template_id, slots }),
        None => {
            let nearest = TemplateId::ALL
                .iter()
                .map(|&id| {
                    let shown = id.pattern().replace("[]", "[…]");
                    (strsim::normalized_levenshtein(&norm, &shown), id, shown)
                })
                .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
                .map(|(_, id, shown)| format!("{id} (\"{shown}\")"))
                .unwrap_or_default();
            Err(ParseError::new(0, ParseErrorKind::NoTemplate { nearest }))
        }
    }
}

const SPEED_KEY: &str = "target_speed";
const RATIONALE_KEY: &str = "rationale";

/// Full decision record: instruction text, then `target_speed: <n>` and
/// `rationale: "<text>"`.
pub fn serialize_decision(d: &Decision) -> String {
    format!(
        "{}\n{SPEED_KEY}: {}\n{RATIONALE_KEY}: {}",
        d.filled_text,
        fmt_num(d.target_speed),
        quote(&d.rationale)
    )
}

fn key(cur: &mut Cursor, name: &str) -> Result<(), ParseError> {
    let (w, off) = cur.word(&format!("'{name}:'"))?;
    if w == format!("{name}:") {
        return Ok(());
    }
    if w == name {
        let (colon, _) = cur.word("':'")?;
        if colon == ":" {
            return Ok(());
        }
    }
    Err(ParseError::new(off, ParseErrorKind::Unexpected { expected: format!("'{name}:'"), found: format!("'{w}'") }))
}

pub fn parse_decision_report(text: &str) -> Result<Decision, ParseError> {
    let split = text.find(SPEED_KEY).ok_or_else(|| {
        ParseError::new(text.len(), ParseErrorKind::Unexpected { expected: format!("'{SPEED_KEY}:'"), found: "end of input".into() })
    })?;
    let m = parse_decision(&text[..split])?;
    let tail = &text[split..];
    let mut cur = Cursor::new(tail).map_err(|e| ParseError::new(e.offset + split, e.kind))?;
    let located = |e: ParseError| ParseError::new(e.offset + split, e.kind);
    key(&mut cur, SPEED_KEY).map_err(located)?;
    let (num, off) = cur.word("number").map_err(located)?;
    let target_speed = parse_number(&num)
        .ok_or_else(|| ParseError::new(off + split, ParseErrorKind::NonNumeric(num.clone())))?;
    if target_speed < 0.0 {
        return Err(ParseError::new(off + split, ParseErrorKind::Invalid("target_speed must be non-negative".into())));
    }
    key(&mut cur, RATIONALE_KEY).map_err(located)?;
    let rationale = cur.string("quoted rationale").map_err(located)?;
    cur.eat(&Tok::Semi);
    cur.finish().map_err(located)?;
    Ok(Decision { template_id: m.template_id, filled_text: m.filled_text(), rationale, target_speed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn red_light_approach_text() {
        let m = parse_decision("Slow down to a complete stop and wait for the light to turn green.").unwrap();
        assert_eq!(m.template_id, TemplateId::RedLightApproach);
        assert!(m.slots.is_empty());
    }

    #[test]
    fn junction_turn_slots() {
        let m = parse_decision("[Turn left] and [Pay attention to the cyclist.]").unwrap();
        assert_eq!(m.template_id, TemplateId::JunctionTurn);
        assert_eq!(m.slots, vec!["Turn left", "Pay attention to the cyclist."]);
    }

    #[test]
    fn no_match_suggests() {
        let e = parse_decision("fly to the moon").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NoTemplate { .. }));
        let e = parse_decision("Stop and wait for the lights to turn green").unwrap_err();
        assert!(e.to_string().contains("red_light_stationary"), "{e}");
    }

    #[test]
    fn single_slot_templates_disambiguate() {
        let m = parse_decision("[There is a vehicle ahead.] Maintain a safe following distance.").unwrap();
        assert_eq!(m.template_id, TemplateId::LeadVehicle20m);
        let m = parse_decision("[Approaching exit ramp, reduce speed.]").unwrap();
        assert_eq!(m.template_id, TemplateId::ExitRamp);
        assert!(parse_decision("[a] [b]").is_err());
    }

    #[test]
    fn report_round_trip_and_spacing() {
        let d = Decision {
            template_id: TemplateId::JunctionTurn,
            filled_text: TemplateId::JunctionTurn.fill(&["Turn left", "Pay attention to the road."]),
            rationale: "navigation requests a left turn".into(),
            target_speed: 8.0,
        };
        let text = serialize_decision(&d);
        assert_eq!(parse_decision_report(&text).unwrap(), d);
        let spaced = "[ Turn left ]\n and   [Pay attention to the road.]\n target_speed :\n 8.000 rationale : \"navigation requests a left turn\"";
        assert_eq!(parse_decision_report(spaced).unwrap(), d);
    }
}
