//! Stage report formats.
//!
//! ```text
//! objects: none | <category> (x, y, z, l, w, h) <motion> (attend "<reason>" | ignore) { ; … }
//! light:   none | <phase> (<distance>)
//! signs:   none | <kind> (<distance>) { ; … }
//! lane:    lane <id> left <line> right <line> legal_left yes|no legal_right yes|no special <kind>
//! ```

use super::lexer::{quote, Cursor, Tok};
use super::tuples::{box_text, read_box};
use super::{fmt_num, ParseError, ParseErrorKind};
use crate::cot::{DetectedObject, LaneReport, LightReport, Motion, ObjectReport, SignEntry, SignReport, VisibleLight};
use crate::world::{LaneSpecial, LightPhase, LineType, ObjectCategory, SignKind};
use std::str::FromStr;

fn keyword_value<T: FromStr<Err = String>>(cur: &mut Cursor, what: &str) -> Result<T, ParseError> {
    let (w, off) = cur.word(what)?;
    w.parse().map_err(|e| ParseError::new(off, ParseErrorKind::Invalid(e)))
}

fn single_number(cur: &mut Cursor) -> Result<f64, ParseError> {
    let (v, off) = cur.tuple()?;
    if v.len() != 1 {
        return Err(ParseError::new(off, ParseErrorKind::Arity { expected: 1, found: v.len() }));
    }
    Ok(v[0])
}

fn is_none(cur: &mut Cursor) -> bool {
    if matches!(cur.peek(), Some(Tok::Word(w)) if w == "none") {
        cur.next();
        true
    } else {
        false
    }
}

/// Parses `;`-separated records until the input ends.
fn records<T>(text: &str, mut one: impl FnMut(&mut Cursor) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
    let mut cur = Cursor::new(text)?;
    if is_none(&mut cur) {
        cur.finish()?;
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    loop {
        out.push(one(&mut cur)?);
        if cur.eat(&Tok::Semi) && !cur.at_end() {
            continue;
        }
        cur.finish()?;
        return Ok(out);
    }
}

pub fn serialize_object_report(r: &ObjectReport) -> String {
    if r.objects.is_empty() {
        return "none".into();
    }
    r.objects
        .iter()
        .map(|o| {
            let tail = if o.attend { format!("attend {}", quote(&o.reason)) } else { "ignore".into() };
            format!("{} {} {} {}", o.category, box_text(&o.bbox), o.motion, tail)
        })
        .collect::<Vec<_>>()
        .join(";\n")
}

pub fn parse_object_report(text: &str) -> Result<ObjectReport, ParseError> {
    let objects = records(text, |cur| {
        let category: ObjectCategory = keyword_value(cur, "object category")?;
        let bbox = read_box(cur)?;
        let motion: Motion = keyword_value(cur, "motion")?;
        let (flag, off) = cur.word("'attend' or 'ignore'")?;
        let (attend, reason) = match flag.as_str() {
            "attend" => {
                let reason = cur.string("quoted reason")?;
                if reason.trim().is_empty() {
                    return Err(ParseError::new(off, ParseErrorKind::Invalid("attended object needs a reason".into())));
                }
                (true, reason)
            }
            "ignore" => (false, String::new()),
            other => {
                return Err(ParseError::new(
                    off,
                    ParseErrorKind::Unexpected { expected: "'attend' or 'ignore'".into(), found: format!("'{other}'") },
                ))
            }
        };
        Ok(DetectedObject { category, bbox, motion, attend, reason })
    })?;
    Ok(ObjectReport { objects })
}

pub fn serialize_light_report(r: &LightReport) -> String {
    match r.light {
        None => "none".into(),
        Some(l) => format!("{} ({})", l.phase, fmt_num(l.distance_to_stop_line)),
    }
}

pub fn parse_light_report(text: &str) -> Result<LightReport, ParseError> {
    let mut v = records(text, |cur| {
        let phase: LightPhase = keyword_value(cur, "light phase")?;
        let distance_to_stop_line = single_number(cur)?;
        Ok(VisibleLight { phase, distance_to_stop_line })
    })?;
    if v.len() > 1 {
        return Err(ParseError::new(0, ParseErrorKind::Count { expected: 1, found: v.len() }));
    }
    Ok(LightReport { light: v.pop() })
}

fn sign_text(k: &SignKind) -> String {
    match k {
        SignKind::SpeedLimit(v) => format!("speed_limit:{}", fmt_num(*v)),
        other => other.to_string(),
    }
}

pub fn serialize_sign_report(r: &SignReport) -> String {
    if r.signs.is_empty() {
        return "none".into();
    }
    r.signs
        .iter()
        .map(|s| format!("{} ({})", sign_text(&s.kind), fmt_num(s.distance)))
        .collect::<Vec<_>>()
        .join(";\n")
}

pub fn parse_sign_report(text: &str) -> Result<SignReport, ParseError> {
    let signs = records(text, |cur| {
        let kind: SignKind = keyword_value(cur, "sign kind")?;
        let distance = single_number(cur)?;
        Ok(SignEntry { kind, distance })
    })?;
    Ok(SignReport { signs })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn serialize_lane_report(r: &LaneReport) -> String {
    format!(
        "lane {} left {} right {} legal_left {} legal_right {} special {}",
        r.lane_id,
        r.left_line,
        r.right_line,
        yes_no(r.legal_left),
        yes_no(r.legal_right),
        r.special
    )
}

pub fn parse_lane_report(text: &str) -> Result<LaneReport, ParseError> {
    let mut cur = Cursor::new(text)?;
    let flag = |cur: &mut Cursor| -> Result<bool, ParseError> {
        let (w, off) = cur.word("yes or no")?;
        match w.as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            _ => Err(ParseError::new(off, ParseErrorKind::Unexpected { expected: "yes or no".into(), found: format!("'{w}'") })),
        }
    };
    cur.keyword("lane")?;
    let (lane_id, _) = cur.word("lane id")?;
    cur.keyword("left")?;
    let left_line: LineType = keyword_value(&mut cur, "line type")?;
    cur.keyword("right")?;
    let right_line: LineType = keyword_value(&mut cur, "line type")?;
    cur.keyword("legal_left")?;
    let legal_left = flag(&mut cur)?;
    cur.keyword("legal_right")?;
    let legal_right = flag(&mut cur)?;
    cur.keyword("special")?;
    let special: LaneSpecial = keyword_value(&mut cur, "lane special")?;
    cur.finish()?;
    if (legal_left && left_line != LineType::Dashed) || (legal_right && right_line != LineType::Dashed) {
        return Err(ParseError::new(0, ParseErrorKind::Invalid("legal lane change across a solid line".into())));
    }
    Ok(LaneReport { lane_id, left_line, right_line, legal_left, legal_right, special })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Box3;

    #[test]
    fn object_report_round_trip() {
        let r = ObjectReport {
            objects: vec![
                DetectedObject {
                    category: ObjectCategory::Pedestrian,
                    bbox: Box3::new([12.0, -2.5, 0.9], [0.5, 0.5, 1.8]),
                    motion: Motion::CrossingLeft,
                    attend: true,
                    reason: "walking into the ego lane".into(),
                },
                DetectedObject {
                    category: ObjectCategory::Vehicle,
                    bbox: Box3::new([30.0, 3.5, 0.75], [4.5, 1.8, 1.5]),
                    motion: Motion::Away,
                    attend: false,
                    reason: String::new(),
                },
            ],
        };
        let text = serialize_object_report(&r);
        assert_eq!(parse_object_report(&text).unwrap(), r);
        assert_eq!(parse_object_report("none").unwrap(), ObjectReport::default());
    }

    #[test]
    fn attend_without_reason_rejected() {
        assert!(parse_object_report("vehicle (1,0,0,1,1,1) away attend \"\"").is_err());
    }

    #[test]
    fn light_and_signs() {
        let l = parse_light_report("red ( 25.000 )").unwrap();
        assert_eq!(l.light.unwrap().phase, LightPhase::Red);
        assert_eq!(parse_light_report("none").unwrap(), LightReport::default());
        assert!(parse_light_report("red (1); green (2)").is_err());
        let s = parse_sign_report("speed_limit:5.000 (-3.000);\nstop (12.500)").unwrap();
        assert_eq!(s.speed_limit(), Some(5.0));
        assert_eq!(s.signs[1].kind, SignKind::Stop);
    }

    #[test]
    fn lane_report_checks_legality() {
        let r = parse_lane_report("lane L1 left dashed right solid legal_left yes legal_right no special none").unwrap();
        assert!(r.legal_left);
        assert_eq!(parse_lane_report(&serialize_lane_report(&r)).unwrap(), r);
        assert!(parse_lane_report("lane L1 left solid right solid legal_left yes legal_right no special none").is_err());
    }
}
