use super::lexer::{Cursor, Tok};
use super::{fmt_num, ParseError, ParseErrorKind};
use crate::cot::{WaypointPlan, PLAN_POINTS};
use crate::world::{Box3, Vec2};

/// Reads `(x, y, z, length, width, height)` tuples separated by optional commas.
pub fn parse_boxes(text: &str) -> Result<Vec<Box3>, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(read_box(&mut cur)?);
        cur.eat(&Tok::Comma);
    }
    Ok(out)
}

pub(crate) fn read_box(cur: &mut Cursor) -> Result<Box3, ParseError> {
    let (v, off) = cur.tuple()?;
    if v.len() != 6 {
        return Err(ParseError::new(off, ParseErrorKind::Arity { expected: 6, found: v.len() }));
    }
    if let Some(&bad) = v[3..].iter().find(|e| !(**e > 0.0)) {
        return Err(ParseError::new(off, ParseErrorKind::NonPositiveExtent(bad)));
    }
    Ok(Box3::new([v[0], v[1], v[2]], [v[3], v[4], v[5]]))
}

pub(crate) fn box_text(b: &Box3) -> String {
    format!(
        "({}, {}, {}, {}, {}, {})",
        fmt_num(b.center_x),
        fmt_num(b.center_y),
        fmt_num(b.center_z),
        fmt_num(b.length),
        fmt_num(b.width),
        fmt_num(b.height)
    )
}

pub fn serialize_boxes(boxes: &[Box3]) -> String {
    boxes.iter().map(box_text).collect::<Vec<_>>().join(", ")
}

/// Reads exactly six `(x, y)` tuples.
pub fn parse_waypoints(text: &str) -> Result<WaypointPlan, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut pts = Vec::new();
    while !cur.at_end() {
        let (v, off) = cur.tuple()?;
        if v.len() != 2 {
            return Err(ParseError::new(off, ParseErrorKind::Arity { expected: 2, found: v.len() }));
        }
        pts.push(Vec2::new(v[0], v[1]));
        cur.eat(&Tok::Comma);
    }
    let points: [Vec2; PLAN_POINTS] = pts
        .try_into()
        .map_err(|v: Vec<Vec2>| ParseError::new(0, ParseErrorKind::Count { expected: PLAN_POINTS, found: v.len() }))?;
    Ok(WaypointPlan { points })
}

pub fn serialize_waypoints(plan: &WaypointPlan) -> String {
    plan.points
        .iter()
        .map(|p| format!("({}, {})", fmt_num(p.x), fmt_num(p.y)))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_box() {
        let b = parse_boxes("(1.0, 2.0, 0.5, 4.5, 1.8, 1.5)").unwrap();
        assert_eq!(b, vec![Box3::new([1.0, 2.0, 0.5], [4.5, 1.8, 1.5])]);
    }

    #[test]
    fn empty_text_is_empty_list() {
        assert!(parse_boxes("").unwrap().is_empty());
        assert!(parse_boxes(" \n\t").unwrap().is_empty());
    }

    #[test]
    fn wrong_arity_reports_offset() {
        let e = parse_boxes("(1,2,3,4,5)").unwrap_err();
        assert_eq!(e.offset, 0);
        assert_eq!(e.kind, ParseErrorKind::Arity { expected: 6, found: 5 });
    }

    #[test]
    fn non_numeric_and_nonpositive() {
        let e = parse_boxes("(1,2,3,4,5,x)").unwrap_err();
        assert_eq!(e, ParseError::new(11, ParseErrorKind::NonNumeric("x".into())));
        let e = parse_boxes("(0,0,0,1,1,1)\n(1,2,3,4,0,1)").unwrap_err();
        assert_eq!(e.offset, 14);
        assert_eq!(e.kind, ParseErrorKind::NonPositiveExtent(0.0));
    }

    #[test]
    fn six_waypoints() {
        let p = parse_waypoints("(0,0), (1,0), (2,0), (3,0), (4,0), (5,0)").unwrap();
        assert_eq!(p.points[5], Vec2::new(5.0, 0.0));
    }

    #[test]
    fn waypoint_count_error() {
        let e = parse_waypoints("(0,0), (1,0), (2,0), (3,0), (4,0)").unwrap_err();
        assert_eq!(e.kind.to_string(), "expected 6, found 5");
    }

    #[test]
    fn whitespace_between_tokens() {
        let a = parse_waypoints("(0,0),(1,0),(2,0),(3,0),(4,0),(5,0)").unwrap();
        let b = parse_waypoints(" ( 0 ,\n0 ) ,(1, 0)\n(2,0) ,  (3,0)(4,0),(5 ,0)\n").unwrap();
        assert_eq!(a, b);
    }
}
