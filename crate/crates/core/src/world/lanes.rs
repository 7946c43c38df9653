use super::geometry::{Polyline, Projection, Vec2};
use serde::{Deserialize, Serialize};

/// Painted boundary marking. Only dashed boundaries may be crossed legally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineType {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaneSpecial {
    None,
    Bus,
    Bicycle,
    TurnOnly,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $kw:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $kw),+ }
            }
        }
        impl ::std::fmt::Display for $ty {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl ::std::str::FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($kw => Ok($ty::$variant),)+
                    other => Err(format!("unknown {} '{}'", stringify!($ty), other)),
                }
            }
        }
    };
}
pub(crate) use keyword_enum;

keyword_enum!(LineType { Solid => "solid", Dashed => "dashed" });
keyword_enum!(LaneSpecial { None => "none", Bus => "bus", Bicycle => "bicycle", TurnOnly => "turn_only" });

#[derive(Debug, Clone, PartialEq)]
pub struct Lane {
    pub id: String,
    pub centerline: Polyline,
    pub width: f64,
    pub left_line: LineType,
    pub right_line: LineType,
    pub left_neighbor: Option<String>,
    pub right_neighbor: Option<String>,
    pub special: LaneSpecial,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaneGraph {
    pub lanes: Vec<Lane>,
}

impl LaneGraph {
    pub fn get(&self, id: &str) -> Option<&Lane> {
        self.lanes.iter().find(|l| l.id == id)
    }

    /// Checks id uniqueness, neighbor existence and symmetry, and simple
    /// centerlines. Returns a message naming the violated invariant.
    pub fn validate(&self) -> Result<(), String> {
        for (i, lane) in self.lanes.iter().enumerate() {
            if self.lanes[..i].iter().any(|l| l.id == lane.id) {
                return Err(format!("duplicate lane id {}", lane.id));
            }
            if !(lane.width > 0.0) {
                return Err(format!("lane {} width must be positive", lane.id));
            }
            if !lane.centerline.is_simple() {
                return Err(format!("lane {} centerline self-intersects", lane.id));
            }
        }
        for lane in &self.lanes {
            if let Some(n) = &lane.left_neighbor {
                let other = self.get(n).ok_or_else(|| format!("unknown lane id {n}"))?;
                if other.right_neighbor.as_deref() != Some(lane.id.as_str()) {
                    return Err(format!("adjacency not symmetric: {} left of {} but not reciprocated", n, lane.id));
                }
            }
            if let Some(n) = &lane.right_neighbor {
                let other = self.get(n).ok_or_else(|| format!("unknown lane id {n}"))?;
                if other.left_neighbor.as_deref() != Some(lane.id.as_str()) {
                    return Err(format!("adjacency not symmetric: {} right of {} but not reciprocated", n, lane.id));
                }
            }
        }
        Ok(())
    }

    /// Lane whose centerline passes closest to `p`.
    pub fn nearest_lane(&self, p: Vec2) -> Option<(&Lane, Projection)> {
        self.lanes
            .iter()
            .map(|l| (l, l.centerline.project(p)))
            .min_by(|a, b| a.1.lateral.abs().total_cmp(&b.1.lateral.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavKind {
    Follow,
    TurnLeft,
    TurnRight,
    GoStraight,
    LaneChangeLeft,
    LaneChangeRight,
    ExitRamp,
}

keyword_enum!(NavKind {
    Follow => "follow",
    TurnLeft => "turn_left",
    TurnRight => "turn_right",
    GoStraight => "go_straight",
    LaneChangeLeft => "lane_change_left",
    LaneChangeRight => "lane_change_right",
    ExitRamp => "exit_ramp",
});

impl NavKind {
    pub const ALL: [NavKind; 7] = [
        NavKind::Follow,
        NavKind::TurnLeft,
        NavKind::TurnRight,
        NavKind::GoStraight,
        NavKind::LaneChangeLeft,
        NavKind::LaneChangeRight,
        NavKind::ExitRamp,
    ];

    /// Commands that move the ego onto a laterally adjacent lane.
    pub fn is_lateral_transition(self) -> bool {
        matches!(self, NavKind::LaneChangeLeft | NavKind::LaneChangeRight | NavKind::ExitRamp)
    }
}

/// Route-level directive that becomes active at an arc-length position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavigationCommand {
    pub at_s: f64,
    pub kind: NavKind,
}

/// Distance ahead of a command at which it is announced to the policy.
pub const NAV_LOOKAHEAD_M: f64 = 20.0;
/// Longitudinal length of a spliced lane-change transition.
pub const LANE_CHANGE_LENGTH_M: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub lane_ids: Vec<String>,
    pub commands: Vec<NavigationCommand>,
}

impl Route {
    /// Command in effect for an ego at arc length `s`: the last command whose
    /// position lies within the announcement lookahead. Lateral transitions
    /// stay active until the transition has been driven.
    pub fn active_command(&self, s: f64) -> NavigationCommand {
        let mut active = NavigationCommand { at_s: 0.0, kind: NavKind::Follow };
        for c in &self.commands {
            if c.at_s <= s + NAV_LOOKAHEAD_M {
                active = *c;
            }
        }
        let expires = if active.kind.is_lateral_transition() {
            active.at_s + LANE_CHANGE_LENGTH_M
        } else {
            active.at_s + NAV_LOOKAHEAD_M
        };
        if s > expires {
            NavigationCommand { at_s: active.at_s, kind: NavKind::Follow }
        } else {
            active
        }
    }

    /// Concatenates the lane centerlines. Consecutive lanes either connect
    /// end-to-start or are lateral neighbors; the latter are spliced with a
    /// straight transition starting at the next lane-change or exit command.
    pub fn centerline(&self, graph: &LaneGraph) -> Result<Polyline, String> {
        let first_id = self.lane_ids.first().ok_or("route has no lanes")?;
        let first = graph.get(first_id).ok_or_else(|| format!("unknown lane id {first_id}"))?;
        let mut pts: Vec<Vec2> = first.centerline.points().to_vec();
        let mut prev = first;
        let mut transitions = self.commands.iter().filter(|c| c.kind.is_lateral_transition());
        for id in &self.lane_ids[1..] {
            let lane = graph.get(id).ok_or_else(|| format!("unknown lane id {id}"))?;
            let start = lane.centerline.points()[0];
            let end = *pts.last().unwrap();
            if start.dist(end) < 0.5 {
                pts.extend_from_slice(&lane.centerline.points()[1..]);
            } else if prev.left_neighbor.as_deref() == Some(id.as_str())
                || prev.right_neighbor.as_deref() == Some(id.as_str())
            {
                let cmd = transitions
                    .next()
                    .ok_or_else(|| format!("lanes {} and {} need a lane-change command", prev.id, id))?;
                let so_far = Polyline::new(pts.clone()).ok_or("degenerate route")?;
                let mut spliced = so_far.slice(0.0, cmd.at_s);
                let join = so_far.point_at(cmd.at_s + LANE_CHANGE_LENGTH_M);
                let s_join = lane.centerline.project(join).s;
                spliced.extend(lane.centerline.slice(s_join, lane.centerline.length()));
                pts = spliced;
            } else {
                return Err(format!("lanes {} and {} are neither connected nor adjacent", prev.id, id));
            }
            prev = lane;
        }
        Polyline::new(pts).ok_or_else(|| "degenerate route".to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(id: &str, pts: &[(f64, f64)], left: Option<&str>, right: Option<&str>) -> Lane {
        Lane {
            id: id.into(),
            centerline: Polyline::new(pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect()).unwrap(),
            width: 3.5,
            left_line: LineType::Dashed,
            right_line: LineType::Solid,
            left_neighbor: left.map(Into::into),
            right_neighbor: right.map(Into::into),
            special: LaneSpecial::None,
        }
    }

    #[test]
    fn asymmetric_adjacency_rejected() {
        let g = LaneGraph { lanes: vec![lane("A", &[(0.0, 0.0), (10.0, 0.0)], Some("B"), None), lane("B", &[(0.0, 3.5), (10.0, 3.5)], None, None)] };
        assert!(g.validate().unwrap_err().contains("not symmetric"));
    }

    #[test]
    fn lane_change_splice() {
        let g = LaneGraph {
            lanes: vec![
                lane("A", &[(0.0, 0.0), (200.0, 0.0)], Some("B"), None),
                lane("B", &[(0.0, 3.5), (200.0, 3.5)], None, Some("A")),
            ],
        };
        g.validate().unwrap();
        let r = Route {
            lane_ids: vec!["A".into(), "B".into()],
            commands: vec![NavigationCommand { at_s: 80.0, kind: NavKind::LaneChangeLeft }],
        };
        let c = r.centerline(&g).unwrap();
        assert_eq!(c.point_at(50.0), Vec2::new(50.0, 0.0));
        let p = c.point_at(150.0);
        assert!((p.y - 3.5).abs() < 1e-9);
        assert!((c.length() - (80.0 + 20.0f64.hypot(3.5) + 100.0)).abs() < 1e-9);
    }

    #[test]
    fn active_command_window() {
        let r = Route {
            lane_ids: vec![],
            commands: vec![NavigationCommand { at_s: 100.0, kind: NavKind::TurnLeft }],
        };
        assert_eq!(r.active_command(50.0).kind, NavKind::Follow);
        assert_eq!(r.active_command(85.0).kind, NavKind::TurnLeft);
        assert_eq!(r.active_command(125.0).kind, NavKind::Follow);
    }
}
