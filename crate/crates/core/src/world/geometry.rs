use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        Vec2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Wrap an angle into (-π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Rigid 2D frame: origin and heading of the local x axis in the map frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Vec2,
    pub heading: f64,
}

impl Frame {
    pub fn to_local(&self, p: Vec2) -> Vec2 {
        let d = p - self.origin;
        let (s, c) = self.heading.sin_cos();
        Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    pub fn to_map(&self, p: Vec2) -> Vec2 {
        let (s, c) = self.heading.sin_cos();
        Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y) + self.origin
    }

    /// Rotate a free vector (no translation) into the local frame.
    pub fn rotate_to_local(&self, v: Vec2) -> Vec2 {
        let (s, c) = self.heading.sin_cos();
        Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
    }
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the foot point.
    pub s: f64,
    /// Signed lateral offset, positive to the left of the direction of travel.
    pub lateral: f64,
    pub point: Vec2,
    pub heading: f64,
}

/// Piecewise-linear curve with cached cumulative arc lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Vec2>,
    cum: Vec<f64>,
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicate points. Needs at least
    /// two distinct points.
    pub fn new(raw: Vec<Vec2>) -> Option<Self> {
        let mut points: Vec<Vec2> = Vec::with_capacity(raw.len());
        for p in raw {
            if points.last().is_none_or(|q| q.dist(p) > 1e-9) {
                points.push(p);
            }
        }
        if points.len() < 2 {
            return None;
        }
        let mut cum = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in points.windows(2) {
            acc += w[0].dist(w[1]);
            cum.push(acc);
        }
        Some(Self { points, cum })
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn segment_heading(&self, i: usize) -> f64 {
        let d = self.points[i + 1] - self.points[i];
        d.y.atan2(d.x)
    }

    fn segment_at(&self, s: f64) -> usize {
        match self.cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.points.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.points.len() - 2),
        }
    }

    /// Point at arc length `s`; beyond either end the end segments are
    /// extended linearly.
    pub fn point_at(&self, s: f64) -> Vec2 {
        let i = self.segment_at(s.clamp(0.0, self.length()));
        let seg_len = self.cum[i + 1] - self.cum[i];
        // t leaves [0, 1] only on the first/last segment
        let t = (s - self.cum[i]) / seg_len;
        self.points[i].lerp(self.points[i + 1], t)
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        self.segment_heading(self.segment_at(s.clamp(0.0, self.length())))
    }

    /// Closest point over the whole polyline.
    pub fn project(&self, p: Vec2) -> Projection {
        self.project_window(p, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Closest point restricted to segments overlapping `[s_lo, s_hi]`.
    pub fn project_window(&self, p: Vec2, s_lo: f64, s_hi: f64) -> Projection {
        let mut best: Option<(f64, Projection)> = None;
        for i in 0..self.points.len() - 1 {
            if self.cum[i + 1] < s_lo || self.cum[i] > s_hi {
                continue;
            }
            let a = self.points[i];
            let b = self.points[i + 1];
            let ab = b - a;
            let len2 = ab.dot(ab);
            let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
            let foot = a.lerp(b, t);
            let d = p.dist(foot);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                let side = ab.cross(p - a).signum();
                best = Some((
                    d,
                    Projection {
                        s: self.cum[i] + t * len2.sqrt(),
                        lateral: side * d,
                        point: foot,
                        heading: self.segment_heading(i),
                    },
                ));
            }
        }
        match best {
            Some((_, proj)) => proj,
            None => self.project(p),
        }
    }

    /// Sub-polyline between two arc lengths (clamped to the curve).
    pub fn slice(&self, s0: f64, s1: f64) -> Vec<Vec2> {
        let s0 = s0.clamp(0.0, self.length());
        let s1 = s1.clamp(0.0, self.length());
        let mut out = vec![self.point_at(s0)];
        for (i, &c) in self.cum.iter().enumerate() {
            if c > s0 && c < s1 {
                out.push(self.points[i]);
            }
        }
        out.push(self.point_at(s1));
        out
    }

    /// True when no two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len() - 1;
        for i in 0..n {
            for j in i + 2..n {
                if segments_intersect(
                    self.points[i],
                    self.points[i + 1],
                    self.points[j],
                    self.points[j + 1],
                ) {
                    return false;
                }
            }
        }
        true
    }
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}
